#pragma once

#include "mziforge/matrix.hpp"

namespace mziforge {

/// Full SVD of a complex matrix A = u * diag(singular_values) * v_h.
/// u is rows x rows, v_h is cols x cols, both unitary; singular values
/// are sorted descending. The rectangular diagonal carries
/// min(rows, cols) values.
struct SvdResult {
    ComplexMatrix u;
    std::vector<double> singular_values;
    ComplexMatrix v_h;
};

/// One-sided Jacobi SVD. Accurate and simple at the small sizes this
/// library handles (the mesh code never goes past 32 modes).
/// Throws std::invalid_argument on empty or non-finite input.
SvdResult svd(const ComplexMatrix& a);

/// Max absolute entry of u * u^H - I. Zero (within arithmetic) iff u is
/// unitary. Throws std::invalid_argument if u is not square.
double unitarity_error(const ComplexMatrix& u);

/// Unnormalized forward 2-D DFT with the DC bin moved to the central
/// index (rows/2, cols/2). Direct per-axis evaluation; at the image
/// sizes involved there is nothing to gain from an FFT.
ComplexMatrix dft2_shifted(const RealMatrix& image);

} // namespace mziforge
