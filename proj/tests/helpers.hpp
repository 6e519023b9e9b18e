#pragma once

#include "mziforge/matrix.hpp"
#include "mziforge/rng.hpp"

#include <cmath>
#include <vector>

namespace testutil {

using mziforge::ComplexMatrix;
using mziforge::cplx;
using mziforge::RngStream;

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, RngStream& rng) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = cplx(rng.gaussian(), rng.gaussian());
    return m;
}

/// Random unitary via modified Gram-Schmidt on a Gaussian matrix —
/// an oracle path independent of the library's SVD and mesh code.
inline ComplexMatrix random_unitary(std::size_t n, RngStream& rng) {
    ComplexMatrix a = random_complex(n, n, rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(a.at(i, k)) * a.at(i, j);
                for (std::size_t i = 0; i < n; ++i) a.at(i, j) -= proj * a.at(i, k);
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(a.at(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) a.at(i, j) /= nrm;
    }
    return a;
}

/// U * diag(s) * V^H with a rectangular diagonal.
inline ComplexMatrix reconstruct_svd(const ComplexMatrix& u, const std::vector<double>& s,
                                     const ComplexMatrix& v_h) {
    ComplexMatrix mid(u.cols(), v_h.rows());
    for (std::size_t i = 0; i < s.size() && i < mid.rows() && i < mid.cols(); ++i)
        mid.at(i, i) = s[i];
    return u * mid * v_h;
}

} // namespace testutil
