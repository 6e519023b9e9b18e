#pragma once

#include "mziforge/device.hpp"
#include "mziforge/matrix.hpp"

#include <cstddef>
#include <vector>

namespace mziforge {

/// One interferometer of a rectangular mesh. Acts on modes
/// (top_mode, top_mode + 1) in column `layer`; occupies the two grid
/// cells (grid_x, grid_y) and (grid_x + 1, grid_y), with grid_x = 2 *
/// layer and grid_y = top_mode.
struct MziNode {
    std::size_t layer = 0;
    std::size_t top_mode = 0;
    PhasePair phases;
    SplitterQuad splitters = SplitterQuad::ideal();
    ArmLoss loss;
    std::size_t grid_x = 0;
    std::size_t grid_y = 0;
};

/// Rectangular mesh realizing one n x n unitary: nodes in application
/// order (input to output) followed by a diagonal phase screen of n
/// unit-modulus factors at the output.
struct MeshPlan {
    std::size_t n = 0;
    std::vector<MziNode> nodes;
    std::vector<double> phase_screen;
};

/// Singular-value stage: per-channel attenuation scalars in [0, 1] plus
/// one global gain so arbitrary diagonals are reachable with
/// attenuate-only hardware.
struct DiagonalStage {
    std::vector<double> scalars;
    double gain = 1.0;
};

/// Rectangular (Clements-style) decomposition of a unitary into a mesh of
/// n*(n-1)/2 ideal lossless MZIs plus an output phase screen.
/// Requires unitarity_error(u) <= 1e-8 and n >= 2; throws
/// std::invalid_argument (carrying the measured error) otherwise.
/// The rebuilt unitary matches u to within `tol` in Frobenius norm.
MeshPlan clements_decompose(const ComplexMatrix& u, double tol = 1e-8);

/// Forward evaluation: the exact linear operator realized by the plan.
ComplexMatrix mesh_to_unitary(const MeshPlan& plan);

/// Canonical physical placement of the full mesh for n modes on the
/// (n-1) x 2n unit grid.
struct GridPos {
    std::size_t layer, top_mode, grid_x, grid_y;
};
std::vector<GridPos> grid_layout(std::size_t n);
std::size_t grid_width(std::size_t n);  // 2n
std::size_t grid_height(std::size_t n); // n - 1

/// Split nonnegative singular values into gain = max(values) and
/// scalars = values / gain. All-zero input gets gain 1.
DiagonalStage diagonal_stage(const std::vector<double>& singular_values);

/// Tuned internal phase of an attenuator MZI passing amplitude `scalar`:
/// |e^{i theta} - 1| / 2 = sin(theta / 2).
double attenuator_theta(double scalar);

/// Relative-variation distance: sum over entries of
/// |u_mn - ref_mn| / |ref_mn|. Reference entries with modulus below
/// 1e-9 are excluded so the metric stays finite on structured unitaries.
double rvd(const ComplexMatrix& u, const ComplexMatrix& u_ref);

} // namespace mziforge
