#pragma once

#include "mziforge/rng.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mziforge {

enum class MapKind { phase, splitter };

/// Per-cell random deviations laid over the physical MZI grid. Cell
/// (x, y) is column x, row y, origin at the lower-left of the array.
/// Phase-kind values are radians, splitter-kind values are amplitude
/// deltas.
struct VariationMap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values; // row-major [y * width + x]

    double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
    double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
};

/// Draw one variation map.
///  - base cells are i.i.d. N(0, (2*pi*sigma)^2) for phase kind,
///    N(0, sigma^2 / 2) for splitter kind;
///  - radial maps scale each cell's deviation by its distance from the
///    grid center over the center-to-corner distance;
///  - corr_len > 1 convolves with the anisotropic Gaussian kernel
///    (2 / (sqrt(pi) L)) * exp(-(2 dx^2 + dy^2) / L^2), zero-padded to
///    the same size, then (when renormalize is set) rescales the result
///    so its RMS matches the pre-convolution map's RMS. The RMS is taken
///    about zero so a correlated common-mode shift survives rescaling.
VariationMap generate_variation_map(std::size_t width, std::size_t height, double sigma,
                                    MapKind kind, bool radial, std::size_t corr_len,
                                    RngStream& rng, bool renormalize = true);

/// CSV export: metadata header line, then the grid row-major.
std::string variation_map_csv(const VariationMap& map, double sigma, MapKind kind, bool radial,
                              std::size_t corr_len);

} // namespace mziforge
