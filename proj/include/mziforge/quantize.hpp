#pragma once

#include "mziforge/device.hpp"

#include <optional>
#include <vector>

namespace mziforge {

enum class QuantMode { evs, eps, kc };

/// Finite-precision phase encoding with 2^n_bits representable levels.
///  - evs: equidistant voltage steps over [0, v_max], phases k * v^2;
///  - eps: equidistant phase steps over [0, 2*pi];
///  - kc:  1-D k-means cluster medians of the phase population. kc_levels
///    caches/overrides the computed levels.
/// n_bits >= 53 is treated as full precision: that many levels are below
/// double resolution of the encoded ranges.
struct QuantizerSpec {
    QuantMode mode = QuantMode::evs;
    unsigned n_bits = 8;
    PhaseShifterSpec phase_spec = PhaseShifterSpec::defaults();
    std::optional<std::vector<double>> kc_levels;
};

/// Snap each phase (radians, in [0, 2*pi]) to its representable level.
/// Nearest level wins, ties break toward the lower level. Out-of-range
/// phases raise std::out_of_range.
std::vector<double> quantize_phases(const std::vector<double>& phases, const QuantizerSpec& spec);

/// Single-phase version. For kc mode the levels must already be present
/// in the quantizer's kc_levels.
double quantize_phase(double phase, const QuantizerSpec& spec);

/// Cluster-median levels for kc quantization, 2^n_bits of them.
/// Centroids start at population quantiles; Lloyd iterations reassign by
/// nearest centroid and move each centroid to its cluster median; empty
/// clusters are re-seeded at the largest cluster's median. Converges on
/// a 1e-9 rad centroid shift or a 100-iteration cap. When the population
/// has at most 2^n_bits distinct values the levels are exactly those
/// values (padded), making quantization the identity.
std::vector<double> kmeans_phase_levels(const std::vector<double>& phases, unsigned n_bits);

} // namespace mziforge
