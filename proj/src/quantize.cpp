#include "mziforge/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mziforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr unsigned kFullPrecisionBits = 53;

// Index of the nearest grid point j * step, j in [0, count); ties go down.
std::size_t snap_index(double value, double step, std::size_t count) {
    const double pos = value / step;
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= count - 1) return count - 1;
    const double d_lo = value - static_cast<double>(lo) * step;
    const double d_hi = static_cast<double>(lo + 1) * step - value;
    // exact ties (and float-noise near-ties) go to the lower level
    return d_lo <= d_hi + 1e-12 * step ? lo : lo + 1;
}

double snap_to_levels(double value, const std::vector<double>& levels) {
    double best = levels.front();
    double best_dist = std::abs(value - best);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double d = std::abs(value - levels[i]);
        if (d < best_dist) { // ties keep the earlier (lower) level
            best = levels[i];
            best_dist = d;
        }
    }
    return best;
}

double median_of_sorted(const std::vector<double>& v) {
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

} // namespace

std::vector<double> kmeans_phase_levels(const std::vector<double>& phases, unsigned n_bits) {
    if (phases.empty())
        throw std::invalid_argument("kmeans_phase_levels: empty phase population");
    if (n_bits == 0)
        throw std::invalid_argument("kmeans_phase_levels: n_bits must be >= 1");

    std::vector<double> sorted = phases;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const std::size_t want = n_bits >= kFullPrecisionBits
                                 ? distinct.size()
                                 : static_cast<std::size_t>(1) << n_bits;
    if (distinct.size() <= want) {
        std::vector<double> levels = distinct;
        if (want <= (static_cast<std::size_t>(1) << 20)) levels.resize(want, distinct.back());
        return levels;
    }
    const std::size_t k = want;

    // Quantile initialization over the sorted population.
    std::vector<double> centroids(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = static_cast<std::size_t>(
            (static_cast<double>(i) + 0.5) * static_cast<double>(sorted.size()) /
            static_cast<double>(k));
        centroids[i] = sorted[std::min(idx, sorted.size() - 1)];
    }

    std::vector<std::vector<double>> clusters(k);
    for (int iter = 0; iter < 100; ++iter) {
        for (auto& c : clusters) c.clear();
        for (double p : sorted) {
            std::size_t best = 0;
            double best_dist = std::abs(p - centroids[0]);
            for (std::size_t i = 1; i < k; ++i) {
                const double d = std::abs(p - centroids[i]);
                if (d < best_dist) {
                    best = i;
                    best_dist = d;
                }
            }
            clusters[best].push_back(p);
        }

        std::size_t largest = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (clusters[i].size() > clusters[largest].size()) largest = i;
        const double fallback = median_of_sorted(clusters[largest]);

        double shift = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double next = clusters[i].empty() ? fallback : median_of_sorted(clusters[i]);
            shift = std::max(shift, std::abs(next - centroids[i]));
            centroids[i] = next;
        }
        if (shift < 1e-9) break;
    }
    std::sort(centroids.begin(), centroids.end());
    return centroids;
}

double quantize_phase(double phase, const QuantizerSpec& spec) {
    if (!(phase >= 0.0 && phase <= kTwoPi))
        throw std::out_of_range("quantize_phase: phase outside [0, 2*pi]");
    if (spec.n_bits == 0)
        throw std::invalid_argument("quantize_phase: n_bits must be >= 1");
    if (spec.n_bits >= kFullPrecisionBits && spec.mode != QuantMode::kc) return phase;

    switch (spec.mode) {
    case QuantMode::evs: {
        const std::size_t count = static_cast<std::size_t>(1) << spec.n_bits;
        const double step = spec.phase_spec.v_max / static_cast<double>(count - 1);
        const double v = voltage_from_phase(phase, spec.phase_spec);
        const double snapped = static_cast<double>(snap_index(v, step, count)) * step;
        return spec.phase_spec.k * snapped * snapped;
    }
    case QuantMode::eps: {
        const std::size_t count = static_cast<std::size_t>(1) << spec.n_bits;
        const double step = kTwoPi / static_cast<double>(count - 1);
        return static_cast<double>(snap_index(phase, step, count)) * step;
    }
    case QuantMode::kc: {
        if (!spec.kc_levels || spec.kc_levels->empty())
            throw std::invalid_argument("quantize_phase: kc mode needs levels");
        return snap_to_levels(phase, *spec.kc_levels);
    }
    }
    throw std::logic_error("quantize_phase: unknown mode");
}

std::vector<double> quantize_phases(const std::vector<double>& phases, const QuantizerSpec& spec) {
    QuantizerSpec local = spec;
    if (local.mode == QuantMode::kc && !local.kc_levels)
        local.kc_levels = kmeans_phase_levels(phases, local.n_bits);
    std::vector<double> out;
    out.reserve(phases.size());
    for (double p : phases) out.push_back(quantize_phase(p, local));
    return out;
}

} // namespace mziforge
