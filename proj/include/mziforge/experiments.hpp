#pragma once

#include "mziforge/imperfection.hpp"
#include "mziforge/mc_runner.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mziforge {

/// Monte-Carlo summary for one parameter set: instance i always uses
/// stream i, so the report is a pure function of (p, n_p, seed).
struct MonteCarloReport {
    ImperfectionParameterSet p;
    std::size_t n_p = 0;
    std::vector<double> per_run_accuracy;
    double nominal_accuracy = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    double sal = 0.0; // nominal - mean
};

MonteCarloReport simulated_accuracy_loss(const IpnnModel& model, const Dataset& dataset,
                                         const ImperfectionParameterSet& p, std::size_t n_p,
                                         std::uint64_t seed, const McOptions& opt = {});

/// Per-term breakdown of the standalone-loss sum.
struct AggregatedLoss {
    double sal_phs = 0.0, sal_bes = 0.0, sal_corr = 0.0, sal_il = 0.0, sal_quant = 0.0;
    double total() const { return sal_phs + sal_bes + sal_corr + sal_il + sal_quant; }
};
AggregatedLoss aggregated_accuracy_loss_terms(const IpnnModel& model, const Dataset& dataset,
                                              const ImperfectionParameterSet& p, std::size_t n_p,
                                              std::uint64_t seed, const McOptions& opt = {});
double aggregated_accuracy_loss(const IpnnModel& model, const Dataset& dataset,
                                const ImperfectionParameterSet& p, std::size_t n_p,
                                std::uint64_t seed, const McOptions& opt = {});

/// Tabular sweep output: one row per axis point, plus free-form metadata
/// echoed into the result envelope.
struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<std::vector<std::string>> axis_values; // per row
    std::vector<double> mean_accuracy;
    std::vector<double> std_accuracy;
    std::size_t n_mc = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> metadata;
};

enum class UncertaintyMode { phs, bes, both };
UncertaintyMode parse_uncertainty_mode(const std::string& name);

/// Same uncertainty distribution across every MZI; accuracy vs sigma.
SweepResult run_exp1(const IpnnModel& model, const Dataset& dataset,
                     const std::vector<double>& sigma_list, UncertaintyMode mode, std::size_t n_mc,
                     std::uint64_t seed, const McOptions& opt = {});

/// Localized stronger uncertainties: each heatmap cell is the mean
/// accuracy loss when one 2x2-MZI region of one mesh carries sigma_in
/// while everything else carries sigma_out.
struct Exp2Result {
    std::vector<std::string> mesh_labels; // e.g. "L0.VH", "L0.U"
    std::vector<RealMatrix> heatmaps;     // [region_row][region_col]
    bool has_partial_regions = false;
    double nominal_accuracy = 0.0;
    std::size_t n_mc = 0;
    std::uint64_t seed = 0;
};
Exp2Result run_exp2(const IpnnModel& model, const Dataset& dataset, double sigma_in,
                    double sigma_out, std::size_t n_mc, std::uint64_t seed,
                    const McOptions& opt = {});

/// Spatially correlated maps: one accuracy curve per correlation length.
SweepResult run_exp3(const IpnnModel& model, const Dataset& dataset,
                     const std::vector<double>& sigma_list,
                     const std::vector<std::size_t>& corr_lens, bool radial, UncertaintyMode mode,
                     std::size_t n_mc, std::uint64_t seed, const McOptions& opt = {});

/// Average relative-variation distance when one MZI at a time carries
/// i.i.d. Gaussian parameter errors; one entry per node of the
/// decomposed mesh.
std::vector<double> per_mzi_rvd(const ComplexMatrix& u, double sigma_phs, double sigma_bes,
                                std::size_t n_mc, std::uint64_t seed, const McOptions& opt = {});

/// Insertion-loss sweep over (mu_il, sigma_il); lossy_layer < 0 makes
/// every layer lossy, otherwise only that layer index.
SweepResult run_loss_sweep(const IpnnModel& model, const Dataset& dataset,
                           const std::vector<double>& mu_il_list,
                           const std::vector<double>& sigma_il_list, int lossy_layer,
                           std::size_t n_mc, std::uint64_t seed, const McOptions& opt = {});

/// Deterministic accuracy under finite-precision phase encoding, per
/// (mode, n_bits). quant_layer < 0 quantizes every layer at the swept
/// precision; otherwise the selected layer is swept and the others stay
/// at 8 bits.
SweepResult run_quant_sweep(const IpnnModel& model, const Dataset& dataset,
                            const std::vector<QuantMode>& modes,
                            const std::vector<unsigned>& n_bits_list, int quant_layer,
                            std::uint64_t seed);

/// Exhaustive lattice search for the maximal imperfection parameter
/// sets: all feasible points (SAL <= alpha_max) that no other feasible
/// point dominates. Grids must be non-empty.
struct PstarGrids {
    std::vector<double> sigma_phs;
    std::vector<double> sigma_bes;
    std::vector<std::size_t> corr_len;
    std::vector<double> sigma_il;
    std::vector<unsigned> n_bits;
};
struct PstarPoint {
    ImperfectionParameterSet p;
    double sal = 0.0;
};
std::vector<PstarPoint> search_pstar(const IpnnModel& model, const Dataset& dataset,
                                     const PstarGrids& grids, double alpha_max, std::size_t n_p,
                                     std::uint64_t seed, const ImperfectionParameterSet& base = {},
                                     const McOptions& opt = {});

/// Dominance in the imperfection order (every component at least as
/// imperfect, n_bits compared inverted, and not equal).
bool pstar_dominates(const ImperfectionParameterSet& a, const ImperfectionParameterSet& b);

} // namespace mziforge
