#include "mziforge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace mziforge {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double accuracy_under(const IpnnModel& model, const Dataset& dataset,
                      const ImperfectionInstance& inst) {
    return evaluate_accuracy(apply_instance(model, inst), dataset);
}

ImperfectionParameterSet mode_sigmas(ImperfectionParameterSet p, UncertaintyMode mode,
                                     double sigma) {
    switch (mode) {
    case UncertaintyMode::phs:
        p.sigma_phs = sigma;
        p.sigma_bes = 0.0;
        break;
    case UncertaintyMode::bes:
        p.sigma_phs = 0.0;
        p.sigma_bes = sigma;
        break;
    case UncertaintyMode::both:
        p.sigma_phs = sigma;
        p.sigma_bes = sigma;
        break;
    }
    return p;
}

} // namespace

UncertaintyMode parse_uncertainty_mode(const std::string& name) {
    if (name == "phs") return UncertaintyMode::phs;
    if (name == "bes") return UncertaintyMode::bes;
    if (name == "both") return UncertaintyMode::both;
    throw std::invalid_argument("unknown uncertainty mode: " + name);
}

MonteCarloReport simulated_accuracy_loss(const IpnnModel& model, const Dataset& dataset,
                                         const ImperfectionParameterSet& p, std::size_t n_p,
                                         std::uint64_t seed, const McOptions& opt) {
    if (n_p < 1) throw std::invalid_argument("simulated_accuracy_loss: n_p must be >= 1");
    const ModelShape shape = model_shape(model);

    MonteCarloReport report;
    report.p = p;
    report.n_p = n_p;
    report.nominal_accuracy = evaluate_accuracy(model, dataset);
    report.per_run_accuracy = run_indexed(
        n_p,
        [&](std::size_t i) {
            return accuracy_under(model, dataset, realize_instance(p, shape, seed, i));
        },
        opt);
    const MeanStd ms = mean_std(report.per_run_accuracy);
    report.mean_accuracy = ms.mean;
    report.std_accuracy = ms.stddev;
    report.sal = report.nominal_accuracy - report.mean_accuracy;
    return report;
}

AggregatedLoss aggregated_accuracy_loss_terms(const IpnnModel& model, const Dataset& dataset,
                                              const ImperfectionParameterSet& p, std::size_t n_p,
                                              std::uint64_t seed, const McOptions& opt) {
    // One standalone term per quintuplet component; inactive components
    // sit at their ideal values (sigmas 0, L = 1, quantizer off).
    ImperfectionParameterSet base;
    base.radial = p.radial;
    base.quant_mode = p.quant_mode;
    base.renormalize_maps = p.renormalize_maps;

    AggregatedLoss out;
    {
        ImperfectionParameterSet q = base;
        q.sigma_phs = p.sigma_phs;
        out.sal_phs = simulated_accuracy_loss(model, dataset, q, n_p, seed, opt).sal;
    }
    {
        ImperfectionParameterSet q = base;
        q.sigma_bes = p.sigma_bes;
        out.sal_bes = simulated_accuracy_loss(model, dataset, q, n_p, seed, opt).sal;
    }
    {
        // L multiplies nothing when both sigmas are zero, so this term is
        // structurally zero; kept literal for the sum's shape.
        ImperfectionParameterSet q = base;
        q.corr_len = p.corr_len;
        out.sal_corr = simulated_accuracy_loss(model, dataset, q, n_p, seed, opt).sal;
    }
    {
        ImperfectionParameterSet q = base;
        q.sigma_il = p.sigma_il;
        q.mu_il = p.mu_il;
        out.sal_il = simulated_accuracy_loss(model, dataset, q, n_p, seed, opt).sal;
    }
    {
        ImperfectionParameterSet q = base;
        q.n_bits = p.n_bits;
        out.sal_quant = simulated_accuracy_loss(model, dataset, q, n_p, seed, opt).sal;
    }
    return out;
}

double aggregated_accuracy_loss(const IpnnModel& model, const Dataset& dataset,
                                const ImperfectionParameterSet& p, std::size_t n_p,
                                std::uint64_t seed, const McOptions& opt) {
    return aggregated_accuracy_loss_terms(model, dataset, p, n_p, seed, opt).total();
}

SweepResult run_exp1(const IpnnModel& model, const Dataset& dataset,
                     const std::vector<double>& sigma_list, UncertaintyMode mode, std::size_t n_mc,
                     std::uint64_t seed, const McOptions& opt) {
    SweepResult result;
    result.axis_names = {"sigma"};
    result.n_mc = n_mc;
    result.seed = seed;
    result.metadata["experiment"] = "exp1";
    result.metadata["mode"] = mode == UncertaintyMode::phs   ? "phs"
                              : mode == UncertaintyMode::bes ? "bes"
                                                             : "both";
    for (double sigma : sigma_list) {
        const ImperfectionParameterSet p = mode_sigmas({}, mode, sigma);
        const MonteCarloReport report = simulated_accuracy_loss(model, dataset, p, n_mc, seed, opt);
        result.axis_values.push_back({format_double(sigma)});
        result.mean_accuracy.push_back(report.mean_accuracy);
        result.std_accuracy.push_back(report.std_accuracy);
    }
    return result;
}

Exp2Result run_exp2(const IpnnModel& model, const Dataset& dataset, double sigma_in,
                    double sigma_out, std::size_t n_mc, std::uint64_t seed, const McOptions& opt) {
    Exp2Result result;
    result.n_mc = n_mc;
    result.seed = seed;
    result.nominal_accuracy = evaluate_accuracy(model, dataset);

    // Flattened mesh list in model order, same indexing as
    // ImperfectionInstance::per_mesh.
    std::vector<const MeshPlan*> meshes;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        meshes.push_back(&model.layers[li].v_h_mesh);
        meshes.push_back(&model.layers[li].u_mesh);
        result.mesh_labels.push_back("L" + std::to_string(li) + ".VH");
        result.mesh_labels.push_back("L" + std::to_string(li) + ".U");
    }

    const double phase_std_in = 2.0 * std::numbers::pi * sigma_in;
    const double phase_std_out = 2.0 * std::numbers::pi * sigma_out;
    const double split_std_in = sigma_in / std::numbers::sqrt2;
    const double split_std_out = sigma_out / std::numbers::sqrt2;

    // i.i.d. per-node draws with a per-node sigma level; the region
    // selection only decides which level each node gets.
    auto realize_regional = [&](std::size_t sel_mesh, std::size_t region_row,
                                std::size_t region_col, std::uint64_t stream) {
        ImperfectionInstance inst;
        inst.p = {};
        inst.seed = seed;
        inst.stream = stream;
        inst.per_mesh.resize(meshes.size());
        RngStream rng(seed, stream);
        for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
            const MeshPlan& mesh = *meshes[mi];
            auto& deltas = inst.per_mesh[mi];
            deltas.resize(mesh.nodes.size());
            for (std::size_t ni = 0; ni < mesh.nodes.size(); ++ni) {
                const MziNode& node = mesh.nodes[ni];
                const bool selected = mi == sel_mesh && node.layer / 2 == region_col &&
                                      node.top_mode / 2 == region_row;
                const double ps = selected ? phase_std_in : phase_std_out;
                const double ss = selected ? split_std_in : split_std_out;
                NodeDeltas& d = deltas[ni];
                d.d_theta = ps * rng.gaussian();
                d.d_phi = ps * rng.gaussian();
                d.dr = ss * rng.gaussian();
                d.dt = ss * rng.gaussian();
                d.dr2 = ss * rng.gaussian();
                d.dt2 = ss * rng.gaussian();
            }
        }
        return inst;
    };

    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
        const MeshPlan& mesh = *meshes[mi];
        std::size_t max_layer = 0, max_row = 0;
        for (const MziNode& node : mesh.nodes) {
            max_layer = std::max(max_layer, node.layer);
            max_row = std::max(max_row, node.top_mode / 2);
        }
        const std::size_t cols = max_layer / 2 + 1;
        const std::size_t rows = max_row / 2 + 1;
        if ((max_layer + 1) % 2 != 0 || (max_row + 1) % 2 != 0) result.has_partial_regions = true;

        RealMatrix heat(rows, cols);
        for (std::size_t rr = 0; rr < rows; ++rr) {
            for (std::size_t cc = 0; cc < cols; ++cc) {
                const std::vector<double> acc = run_indexed(
                    n_mc,
                    [&](std::size_t i) {
                        return accuracy_under(model, dataset, realize_regional(mi, rr, cc, i));
                    },
                    opt);
                heat.at(rr, cc) = result.nominal_accuracy - mean_std(acc).mean;
            }
        }
        result.heatmaps.push_back(std::move(heat));
    }
    return result;
}

SweepResult run_exp3(const IpnnModel& model, const Dataset& dataset,
                     const std::vector<double>& sigma_list,
                     const std::vector<std::size_t>& corr_lens, bool radial, UncertaintyMode mode,
                     std::size_t n_mc, std::uint64_t seed, const McOptions& opt) {
    SweepResult result;
    result.axis_names = {"L", "sigma"};
    result.n_mc = n_mc;
    result.seed = seed;
    result.metadata["experiment"] = "exp3";
    result.metadata["radial"] = radial ? "1" : "0";
    result.metadata["mode"] = mode == UncertaintyMode::phs   ? "phs"
                              : mode == UncertaintyMode::bes ? "bes"
                                                             : "both";
    for (std::size_t len : corr_lens) {
        for (double sigma : sigma_list) {
            ImperfectionParameterSet p = mode_sigmas({}, mode, sigma);
            p.corr_len = len;
            p.radial = radial;
            const MonteCarloReport report =
                simulated_accuracy_loss(model, dataset, p, n_mc, seed, opt);
            result.axis_values.push_back({std::to_string(len), format_double(sigma)});
            result.mean_accuracy.push_back(report.mean_accuracy);
            result.std_accuracy.push_back(report.std_accuracy);
        }
    }
    return result;
}

std::vector<double> per_mzi_rvd(const ComplexMatrix& u, double sigma_phs, double sigma_bes,
                                std::size_t n_mc, std::uint64_t seed, const McOptions& opt) {
    if (n_mc < 1) throw std::invalid_argument("per_mzi_rvd: n_mc must be >= 1");
    const MeshPlan plan = clements_decompose(u);
    const ComplexMatrix nominal = mesh_to_unitary(plan);
    const double phase_std = 2.0 * std::numbers::pi * sigma_phs;
    const double split_std = sigma_bes / std::numbers::sqrt2;

    std::vector<double> averages(plan.nodes.size());
    for (std::size_t node_idx = 0; node_idx < plan.nodes.size(); ++node_idx) {
        const std::vector<double> runs = run_indexed(
            n_mc,
            [&](std::size_t i) {
                RngStream rng(seed, node_idx * n_mc + i);
                MeshPlan perturbed = plan;
                MziNode& node = perturbed.nodes[node_idx];
                node.phases = PhasePair(node.phases.theta + phase_std * rng.gaussian(),
                                        node.phases.phi + phase_std * rng.gaussian());
                auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
                node.splitters.r = clamp01(node.splitters.r + split_std * rng.gaussian());
                node.splitters.t = clamp01(node.splitters.t + split_std * rng.gaussian());
                node.splitters.r2 = clamp01(node.splitters.r2 + split_std * rng.gaussian());
                node.splitters.t2 = clamp01(node.splitters.t2 + split_std * rng.gaussian());
                return rvd(mesh_to_unitary(perturbed), nominal);
            },
            opt);
        averages[node_idx] = mean_std(runs).mean;
    }
    return averages;
}

SweepResult run_loss_sweep(const IpnnModel& model, const Dataset& dataset,
                           const std::vector<double>& mu_il_list,
                           const std::vector<double>& sigma_il_list, int lossy_layer,
                           std::size_t n_mc, std::uint64_t seed, const McOptions& opt) {
    if (lossy_layer >= static_cast<int>(model.layers.size()))
        throw std::invalid_argument("run_loss_sweep: layer index out of range");
    const ModelShape shape = model_shape(model);
    std::vector<bool> mask(shape.meshes.size(), true);
    if (lossy_layer >= 0) {
        mask.assign(shape.meshes.size(), false);
        mask[2 * static_cast<std::size_t>(lossy_layer)] = true;
        mask[2 * static_cast<std::size_t>(lossy_layer) + 1] = true;
    }

    SweepResult result;
    result.axis_names = {"mu_il", "sigma_il"};
    result.n_mc = n_mc;
    result.seed = seed;
    result.metadata["experiment"] = "loss";
    result.metadata["layer"] = lossy_layer < 0 ? "all" : std::to_string(lossy_layer);

    for (double mu : mu_il_list) {
        for (double sig : sigma_il_list) {
            ImperfectionParameterSet p;
            p.mu_il = mu;
            p.sigma_il = sig;
            const std::vector<double> acc = run_indexed(
                n_mc,
                [&](std::size_t i) {
                    return accuracy_under(model, dataset,
                                          realize_instance(p, shape, seed, i, &mask));
                },
                opt);
            const MeanStd ms = mean_std(acc);
            result.axis_values.push_back({format_double(mu), format_double(sig)});
            result.mean_accuracy.push_back(ms.mean);
            result.std_accuracy.push_back(ms.stddev);
        }
    }
    return result;
}

SweepResult run_quant_sweep(const IpnnModel& model, const Dataset& dataset,
                            const std::vector<QuantMode>& modes,
                            const std::vector<unsigned>& n_bits_list, int quant_layer,
                            std::uint64_t seed) {
    if (quant_layer >= static_cast<int>(model.layers.size()))
        throw std::invalid_argument("run_quant_sweep: layer index out of range");

    SweepResult result;
    result.axis_names = {"mode", "n_bits"};
    result.n_mc = 1;
    result.seed = seed;
    result.metadata["experiment"] = "quant";
    result.metadata["layer"] = quant_layer < 0 ? "all" : std::to_string(quant_layer);

    for (QuantMode mode : modes) {
        const std::string mode_name = mode == QuantMode::evs   ? "EVS"
                                      : mode == QuantMode::eps ? "EPS"
                                                               : "KC";
        for (unsigned bits : n_bits_list) {
            std::vector<QuantizerSpec> per_layer(model.layers.size());
            for (std::size_t li = 0; li < per_layer.size(); ++li) {
                per_layer[li].mode = mode;
                // unselected layers stay at 8-bit precision
                per_layer[li].n_bits =
                    quant_layer < 0 || li == static_cast<std::size_t>(quant_layer) ? bits : 8;
            }
            const double acc = evaluate_accuracy(quantize_model(model, per_layer), dataset);
            result.axis_values.push_back({mode_name, std::to_string(bits)});
            result.mean_accuracy.push_back(acc);
            result.std_accuracy.push_back(0.0);
        }
    }
    return result;
}

bool pstar_dominates(const ImperfectionParameterSet& a, const ImperfectionParameterSet& b) {
    const bool ge = a.sigma_phs >= b.sigma_phs && a.sigma_bes >= b.sigma_bes &&
                    a.corr_len >= b.corr_len && a.sigma_il >= b.sigma_il && a.n_bits <= b.n_bits;
    const bool eq = a.sigma_phs == b.sigma_phs && a.sigma_bes == b.sigma_bes &&
                    a.corr_len == b.corr_len && a.sigma_il == b.sigma_il && a.n_bits == b.n_bits;
    return ge && !eq;
}

std::vector<PstarPoint> search_pstar(const IpnnModel& model, const Dataset& dataset,
                                     const PstarGrids& grids, double alpha_max, std::size_t n_p,
                                     std::uint64_t seed, const ImperfectionParameterSet& base,
                                     const McOptions& opt) {
    if (grids.sigma_phs.empty() || grids.sigma_bes.empty() || grids.corr_len.empty() ||
        grids.sigma_il.empty() || grids.n_bits.empty())
        throw std::invalid_argument("search_pstar: every parameter grid must be non-empty");
    if (!(alpha_max > 0.0 && alpha_max <= 1.0))
        throw std::invalid_argument("search_pstar: alpha_max must be in (0, 1]");

    std::vector<PstarPoint> feasible;
    for (double sp : grids.sigma_phs)
        for (double sb : grids.sigma_bes)
            for (std::size_t len : grids.corr_len)
                for (double si : grids.sigma_il)
                    for (unsigned bits : grids.n_bits) {
                        ImperfectionParameterSet p = base;
                        p.sigma_phs = sp;
                        p.sigma_bes = sb;
                        p.corr_len = len;
                        p.sigma_il = si;
                        p.n_bits = bits;
                        const double sal =
                            simulated_accuracy_loss(model, dataset, p, n_p, seed, opt).sal;
                        if (sal <= alpha_max) feasible.push_back({p, sal});
                    }

    std::vector<PstarPoint> front;
    for (const PstarPoint& cand : feasible) {
        bool dominated = false;
        for (const PstarPoint& other : feasible)
            if (pstar_dominates(other.p, cand.p)) {
                dominated = true;
                break;
            }
        if (!dominated) front.push_back(cand);
    }
    return front;
}

} // namespace mziforge
