// mziforge command-line front end: experiment dispatch from JSON configs,
// mesh decomposition, and plan verification.

#include <CLI11.hpp>
#include <json.hpp>

#include "mziforge/experiments.hpp"
#include "mziforge/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mziforge;

namespace {

constexpr const char* kToolVersion = "mziforge 0.1.0";
constexpr std::size_t kDefaultNp = 10;

// config problems exit with code 2; runtime failures with 1
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const std::string& k : required)
        if (!obj.contains(k)) throw ConfigError(where + ": missing required field '" + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key()))
            throw ConfigError(where + ": unknown field '" + it.key() + "'");
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

template <typename T>
T get_field_or(const json& obj, const std::string& key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_field<T>(obj, key, where);
}

QuantMode parse_quant_mode(const std::string& name, const std::string& where) {
    if (name == "EVS") return QuantMode::evs;
    if (name == "EPS") return QuantMode::eps;
    if (name == "KC") return QuantMode::kc;
    throw ConfigError(where + ": quant mode must be EVS, EPS or KC, got '" + name + "'");
}

ImperfectionParameterSet parse_p(const json& obj, const std::string& where) {
    check_keys(obj, where, {},
               {"sigma_phs", "sigma_bes", "corr_len", "sigma_il", "mu_il", "n_bits", "radial",
                "quant_mode", "renormalize"});
    ImperfectionParameterSet p;
    p.sigma_phs = get_field_or<double>(obj, "sigma_phs", where, 0.0);
    p.sigma_bes = get_field_or<double>(obj, "sigma_bes", where, 0.0);
    p.corr_len = get_field_or<std::size_t>(obj, "corr_len", where, 1);
    p.sigma_il = get_field_or<double>(obj, "sigma_il", where, 0.0);
    p.mu_il = get_field_or<double>(obj, "mu_il", where, 0.0);
    p.n_bits = get_field_or<unsigned>(obj, "n_bits", where, 0);
    p.radial = get_field_or<bool>(obj, "radial", where, false);
    p.quant_mode = parse_quant_mode(get_field_or<std::string>(obj, "quant_mode", where, "EVS"), where);
    p.renormalize_maps = get_field_or<bool>(obj, "renormalize", where, true);
    if (p.sigma_phs < 0.0 || p.sigma_bes < 0.0 || p.sigma_il < 0.0)
        throw ConfigError(where + ": sigma values must be nonnegative");
    if (p.corr_len < 1) throw ConfigError(where + ": corr_len must be >= 1");
    return p;
}

struct ModelBundle {
    IpnnModel model;
    Dataset dataset;
};

ModelBundle load_model(const json& config) {
    const json& m = config.at("model");
    check_keys(m, "model", {}, {"toy", "weights"});
    if (m.contains("toy") == m.contains("weights"))
        throw ConfigError("model: exactly one of 'toy' or 'weights' is required");

    ModelBundle bundle;
    if (m.contains("toy")) {
        const json& toy = m.at("toy");
        check_keys(toy, "model.toy", {"classes"}, {"layers"});
        const std::size_t classes = get_field<std::size_t>(toy, "classes", "model.toy");
        const std::size_t layers = get_field_or<std::size_t>(toy, "layers", "model.toy", 1);
        auto [model, data] = build_toy_classifier(classes);
        bundle.dataset = std::move(data);
        bundle.model = layers == 1 ? std::move(model) : build_toy_model(classes, layers);
        if (config.contains("dataset"))
            throw ConfigError("dataset: toy models supply their own dataset");
        return bundle;
    }

    bundle.model = build_model(
        io::weights_from_json(io::read_file(get_field<std::string>(m, "weights", "model"))));
    if (!config.contains("dataset"))
        throw ConfigError("dataset: required when the model comes from a weight file");
    const json& d = config.at("dataset");
    check_keys(d, "dataset", {"file"}, {});
    bundle.dataset = io::dataset_from_json(io::read_file(get_field<std::string>(d, "file", "dataset")));
    return bundle;
}

int resolve_layer(const json& config, const std::string& where, std::size_t layer_count) {
    if (!config.contains("layer")) return -1;
    const json& sel = config.at("layer");
    if (sel.is_string()) {
        if (sel.get<std::string>() == "all") return -1;
        throw ConfigError(where + ": layer must be \"all\" or an index");
    }
    const int idx = sel.get<int>();
    if (idx < 0 || idx >= static_cast<int>(layer_count))
        throw ConfigError(where + ": layer index out of range");
    return idx;
}

json sweep_envelope(const SweepResult& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.mean_accuracy.size(); ++i) {
        json row = json::array();
        for (const std::string& v : r.axis_values[i]) row.push_back(v);
        row.push_back(r.mean_accuracy[i]);
        row.push_back(r.std_accuracy[i]);
        rows.push_back(std::move(row));
    }
    json columns = json::array();
    for (const std::string& name : r.axis_names) columns.push_back(name);
    columns.push_back("mean");
    columns.push_back("std");
    return json{{"columns", std::move(columns)},
                {"rows", std::move(rows)},
                {"n_mc", r.n_mc},
                {"seed", r.seed},
                {"metadata", r.metadata}};
}

// returns the results envelope; artifacts land in out_dir
json dispatch(const json& config, const std::string& experiment, const fs::path& out_dir,
              std::uint64_t seed, const McOptions& opt) {
    // "threads" rides along on every config; model experiments also take
    // "model" and (for weight files) "dataset"
    auto with_common = [&](std::set<std::string> extra, bool with_model = true) {
        extra.insert("threads");
        if (with_model) {
            extra.insert("model");
            extra.insert("dataset");
        }
        return extra;
    };
    auto write_sweep = [&](const SweepResult& r) {
        io::write_file((out_dir / "results.csv").string(), io::sweep_to_csv(r));
        return sweep_envelope(r);
    };

    if (experiment == "exp1") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "model", "sigma_list",
                                      "mode", "n_mc"},
                   with_common({}));
        ModelBundle b = load_model(config);
        return write_sweep(run_exp1(b.model, b.dataset,
                                    get_field<std::vector<double>>(config, "sigma_list", "config"),
                                    parse_uncertainty_mode(get_field<std::string>(config, "mode", "config")),
                                    get_field<std::size_t>(config, "n_mc", "config"), seed, opt));
    }

    if (experiment == "exp2") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "model", "n_mc"},
                   with_common({"sigma_in", "sigma_out", "svg"}));
        ModelBundle b = load_model(config);
        const Exp2Result r = run_exp2(b.model, b.dataset,
                                      get_field_or<double>(config, "sigma_in", "config", 0.1),
                                      get_field_or<double>(config, "sigma_out", "config", 0.05),
                                      get_field<std::size_t>(config, "n_mc", "config"), seed, opt);
        json heatmaps = json::object();
        for (std::size_t i = 0; i < r.heatmaps.size(); ++i) {
            const std::string base = "heatmap_" + r.mesh_labels[i];
            io::write_file((out_dir / (base + ".csv")).string(), io::heatmap_to_csv(r.heatmaps[i]));
            if (get_field_or<bool>(config, "svg", "config", false))
                io::write_file((out_dir / (base + ".svg")).string(),
                               io::heatmap_to_svg(r.heatmaps[i], r.mesh_labels[i]));
            json rows = json::array();
            for (std::size_t rr = 0; rr < r.heatmaps[i].rows(); ++rr) {
                json row = json::array();
                for (std::size_t cc = 0; cc < r.heatmaps[i].cols(); ++cc)
                    row.push_back(r.heatmaps[i].at(rr, cc));
                rows.push_back(std::move(row));
            }
            heatmaps[r.mesh_labels[i]] = std::move(rows);
        }
        // summary CSV: one row per mesh/region
        SweepResult flat;
        flat.axis_names = {"mesh", "region_row", "region_col"};
        flat.n_mc = r.n_mc;
        flat.seed = r.seed;
        for (std::size_t i = 0; i < r.heatmaps.size(); ++i)
            for (std::size_t rr = 0; rr < r.heatmaps[i].rows(); ++rr)
                for (std::size_t cc = 0; cc < r.heatmaps[i].cols(); ++cc) {
                    flat.axis_values.push_back(
                        {r.mesh_labels[i], std::to_string(rr), std::to_string(cc)});
                    flat.mean_accuracy.push_back(r.nominal_accuracy - r.heatmaps[i].at(rr, cc));
                    flat.std_accuracy.push_back(0.0);
                }
        io::write_file((out_dir / "results.csv").string(), io::sweep_to_csv(flat));
        return json{{"nominal_accuracy", r.nominal_accuracy},
                    {"has_partial_regions", r.has_partial_regions},
                    {"heatmaps", std::move(heatmaps)},
                    {"n_mc", r.n_mc},
                    {"seed", r.seed}};
    }

    if (experiment == "exp3") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "model", "sigma_list",
                                      "corr_lens", "mode", "n_mc"},
                   with_common({"radial"}));
        ModelBundle b = load_model(config);
        return write_sweep(run_exp3(
            b.model, b.dataset, get_field<std::vector<double>>(config, "sigma_list", "config"),
            get_field<std::vector<std::size_t>>(config, "corr_lens", "config"),
            get_field_or<bool>(config, "radial", "config", false),
            parse_uncertainty_mode(get_field<std::string>(config, "mode", "config")),
            get_field<std::size_t>(config, "n_mc", "config"), seed, opt));
    }

    if (experiment == "rvd") {
        check_keys(config, "config",
                   {"experiment", "seed", "output_dir", "unitary", "sigma_phs", "sigma_bes", "n_mc"},
                   with_common({}, false));
        const ComplexMatrix u =
            io::matrix_from_json(io::read_file(get_field<std::string>(config, "unitary", "config")));
        const std::vector<double> averages = per_mzi_rvd(
            u, get_field<double>(config, "sigma_phs", "config"),
            get_field<double>(config, "sigma_bes", "config"),
            get_field<std::size_t>(config, "n_mc", "config"), seed, opt);
        const MeshPlan plan = clements_decompose(u);
        SweepResult r;
        r.axis_names = {"mzi", "layer", "top_mode"};
        r.n_mc = get_field<std::size_t>(config, "n_mc", "config");
        r.seed = seed;
        for (std::size_t i = 0; i < averages.size(); ++i) {
            r.axis_values.push_back({std::to_string(i), std::to_string(plan.nodes[i].layer),
                                     std::to_string(plan.nodes[i].top_mode)});
            r.mean_accuracy.push_back(averages[i]);
            r.std_accuracy.push_back(0.0);
        }
        return write_sweep(r);
    }

    if (experiment == "loss") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "model", "mu_il_list",
                                      "sigma_il_list", "n_mc"},
                   with_common({"layer"}));
        ModelBundle b = load_model(config);
        return write_sweep(run_loss_sweep(
            b.model, b.dataset, get_field<std::vector<double>>(config, "mu_il_list", "config"),
            get_field<std::vector<double>>(config, "sigma_il_list", "config"),
            resolve_layer(config, "config", b.model.layers.size()),
            get_field<std::size_t>(config, "n_mc", "config"), seed, opt));
    }

    if (experiment == "quant") {
        check_keys(config, "config",
                   {"experiment", "seed", "output_dir", "model", "modes", "n_bits_list"},
                   with_common({"layer"}));
        ModelBundle b = load_model(config);
        std::vector<QuantMode> modes;
        for (const std::string& name :
             get_field<std::vector<std::string>>(config, "modes", "config"))
            modes.push_back(parse_quant_mode(name, "config.modes"));
        return write_sweep(run_quant_sweep(
            b.model, b.dataset, modes,
            get_field<std::vector<unsigned>>(config, "n_bits_list", "config"),
            resolve_layer(config, "config", b.model.layers.size()), seed));
    }

    if (experiment == "sal" || experiment == "aal") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "model", "p"},
                   with_common({"n_p"}));
        ModelBundle b = load_model(config);
        const ImperfectionParameterSet p = parse_p(config.at("p"), "config.p");
        const std::size_t n_p = get_field_or<std::size_t>(config, "n_p", "config", kDefaultNp);

        const MonteCarloReport sal = simulated_accuracy_loss(b.model, b.dataset, p, n_p, seed, opt);
        SweepResult r;
        r.n_mc = n_p;
        r.seed = seed;
        json extra;
        if (experiment == "sal") {
            r.axis_names = {"metric"};
            r.axis_values = {{"nominal"}, {"mean"}, {"sal"}};
            r.mean_accuracy = {sal.nominal_accuracy, sal.mean_accuracy, sal.sal};
            r.std_accuracy = {0.0, sal.std_accuracy, 0.0};
            extra = json{{"per_run_accuracy", sal.per_run_accuracy}};
        } else {
            const AggregatedLoss terms =
                aggregated_accuracy_loss_terms(b.model, b.dataset, p, n_p, seed, opt);
            r.axis_names = {"term"};
            r.axis_values = {{"sal_phs"}, {"sal_bes"}, {"sal_corr"}, {"sal_il"},
                             {"sal_quant"}, {"aal"}, {"sal"}};
            r.mean_accuracy = {terms.sal_phs, terms.sal_bes, terms.sal_corr, terms.sal_il,
                               terms.sal_quant, terms.total(), sal.sal};
            r.std_accuracy.assign(7, 0.0);
            extra = json{{"aal", terms.total()}, {"sal", sal.sal}};
        }
        json env = write_sweep(r);
        env.update(extra);
        return env;
    }

    if (experiment == "pstar") {
        check_keys(config, "config",
                   {"experiment", "seed", "output_dir", "model", "grids", "alpha_max"},
                   with_common({"n_p", "p_base"}));
        ModelBundle b = load_model(config);
        const json& g = config.at("grids");
        check_keys(g, "config.grids", {"sigma_phs", "sigma_bes", "corr_len", "sigma_il", "n_bits"},
                   {});
        PstarGrids grids;
        grids.sigma_phs = get_field<std::vector<double>>(g, "sigma_phs", "grids");
        grids.sigma_bes = get_field<std::vector<double>>(g, "sigma_bes", "grids");
        grids.corr_len = get_field<std::vector<std::size_t>>(g, "corr_len", "grids");
        grids.sigma_il = get_field<std::vector<double>>(g, "sigma_il", "grids");
        grids.n_bits = get_field<std::vector<unsigned>>(g, "n_bits", "grids");
        for (unsigned bits : grids.n_bits)
            if (bits < 1) throw ConfigError("grids.n_bits: values must be >= 1");
        ImperfectionParameterSet base;
        if (config.contains("p_base")) base = parse_p(config.at("p_base"), "config.p_base");
        const std::vector<PstarPoint> front = search_pstar(
            b.model, b.dataset, grids, get_field<double>(config, "alpha_max", "config"),
            get_field_or<std::size_t>(config, "n_p", "config", kDefaultNp), seed, base, opt);
        SweepResult r;
        r.axis_names = {"sigma_phs", "sigma_bes", "corr_len", "sigma_il", "n_bits"};
        r.n_mc = get_field_or<std::size_t>(config, "n_p", "config", kDefaultNp);
        r.seed = seed;
        char buf[64];
        for (const PstarPoint& pt : front) {
            auto fmt = [&](double v) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                return std::string(buf);
            };
            r.axis_values.push_back({fmt(pt.p.sigma_phs), fmt(pt.p.sigma_bes),
                                     std::to_string(pt.p.corr_len), fmt(pt.p.sigma_il),
                                     std::to_string(pt.p.n_bits)});
            r.mean_accuracy.push_back(pt.sal);
            r.std_accuracy.push_back(0.0);
        }
        return write_sweep(r);
    }

    if (experiment == "toy-train") {
        check_keys(config, "config",
                   {"experiment", "seed", "output_dir", "classes", "steps", "learning_rate"},
                   with_common({}, false));
        const std::size_t classes = get_field<std::size_t>(config, "classes", "config");
        auto [nominal_model, data] = build_toy_classifier(classes);
        const std::vector<std::pair<std::size_t, std::size_t>> shapes = {{classes, classes}};
        const IpnnModel trained = train_finite_difference(
            shapes, data, get_field<std::size_t>(config, "steps", "config"),
            get_field<double>(config, "learning_rate", "config"), seed);
        SweepResult r;
        r.axis_names = {"metric"};
        r.n_mc = 1;
        r.seed = seed;
        r.axis_values = {{"final_loss"}, {"accuracy"}};
        r.mean_accuracy = {cross_entropy(trained, data), evaluate_accuracy(trained, data)};
        r.std_accuracy = {0.0, 0.0};
        return write_sweep(r);
    }

    if (experiment == "decompose") {
        check_keys(config, "config", {"experiment", "seed", "output_dir", "unitary"},
                   with_common({"plan_out"}, false));
        const ComplexMatrix u =
            io::matrix_from_json(io::read_file(get_field<std::string>(config, "unitary", "config")));
        const MeshPlan plan = clements_decompose(u);
        const std::string out_name =
            get_field_or<std::string>(config, "plan_out", "config", "plan.json");
        io::write_file((out_dir / out_name).string(), io::mesh_plan_to_json(plan));
        return json{{"n", plan.n},
                    {"nodes", plan.nodes.size()},
                    {"rvd", rvd(mesh_to_unitary(plan), u)},
                    {"plan", out_name}};
    }

    throw ConfigError("config: unknown experiment '" + experiment + "'");
}

int cmd_run(const std::string& config_path, int threads_flag, bool quiet) {
    json config;
    try {
        config = json::parse(io::read_file(config_path));
    } catch (const json::parse_error& e) {
        std::fprintf(stderr, "error: %s: %s\n", config_path.c_str(), e.what());
        return 2;
    }

    const auto started = std::chrono::steady_clock::now();
    json envelope;
    std::string experiment;
    fs::path out_dir;
    std::uint64_t seed = 0;
    McOptions opt;
    try {
        if (!config.is_object()) throw ConfigError("config: expected a JSON object");
        if (!config.contains("experiment")) throw ConfigError("config: missing field 'experiment'");
        if (!config.contains("seed"))
            throw ConfigError("config: missing field 'seed' (seeds are mandatory)");
        if (!config.contains("output_dir")) throw ConfigError("config: missing field 'output_dir'");
        experiment = get_field<std::string>(config, "experiment", "config");
        seed = get_field<std::uint64_t>(config, "seed", "config");
        out_dir = get_field<std::string>(config, "output_dir", "config");

        opt.threads = threads_flag > 0
                          ? threads_flag
                          : get_field_or<int>(config, "threads", "config", 0);

        fs::create_directories(out_dir);
        envelope = dispatch(config, experiment, out_dir, seed, opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
        json results = {{"format", 1}, {"experiment", experiment}, {"config", config}};
        results.update(envelope);
        io::write_file((out_dir / "results.json").string(), results.dump(2) + "\n");
        const json manifest = {{"format", 1},
                               {"tool_version", kToolVersion},
                               {"experiment", experiment},
                               {"config", config},
                               {"seed", seed},
                               {"threads", opt.threads},
                               {"wall_time_s", wall_s}};
        io::write_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    if (!quiet)
        std::printf("%s: wrote %s (%.2f s)\n", experiment.c_str(), out_dir.string().c_str(),
                    wall_s);
    return 0;
}

int cmd_decompose(const std::string& unitary_path, const std::string& plan_path, bool quiet) {
    ComplexMatrix u;
    try {
        u = io::matrix_from_json(io::read_file(unitary_path));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    try {
        const MeshPlan plan = clements_decompose(u);
        io::write_file(plan_path, io::mesh_plan_to_json(plan));
        if (!quiet)
            std::printf("decomposed %zu x %zu unitary into %zu nodes -> %s\n", u.rows(), u.cols(),
                        plan.nodes.size(), plan_path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

int cmd_verify(const std::string& plan_path, const std::string& unitary_path) {
    MeshPlan plan;
    ComplexMatrix u;
    try {
        plan = io::mesh_plan_from_json(io::read_file(plan_path));
        u = io::matrix_from_json(io::read_file(unitary_path));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    try {
        const ComplexMatrix rebuilt = mesh_to_unitary(plan);
        const double uerr = unitarity_error(rebuilt);
        const double dist = rvd(rebuilt, u);
        std::printf("unitarity_error %.3e\nrvd %.3e\n", uerr, dist);
        return dist < 1e-6 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MZI-mesh photonic neural network imperfection simulator"};
    app.require_subcommand(1);

    int threads = 0;
    bool quiet = false;
    app.add_option("--threads", threads, "worker thread count (0 = all available)")
        ->envname("MZIFORGE_THREADS");
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string config_path, unitary_path, plan_path;

    CLI::App* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* decompose =
        app.add_subcommand("decompose", "decompose a unitary matrix into a mesh plan");
    decompose->add_option("unitary", unitary_path, "unitary matrix file (JSON)")->required();
    decompose->add_option("-o,--output", plan_path, "output plan file")->required();

    CLI::App* verify = app.add_subcommand("verify", "check a mesh plan against a unitary");
    verify->add_option("plan", plan_path, "mesh plan file (JSON)")->required();
    verify->add_option("unitary", unitary_path, "unitary matrix file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run->parsed()) return cmd_run(config_path, threads, quiet);
    if (decompose->parsed()) return cmd_decompose(unitary_path, plan_path, quiet);
    return cmd_verify(plan_path, unitary_path);
}
