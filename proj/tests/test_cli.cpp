#include <doctest.h>

#include "helpers.hpp"
#include "mziforge/io.hpp"
#include "mziforge/mesh.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// End-to-end checks of the built binary. The test runner exports
// MZIFORGE_BIN with the executable path.

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mziforge;

namespace {

std::string binary_path() {
    const char* bin = std::getenv("MZIFORGE_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "MZIFORGE_BIN must point at the mziforge binary");
    return bin;
}

int run_cmd(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mziforge_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2);
}

} // namespace

TEST_CASE("cli: exp1 run writes deterministic results") {
    const fs::path dir = fresh_dir("exp1");
    const json config = {{"experiment", "exp1"},
                         {"seed", 7},
                         {"output_dir", (dir / "out").string()},
                         {"model", {{"toy", {{"classes", 4}}}}},
                         {"sigma_list", {0.0, 0.01}},
                         {"mode", "phs"},
                         {"n_mc", 25}};
    write_json(dir / "config.json", config);

    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    const std::string csv = io::read_file((dir / "out" / "results.csv").string());
    CHECK(csv.find("sigma,mean,std,n_mc,seed\n") == 0);
    CHECK(csv.find("\n0,1,0,25,7\n") != std::string::npos); // sigma=0 row is nominal

    // byte-identical re-run
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    CHECK(io::read_file((dir / "out" / "results.csv").string()) == csv);

    // thread count must not change the metrics
    REQUIRE(run_cmd("--threads 1 run " + (dir / "config.json").string()) == 0);
    CHECK(io::read_file((dir / "out" / "results.csv").string()) == csv);

    // manifest echoes a config that reproduces the run
    const json manifest = json::parse(io::read_file((dir / "out" / "manifest.json").string()));
    CHECK(manifest.at("config") == config);
    CHECK(manifest.at("seed") == 7);
    write_json(dir / "echoed.json", manifest.at("config"));
    REQUIRE(run_cmd("run " + (dir / "echoed.json").string()) == 0);
    CHECK(io::read_file((dir / "out" / "results.csv").string()) == csv);
}

TEST_CASE("cli: invalid configs exit with code 2 and a diagnostic") {
    const fs::path dir = fresh_dir("badcfg");

    write_json(dir / "unknown_key.json", {{"experiment", "exp1"},
                                          {"seed", 1},
                                          {"output_dir", (dir / "o").string()},
                                          {"model", {{"toy", {{"classes", 4}}}}},
                                          {"sigma_list", {0.0}},
                                          {"mode", "phs"},
                                          {"n_mc", 2},
                                          {"bogus", 1}});
    CHECK(run_cmd("run " + (dir / "unknown_key.json").string()) == 2);

    write_json(dir / "no_seed.json", {{"experiment", "exp1"},
                                      {"output_dir", (dir / "o").string()},
                                      {"model", {{"toy", {{"classes", 4}}}}},
                                      {"sigma_list", {0.0}},
                                      {"mode", "phs"},
                                      {"n_mc", 2}});
    CHECK(run_cmd("run " + (dir / "no_seed.json").string()) == 2);

    write_json(dir / "bad_mode.json", {{"experiment", "exp1"},
                                       {"seed", 1},
                                       {"output_dir", (dir / "o").string()},
                                       {"model", {{"toy", {{"classes", 4}}}}},
                                       {"sigma_list", {0.0}},
                                       {"mode", "sideways"},
                                       {"n_mc", 2}});
    CHECK(run_cmd("run " + (dir / "bad_mode.json").string()) == 1); // library-level error

    io::write_file((dir / "not_json.json").string(), "this is not json{");
    CHECK(run_cmd("run " + (dir / "not_json.json").string()) == 2);

    CHECK(run_cmd("run " + (dir / "missing_file.json").string()) != 0);
}

TEST_CASE("cli: decompose and verify round trip") {
    const fs::path dir = fresh_dir("roundtrip");
    RngStream rng(5, 0);
    const ComplexMatrix u = testutil::random_unitary(8, rng);
    io::write_file((dir / "unitary.json").string(), io::matrix_to_json(u));

    REQUIRE(run_cmd("decompose " + (dir / "unitary.json").string() + " -o " +
                    (dir / "plan.json").string()) == 0);
    CHECK(run_cmd("verify " + (dir / "plan.json").string() + " " +
                  (dir / "unitary.json").string()) == 0);

    // corrupt one theta: nonzero RVD, exit 1
    json plan = json::parse(io::read_file((dir / "plan.json").string()));
    plan["nodes"][3]["theta"] = plan["nodes"][3]["theta"].get<double>() + 0.5;
    write_json(dir / "corrupt.json", plan);
    CHECK(run_cmd("verify " + (dir / "corrupt.json").string() + " " +
                  (dir / "unitary.json").string()) == 1);

    // unreadable plan: exit 2
    io::write_file((dir / "broken.json").string(), "{");
    CHECK(run_cmd("verify " + (dir / "broken.json").string() + " " +
                  (dir / "unitary.json").string()) == 2);

    // identity plan against the identity matrix
    const MeshPlan ident = clements_decompose(ComplexMatrix::identity(4));
    io::write_file((dir / "ident_plan.json").string(), io::mesh_plan_to_json(ident));
    io::write_file((dir / "ident.json").string(),
                   io::matrix_to_json(ComplexMatrix::identity(4)));
    CHECK(run_cmd("verify " + (dir / "ident_plan.json").string() + " " +
                  (dir / "ident.json").string()) == 0);
}

TEST_CASE("cli: decompose rejects a non-unitary input") {
    const fs::path dir = fresh_dir("nonunitary");
    io::write_file((dir / "m.json").string(),
                   io::matrix_to_json(ComplexMatrix::identity(3).scaled(2.0)));
    CHECK(run_cmd("decompose " + (dir / "m.json").string() + " -o " +
                  (dir / "plan.json").string()) == 1);
}

TEST_CASE("cli: run decompose experiment produces a verifiable plan") {
    const fs::path dir = fresh_dir("runDecomp");
    RngStream rng(6, 0);
    io::write_file((dir / "u.json").string(),
                   io::matrix_to_json(testutil::random_unitary(8, rng)));
    write_json(dir / "config.json", {{"experiment", "decompose"},
                                     {"seed", 1},
                                     {"output_dir", (dir / "out").string()},
                                     {"unitary", (dir / "u.json").string()}});
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    CHECK(run_cmd("verify " + (dir / "out" / "plan.json").string() + " " +
                  (dir / "u.json").string()) == 0);
    const json env = json::parse(io::read_file((dir / "out" / "results.json").string()));
    CHECK(env.at("rvd").get<double>() < 1e-6);
}

TEST_CASE("cli: sal experiment on a weight-file model with dataset") {
    const fs::path dir = fresh_dir("sal");
    auto [model, data] = build_toy_classifier(3);
    io::write_file((dir / "w.json").string(),
                   io::weights_to_json({ComplexMatrix::identity(3)}));
    io::write_file((dir / "d.json").string(), io::dataset_to_json(data));
    write_json(dir / "config.json",
               {{"experiment", "sal"},
                {"seed", 11},
                {"output_dir", (dir / "out").string()},
                {"model", {{"weights", (dir / "w.json").string()}}},
                {"dataset", {{"file", (dir / "d.json").string()}}},
                {"p", {{"sigma_phs", 0.02}, {"corr_len", 2}, {"radial", true}}}});
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    const json env = json::parse(io::read_file((dir / "out" / "results.json").string()));
    CHECK(env.at("per_run_accuracy").size() == 10); // default n_p
    const std::string csv = io::read_file((dir / "out" / "results.csv").string());
    CHECK(csv.find("nominal") != std::string::npos);
}

TEST_CASE("cli: exp2 emits heatmap artifacts including SVG on request") {
    const fs::path dir = fresh_dir("exp2");
    write_json(dir / "config.json", {{"experiment", "exp2"},
                                     {"seed", 3},
                                     {"output_dir", (dir / "out").string()},
                                     {"model", {{"toy", {{"classes", 4}}}}},
                                     {"n_mc", 10},
                                     {"svg", true}});
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "heatmap_L0.U.csv"));
    CHECK(fs::exists(dir / "out" / "heatmap_L0.VH.csv"));
    const std::string svg = io::read_file((dir / "out" / "heatmap_L0.U.svg").string());
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<rect") != std::string::npos);
}

TEST_CASE("cli: toy-train experiment reports final loss and accuracy") {
    const fs::path dir = fresh_dir("train");
    write_json(dir / "config.json", {{"experiment", "toy-train"},
                                     {"seed", 4},
                                     {"output_dir", (dir / "out").string()},
                                     {"classes", 2},
                                     {"steps", 8},
                                     {"learning_rate", 0.3}});
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    const std::string csv = io::read_file((dir / "out" / "results.csv").string());
    CHECK(csv.find("final_loss") != std::string::npos);
    CHECK(csv.find("accuracy") != std::string::npos);
}

TEST_CASE("cli: MZIFORGE_THREADS env var feeds the thread option") {
    const fs::path dir = fresh_dir("envthreads");
    const json config = {{"experiment", "exp1"},
                         {"seed", 5},
                         {"output_dir", (dir / "out").string()},
                         {"model", {{"toy", {{"classes", 4}}}}},
                         {"sigma_list", {0.0, 0.02}},
                         {"mode", "both"},
                         {"n_mc", 20}};
    write_json(dir / "config.json", config);
    REQUIRE(run_cmd("run " + (dir / "config.json").string()) == 0);
    const std::string baseline = io::read_file((dir / "out" / "results.csv").string());

    const std::string cmd = "MZIFORGE_THREADS=2 " + binary_path() + " run " +
                            (dir / "config.json").string() + " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(io::read_file((dir / "out" / "results.csv").string()) == baseline);
}

TEST_CASE("cli: shipped sample configs stay valid") {
    const char* src = std::getenv("MZIFORGE_SRC");
    REQUIRE_MESSAGE(src != nullptr, "MZIFORGE_SRC must point at the source tree");
    const fs::path dir = fresh_dir("samples");
    json config = json::parse(io::read_file((fs::path(src) / "configs/sal_toy.json").string()));
    config["output_dir"] = (dir / "out").string();
    config["n_p"] = 4; // keep the smoke test quick
    write_json(dir / "config.json", config);
    CHECK(run_cmd("run " + (dir / "config.json").string()) == 0);
}

TEST_CASE("cli: remaining experiment ids dispatch end to end") {
    const fs::path dir = fresh_dir("allids");
    RngStream rng(9, 0);
    io::write_file((dir / "u.json").string(),
                   io::matrix_to_json(testutil::random_unitary(5, rng)));

    const json exp3 = {{"experiment", "exp3"},
                       {"seed", 2},
                       {"output_dir", (dir / "exp3").string()},
                       {"model", {{"toy", {{"classes", 4}}}}},
                       {"sigma_list", {0.02}},
                       {"corr_lens", {1, 2}},
                       {"radial", true},
                       {"mode", "both"},
                       {"n_mc", 10}};
    const json rvd_cfg = {{"experiment", "rvd"},
                          {"seed", 2},
                          {"output_dir", (dir / "rvd").string()},
                          {"unitary", (dir / "u.json").string()},
                          {"sigma_phs", 0.05},
                          {"sigma_bes", 0.05},
                          {"n_mc", 20}};
    const json loss = {{"experiment", "loss"},
                       {"seed", 2},
                       {"output_dir", (dir / "loss").string()},
                       {"model", {{"toy", {{"classes", 4}, {"layers", 2}}}}},
                       {"mu_il_list", {0.0, 3.0}},
                       {"sigma_il_list", {0.5}},
                       {"layer", 0},
                       {"n_mc", 10}};
    const json quant = {{"experiment", "quant"},
                        {"seed", 2},
                        {"output_dir", (dir / "quant").string()},
                        {"model", {{"toy", {{"classes", 4}}}}},
                        {"modes", {"EVS", "EPS", "KC"}},
                        {"n_bits_list", {2, 8}},
                        {"layer", "all"}};
    const json aal = {{"experiment", "aal"},
                      {"seed", 2},
                      {"output_dir", (dir / "aal").string()},
                      {"model", {{"toy", {{"classes", 4}}}}},
                      {"p", {{"sigma_phs", 0.03}, {"n_bits", 4}}},
                      {"n_p", 5}};
    const json pstar = {{"experiment", "pstar"},
                        {"seed", 2},
                        {"output_dir", (dir / "pstar").string()},
                        {"model", {{"toy", {{"classes", 4}}}}},
                        {"grids",
                         {{"sigma_phs", {0.0, 0.01}},
                          {"sigma_bes", {0.0}},
                          {"corr_len", {1}},
                          {"sigma_il", {0.0}},
                          {"n_bits", {8}}}},
                        {"alpha_max", 0.2},
                        {"n_p", 5}};

    int idx = 0;
    for (const json& config : {exp3, rvd_cfg, loss, quant, aal, pstar}) {
        const fs::path path = dir / ("cfg" + std::to_string(idx++) + ".json");
        write_json(path, config);
        CAPTURE(config.at("experiment").get<std::string>());
        CHECK(run_cmd("run " + path.string()) == 0);
        CHECK(fs::exists(fs::path(config.at("output_dir").get<std::string>()) / "results.csv"));
        CHECK(fs::exists(fs::path(config.at("output_dir").get<std::string>()) / "manifest.json"));
    }

    // rvd must reject a stray model key
    json bad = rvd_cfg;
    bad["model"] = {{"toy", {{"classes", 4}}}};
    write_json(dir / "bad.json", bad);
    CHECK(run_cmd("run " + (dir / "bad.json").string()) == 2);
}
