#include "mziforge/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mziforge::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json matrix_body(const ComplexMatrix& m) {
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            rrow.push_back(m.at(i, j).real());
            irow.push_back(m.at(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_body(const json& j) {
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (re.size() != rows || im.size() != rows)
        throw std::invalid_argument("matrix: row count mismatch");
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (re[i].size() != cols || im[i].size() != cols)
            throw std::invalid_argument("matrix: column count mismatch");
        for (std::size_t jx = 0; jx < cols; ++jx)
            m.at(i, jx) = cplx(re[i][jx].get<double>(), im[i][jx].get<double>());
    }
    if (!m.all_finite()) throw std::invalid_argument("matrix: non-finite entries");
    return m;
}

void require_format_1(const json& j, const char* what) {
    if (!j.contains("format") || j.at("format").get<int>() != 1)
        throw std::invalid_argument(std::string(what) + ": unsupported or missing format field");
}

} // namespace

std::string matrix_to_json(const ComplexMatrix& m) {
    json j = matrix_body(m);
    j["format"] = 1;
    return j.dump(2) + "\n";
}

ComplexMatrix matrix_from_json(const std::string& text) {
    const json j = json::parse(text);
    require_format_1(j, "matrix file");
    return matrix_from_body(j);
}

std::string weights_to_json(const std::vector<ComplexMatrix>& weights) {
    json layers = json::array();
    for (const ComplexMatrix& w : weights) layers.push_back(matrix_body(w));
    return json{{"format", 1}, {"layers", std::move(layers)}}.dump(2) + "\n";
}

std::vector<ComplexMatrix> weights_from_json(const std::string& text) {
    const json j = json::parse(text);
    require_format_1(j, "weight file");
    std::vector<ComplexMatrix> out;
    for (const json& layer : j.at("layers")) out.push_back(matrix_from_body(layer));
    if (out.empty()) throw std::invalid_argument("weight file: no layers");
    return out;
}

std::string dataset_to_json(const Dataset& d) {
    json samples = json::array();
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        json re = json::array(), im = json::array();
        for (const cplx& v : d.samples[i]) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        samples.push_back(
            json{{"re", std::move(re)}, {"im", std::move(im)}, {"label", d.labels[i]}});
    }
    return json{{"format", 1}, {"dim", d.dim}, {"classes", d.class_count},
                {"samples", std::move(samples)}}
               .dump(2) +
           "\n";
}

Dataset dataset_from_json(const std::string& text) {
    const json j = json::parse(text);
    require_format_1(j, "dataset file");
    Dataset d;
    d.dim = j.at("dim").get<std::size_t>();
    d.class_count = j.at("classes").get<std::size_t>();
    for (const json& s : j.at("samples")) {
        const json& re = s.at("re");
        const json& im = s.at("im");
        if (re.size() != d.dim || im.size() != d.dim)
            throw std::invalid_argument("dataset: sample dimension mismatch");
        std::vector<cplx> sample(d.dim);
        for (std::size_t i = 0; i < d.dim; ++i)
            sample[i] = cplx(re[i].get<double>(), im[i].get<double>());
        const std::size_t label = s.at("label").get<std::size_t>();
        if (label >= d.class_count) throw std::invalid_argument("dataset: label out of range");
        d.samples.push_back(std::move(sample));
        d.labels.push_back(label);
    }
    if (d.samples.empty()) throw std::invalid_argument("dataset: no samples");
    return d;
}

std::string mesh_plan_to_json(const MeshPlan& plan) {
    json nodes = json::array();
    for (const MziNode& node : plan.nodes) {
        nodes.push_back(json{{"layer", node.layer},
                             {"top_mode", node.top_mode},
                             {"theta", node.phases.theta},
                             {"phi", node.phases.phi},
                             {"r", node.splitters.r},
                             {"t", node.splitters.t},
                             {"r2", node.splitters.r2},
                             {"t2", node.splitters.t2},
                             {"beta_lt", node.loss.beta_lt},
                             {"beta_lb", node.loss.beta_lb},
                             {"beta_rt", node.loss.beta_rt},
                             {"beta_rb", node.loss.beta_rb}});
    }
    json screen = json::array();
    for (double v : plan.phase_screen) screen.push_back(v);
    return json{{"n", plan.n}, {"nodes", std::move(nodes)}, {"phase_screen", std::move(screen)}}
               .dump(2) +
           "\n";
}

MeshPlan mesh_plan_from_json(const std::string& text) {
    const json j = json::parse(text);
    MeshPlan plan;
    plan.n = j.at("n").get<std::size_t>();
    if (plan.n < 2) throw std::invalid_argument("mesh plan: n must be >= 2");
    for (const json& nj : j.at("nodes")) {
        MziNode node;
        node.layer = nj.at("layer").get<std::size_t>();
        node.top_mode = nj.at("top_mode").get<std::size_t>();
        if (node.top_mode + 1 >= plan.n)
            throw std::invalid_argument("mesh plan: top_mode out of range");
        node.phases = PhasePair(nj.at("theta").get<double>(), nj.at("phi").get<double>());
        node.splitters = {nj.at("r").get<double>(), nj.at("t").get<double>(),
                          nj.at("r2").get<double>(), nj.at("t2").get<double>()};
        node.loss = {nj.at("beta_lt").get<double>(), nj.at("beta_lb").get<double>(),
                     nj.at("beta_rt").get<double>(), nj.at("beta_rb").get<double>()};
        node.grid_x = 2 * node.layer;
        node.grid_y = node.top_mode;
        plan.nodes.push_back(node);
    }
    for (const json& v : j.at("phase_screen")) plan.phase_screen.push_back(v.get<double>());
    if (plan.phase_screen.size() != plan.n)
        throw std::invalid_argument("mesh plan: phase screen length mismatch");
    return plan;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream os;
    for (const std::string& name : result.axis_names) os << name << ',';
    os << "mean,std,n_mc,seed\n";
    for (std::size_t row = 0; row < result.mean_accuracy.size(); ++row) {
        for (const std::string& v : result.axis_values[row]) os << v << ',';
        os << fmt(result.mean_accuracy[row]) << ',' << fmt(result.std_accuracy[row]) << ','
           << result.n_mc << ',' << result.seed << '\n';
    }
    return os.str();
}

std::string heatmap_to_csv(const RealMatrix& grid) {
    std::ostringstream os;
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            if (c) os << ',';
            os << fmt(grid.at(r, c));
        }
        os << '\n';
    }
    return os.str();
}

std::string heatmap_to_svg(const RealMatrix& grid, const std::string& title) {
    double lo = grid.data().empty() ? 0.0 : grid.data()[0];
    double hi = lo;
    for (double v : grid.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    constexpr int cell = 40, margin = 24;
    const std::size_t w = grid.cols() * cell + 2 * margin;
    const std::size_t h = grid.rows() * cell + 2 * margin;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<title>" << title << "</title>\n";
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            // 10-step ramp: step 0 = blue (low) to step 9 = red (high)
            int step = static_cast<int>((grid.at(r, c) - lo) / span * 10.0);
            step = std::min(step, 9);
            const int red = step * 255 / 9;
            const int blue = 255 - red;
            os << "<rect x=\"" << margin + c * cell << "\" y=\"" << margin + r * cell
               << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << red
               << ",0," << blue << ")\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace mziforge::io
