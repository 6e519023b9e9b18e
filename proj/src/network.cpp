#include "mziforge/network.hpp"

#include "mziforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mziforge {

namespace {

double softplus(double x) {
    return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

std::vector<double> log_softmax(const std::vector<double>& intensities) {
    double peak = intensities.front();
    for (double v : intensities) peak = std::max(peak, v);
    double sum = 0.0;
    for (double v : intensities) sum += std::exp(v - peak);
    const double lse = peak + std::log(sum);
    std::vector<double> out(intensities.size());
    for (std::size_t i = 0; i < intensities.size(); ++i) out[i] = intensities[i] - lse;
    return out;
}

std::vector<cplx> apply_compiled_layer(const CompiledLayer& layer, const std::vector<cplx>& x) {
    const std::vector<cplx> t = layer.v_h.apply(x);
    std::vector<cplx> staged(layer.out_dim, cplx{});
    const std::size_t mid = std::min(layer.scalars.size(), std::min(layer.in_dim, layer.out_dim));
    for (std::size_t i = 0; i < mid; ++i) staged[i] = layer.scalars[i] * t[i];
    std::vector<cplx> y = layer.u.apply(staged);
    for (cplx& v : y) v *= layer.gain;
    return y;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// Phases and diagonal scalars flattened into one parameter vector.
struct ParamView {
    std::vector<double*> slots;
    std::vector<bool> is_scalar; // scalars get clamped to [0, 1]
};

ParamView collect_params(IpnnModel& model) {
    ParamView view;
    auto add_mesh = [&](MeshPlan& mesh) {
        for (MziNode& node : mesh.nodes) {
            view.slots.push_back(&node.phases.theta);
            view.is_scalar.push_back(false);
            view.slots.push_back(&node.phases.phi);
            view.is_scalar.push_back(false);
        }
        for (double& s : mesh.phase_screen) {
            view.slots.push_back(&s);
            view.is_scalar.push_back(false);
        }
    };
    for (LinearLayer& layer : model.layers) {
        add_mesh(layer.v_h_mesh);
        add_mesh(layer.u_mesh);
        for (double& s : layer.diag.scalars) {
            view.slots.push_back(&s);
            view.is_scalar.push_back(true);
        }
    }
    return view;
}

} // namespace

std::vector<cplx> extract_features(const RealMatrix& image, std::size_t crop) {
    if (crop == 0 || crop % 2 != 0 || crop > image.rows() || crop > image.cols())
        throw std::invalid_argument("extract_features: crop must be even and fit the image");
    const ComplexMatrix spectrum = dft2_shifted(image);
    const std::size_t r0 = image.rows() / 2 - crop / 2;
    const std::size_t c0 = image.cols() / 2 - crop / 2;
    std::vector<cplx> out;
    out.reserve(crop * crop);
    for (std::size_t r = 0; r < crop; ++r)
        for (std::size_t c = 0; c < crop; ++c) out.push_back(spectrum.at(r0 + r, c0 + c));
    return out;
}

IpnnModel build_model(const std::vector<ComplexMatrix>& weights) {
    if (weights.empty())
        throw std::invalid_argument("build_model: need at least one weight matrix");
    for (std::size_t i = 0; i + 1 < weights.size(); ++i)
        if (weights[i].rows() != weights[i + 1].cols())
            throw std::invalid_argument("build_model: layer dimensions do not chain");

    IpnnModel model;
    model.layers.reserve(weights.size());
    for (const ComplexMatrix& w : weights) {
        if (!w.all_finite())
            throw std::invalid_argument("build_model: weight matrix has non-finite entries");
        const SvdResult f = svd(w);
        LinearLayer layer;
        layer.in_dim = w.cols();
        layer.out_dim = w.rows();
        layer.u_mesh = clements_decompose(f.u);
        layer.v_h_mesh = clements_decompose(f.v_h);
        std::vector<double> sv(f.singular_values.begin(),
                               f.singular_values.begin() +
                                   static_cast<std::ptrdiff_t>(std::min(w.rows(), w.cols())));
        layer.diag = diagonal_stage(sv);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

cplx modulus_softplus(cplx y) {
    const double m = std::abs(y);
    if (m == 0.0) return {std::numbers::ln2, 0.0};
    return softplus(m) * (y / m);
}

CompiledModel compile(const IpnnModel& model) {
    CompiledModel out;
    out.layers.reserve(model.layers.size());
    for (const LinearLayer& layer : model.layers) {
        CompiledLayer c;
        c.u = mesh_to_unitary(layer.u_mesh);
        c.v_h = mesh_to_unitary(layer.v_h_mesh);
        c.scalars = layer.diag.scalars;
        c.gain = layer.diag.gain;
        c.in_dim = layer.in_dim;
        c.out_dim = layer.out_dim;
        out.layers.push_back(std::move(c));
    }
    return out;
}

std::vector<double> forward(const CompiledModel& model, const std::vector<cplx>& x) {
    if (model.layers.empty())
        throw std::invalid_argument("forward: model has no layers");
    if (x.size() != model.layers.front().in_dim)
        throw std::invalid_argument("forward: input dimension mismatch");
    std::vector<cplx> state = x;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        state = apply_compiled_layer(model.layers[li], state);
        if (li + 1 < model.layers.size())
            for (cplx& v : state) v = modulus_softplus(v);
    }
    std::vector<double> intensities(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) intensities[i] = std::norm(state[i]);
    return log_softmax(intensities);
}

std::vector<double> forward(const IpnnModel& model, const std::vector<cplx>& x) {
    return forward(compile(model), x);
}

double evaluate_accuracy(const CompiledModel& model, const Dataset& dataset) {
    if (dataset.samples.empty())
        throw std::invalid_argument("evaluate_accuracy: empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        if (argmax(forward(model, dataset.samples[i])) == dataset.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(dataset.samples.size());
}

double evaluate_accuracy(const IpnnModel& model, const Dataset& dataset) {
    return evaluate_accuracy(compile(model), dataset);
}

std::pair<IpnnModel, Dataset> build_toy_classifier(std::size_t n_classes) {
    if (n_classes < 2 || n_classes > 16)
        throw std::invalid_argument("build_toy_classifier: class count outside [2, 16]");
    IpnnModel model = build_toy_model(n_classes, 1);
    Dataset data;
    data.dim = n_classes;
    data.class_count = n_classes;
    for (std::size_t k = 0; k < n_classes; ++k) {
        std::vector<cplx> sample(n_classes, cplx{});
        sample[k] = 3.0; // well above the ln 2 floor of the activation
        data.samples.push_back(std::move(sample));
        data.labels.push_back(k);
    }
    return {std::move(model), std::move(data)};
}

IpnnModel build_toy_model(std::size_t n, std::size_t layer_count) {
    if (n < 2 || layer_count < 1)
        throw std::invalid_argument("build_toy_model: need n >= 2 and at least one layer");
    std::vector<ComplexMatrix> weights(layer_count, ComplexMatrix::identity(n));
    return build_model(weights);
}

double cross_entropy(const IpnnModel& model, const Dataset& dataset) {
    if (dataset.samples.empty())
        throw std::invalid_argument("cross_entropy: empty dataset");
    const CompiledModel compiled = compile(model);
    double loss = 0.0;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        loss -= forward(compiled, dataset.samples[i])[dataset.labels[i]];
    return loss / static_cast<double>(dataset.samples.size());
}

IpnnModel train_finite_difference(const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                                  const Dataset& dataset, std::size_t steps, double learning_rate,
                                  std::uint64_t seed) {
    if (shapes.empty())
        throw std::invalid_argument("train_finite_difference: no layer shapes");
    RngStream rng(seed, 0);
    std::vector<ComplexMatrix> weights;
    for (const auto& [out_dim, in_dim] : shapes) {
        ComplexMatrix w(out_dim, in_dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
        for (std::size_t i = 0; i < out_dim; ++i)
            for (std::size_t j = 0; j < in_dim; ++j)
                w.at(i, j) = scale * cplx(rng.gaussian(), rng.gaussian());
        weights.push_back(std::move(w));
    }
    return train_finite_difference(build_model(weights), dataset, steps, learning_rate);
}

IpnnModel train_finite_difference(IpnnModel model, const Dataset& dataset, std::size_t steps,
                                  double learning_rate) {
    constexpr double kDiffStep = 1e-4;
    ParamView view = collect_params(model);
    const std::size_t dim = view.slots.size();
    if (dim > 512)
        throw std::invalid_argument("train_finite_difference: model too large for this trainer");

    double loss = cross_entropy(model, dataset);
    double lr = learning_rate;
    std::vector<double> grad(dim);

    for (std::size_t step = 0; step < steps; ++step) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double saved = *view.slots[i];
            *view.slots[i] = saved + kDiffStep;
            const double up = cross_entropy(model, dataset);
            *view.slots[i] = saved - kDiffStep;
            const double down = cross_entropy(model, dataset);
            *view.slots[i] = saved;
            grad[i] = (up - down) / (2.0 * kDiffStep);
        }

        std::vector<double> saved(dim);
        for (std::size_t i = 0; i < dim; ++i) saved[i] = *view.slots[i];

        bool improved = false;
        for (int attempt = 0; attempt < 25 && !improved; ++attempt) {
            for (std::size_t i = 0; i < dim; ++i) {
                double next = saved[i] - lr * grad[i];
                if (view.is_scalar[i]) next = std::clamp(next, 0.0, 1.0);
                *view.slots[i] = next;
            }
            const double trial = cross_entropy(model, dataset);
            if (trial <= loss) {
                loss = trial;
                improved = true;
                lr *= 1.2;
            } else {
                lr *= 0.5;
            }
        }
        if (!improved) {
            for (std::size_t i = 0; i < dim; ++i) *view.slots[i] = saved[i];
            break; // flat to finite-difference resolution
        }
    }
    return model;
}

} // namespace mziforge
