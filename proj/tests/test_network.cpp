#include <doctest.h>

#include "helpers.hpp"
#include "mziforge/imperfection.hpp"
#include "mziforge/io.hpp"
#include "mziforge/network.hpp"

#include <cmath>
#include <numbers>

using namespace mziforge;
using testutil::random_complex;

namespace {

// Independent forward oracle: plain complex MLP on the raw weight
// matrices, no meshes involved.
std::vector<double> direct_forward(const std::vector<ComplexMatrix>& weights,
                                   const std::vector<cplx>& x) {
    std::vector<cplx> state = x;
    for (std::size_t li = 0; li < weights.size(); ++li) {
        state = weights[li].apply(state);
        if (li + 1 < weights.size())
            for (cplx& v : state) v = modulus_softplus(v);
    }
    std::vector<double> intensities(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) intensities[i] = std::norm(state[i]);
    double peak = intensities[0];
    for (double v : intensities) peak = std::max(peak, v);
    double sum = 0.0;
    for (double v : intensities) sum += std::exp(v - peak);
    std::vector<double> out(intensities.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = intensities[i] - (peak + std::log(sum));
    return out;
}

std::vector<cplx> random_vec(std::size_t n, RngStream& rng) {
    std::vector<cplx> v(n);
    for (cplx& x : v) x = cplx(rng.gaussian(), rng.gaussian());
    return v;
}

} // namespace

TEST_CASE("extract_features: constant image lights only the DC bin") {
    RealMatrix img(28, 28);
    for (double& v : img.data()) v = 1.5;
    const std::vector<cplx> f = extract_features(img, 4);
    REQUIRE(f.size() == 16);
    std::size_t nonzero = 0;
    for (const cplx& v : f)
        if (std::abs(v) > 1e-9) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(std::abs(f[2 * 4 + 2] - cplx(784 * 1.5, 0.0)) < 1e-9); // DC at block center
}

TEST_CASE("extract_features is linear and checks the crop") {
    RngStream rng(61, 0);
    RealMatrix img(28, 28), scaled(28, 28);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        img.data()[i] = rng.gaussian();
        scaled.data()[i] = -2.5 * img.data()[i];
    }
    const auto fa = extract_features(img, 4);
    const auto fb = extract_features(scaled, 4);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(std::abs(fb[i] + 2.5 * fa[i]) < 1e-9);

    CHECK_THROWS_AS(extract_features(img, 3), std::invalid_argument);  // odd
    CHECK_THROWS_AS(extract_features(img, 30), std::invalid_argument); // too large
}

TEST_CASE("build_model: identity weight gives an identity linear stage") {
    const IpnnModel model = build_model({ComplexMatrix::identity(4)});
    const CompiledModel cm = compile(model);
    const ComplexMatrix linear = cm.layers[0].u * cm.layers[0].v_h;
    CHECK((linear - ComplexMatrix::identity(4)).max_abs() < 1e-10);
    CHECK(cm.layers[0].gain == doctest::Approx(1.0));
}

TEST_CASE("build_model: random rectangular weight forwards like the raw matrix") {
    RngStream rng(62, 0);
    const ComplexMatrix w = random_complex(10, 16, rng);
    const IpnnModel model = build_model({w});
    const CompiledModel cm = compile(model);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<cplx> x = random_vec(16, rng);
        const std::vector<cplx> direct = w.apply(x);
        const std::vector<double> got = forward(cm, x);
        std::vector<double> want(direct.size());
        for (std::size_t i = 0; i < direct.size(); ++i) want[i] = std::norm(direct[i]);
        double peak = want[0];
        for (double v : want) peak = std::max(peak, v);
        double sum = 0.0;
        for (double v : want) sum += std::exp(v - peak);
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(std::abs(got[i] - (want[i] - peak - std::log(sum))) < 1e-6);
        }
    }
}

TEST_CASE("build_model accepts the three-layer 16/16/10 architecture") {
    RngStream rng(63, 0);
    const IpnnModel model = build_model({random_complex(16, 16, rng), random_complex(16, 16, rng),
                                         random_complex(10, 16, rng)});
    CHECK(model.layers.size() == 3);
    CHECK(model.layers[2].out_dim == 10);
    CHECK(model.layers[2].u_mesh.n == 10);
    CHECK(model.layers[2].v_h_mesh.n == 16);
    CHECK_THROWS_AS(build_model({ComplexMatrix(3, 3), ComplexMatrix(4, 4)}),
                    std::invalid_argument);
}

TEST_CASE("modulus softplus: continuity at zero and modulus law") {
    CHECK(modulus_softplus(cplx{}) == cplx(std::numbers::ln2, 0.0));
    const cplx tiny = modulus_softplus(cplx(1e-14, 0.0));
    CHECK(std::abs(tiny - cplx(std::numbers::ln2, 0.0)) < 1e-9);
    RngStream rng(64, 0);
    for (int i = 0; i < 100; ++i) {
        const cplx y(rng.gaussian(), rng.gaussian());
        const cplx z = modulus_softplus(y);
        CHECK(std::abs(z) == doctest::Approx(std::log1p(std::exp(std::abs(y)))).epsilon(1e-12));
        // phase preserved
        CHECK(std::abs(std::arg(z) - std::arg(y)) < 1e-12);
    }
}

TEST_CASE("forward: exp of log-probabilities sums to one") {
    RngStream rng(65, 0);
    const IpnnModel model = build_model({random_complex(6, 6, rng), random_complex(6, 6, rng)});
    const CompiledModel cm = compile(model);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> lp = forward(cm, random_vec(6, rng));
        double total = 0.0;
        for (double v : lp) total += std::exp(v);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("forward: single identity layer is logsoftmax of input intensities") {
    const IpnnModel model = build_model({ComplexMatrix::identity(3)});
    const std::vector<cplx> x = {cplx(2.0, 0.0), cplx(0.0, 1.0), cplx(-0.5, 0.5)};
    const std::vector<double> lp = forward(model, x);
    std::vector<double> want = {4.0, 1.0, 0.5};
    double sum = 0.0;
    for (double v : want) sum += std::exp(v);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(lp[i] == doctest::Approx(want[i] - std::log(sum)).epsilon(1e-9));
}

TEST_CASE("forward matches the direct complex MLP oracle on multi-layer models") {
    RngStream rng(66, 0);
    const std::vector<ComplexMatrix> weights = {random_complex(5, 7, rng),
                                                random_complex(6, 5, rng),
                                                random_complex(4, 6, rng)};
    const IpnnModel model = build_model(weights);
    const CompiledModel cm = compile(model);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<cplx> x = random_vec(7, rng);
        const std::vector<double> got = forward(cm, x);
        const std::vector<double> want = direct_forward(weights, x);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-6);
    }
}

TEST_CASE("forward rejects dimension mismatches") {
    const IpnnModel model = build_model({ComplexMatrix::identity(3)});
    CHECK_THROWS_AS(forward(model, std::vector<cplx>(4)), std::invalid_argument);
}

TEST_CASE("evaluate_accuracy: argmax classification") {
    auto [model, data] = build_toy_classifier(4);
    CHECK(evaluate_accuracy(model, data) == 1.0);

    // two-class complement: swapping both labels inverts the score
    auto [model2, data2] = build_toy_classifier(2);
    Dataset swapped = data2;
    std::swap(swapped.labels[0], swapped.labels[1]);
    CHECK(evaluate_accuracy(model2, data2) + evaluate_accuracy(model2, swapped) == 1.0);

    Dataset empty;
    empty.dim = 4;
    empty.class_count = 4;
    CHECK_THROWS_AS(evaluate_accuracy(model, empty), std::invalid_argument);
}

TEST_CASE("random model on random labels scores near chance") {
    RngStream rng(67, 0);
    const IpnnModel model = build_model({random_complex(10, 16, rng)});
    Dataset data;
    data.dim = 16;
    data.class_count = 10;
    for (int i = 0; i < 10000; ++i) {
        data.samples.push_back(random_vec(16, rng));
        data.labels.push_back(static_cast<std::size_t>(rng.uniform() * 10.0));
    }
    const double acc = evaluate_accuracy(model, data);
    CHECK(acc > 0.07);
    CHECK(acc < 0.13);
}

TEST_CASE("toy classifier shapes and invariance under the zero instance") {
    auto [model, data] = build_toy_classifier(2);
    CHECK(data.samples.size() == 2);
    CHECK(data.class_count == 2);
    CHECK(evaluate_accuracy(model, data) == 1.0);

    const ImperfectionInstance inst =
        realize_instance(ImperfectionParameterSet{}, model_shape(model), 3, 0);
    CHECK(evaluate_accuracy(apply_instance(model, inst), data) == 1.0);

    CHECK_THROWS_AS(build_toy_classifier(1), std::invalid_argument);
    CHECK_THROWS_AS(build_toy_classifier(17), std::invalid_argument);
}

TEST_CASE("multi-layer toy model keeps nominal accuracy 1") {
    auto [single, data] = build_toy_classifier(4);
    const IpnnModel model = build_toy_model(4, 3);
    CHECK(model.layers.size() == 3);
    CHECK(evaluate_accuracy(model, data) == 1.0);
}

TEST_CASE("trainer: zero steps returns the model unchanged") {
    auto [model, data] = build_toy_classifier(3);
    const IpnnModel out = train_finite_difference(model, data, 0, 0.1);
    CHECK((mesh_to_unitary(out.layers[0].u_mesh) - mesh_to_unitary(model.layers[0].u_mesh))
              .max_abs() == 0.0);
}

TEST_CASE("trainer: loss never increases") {
    RngStream rng(68, 0);
    Dataset data;
    data.dim = 4;
    data.class_count = 2;
    for (int i = 0; i < 12; ++i) {
        data.samples.push_back(random_vec(4, rng));
        data.labels.push_back(i % 2);
    }
    const IpnnModel start = build_model({random_complex(2, 4, rng)});
    const double before = cross_entropy(start, data);
    const IpnnModel trained = train_finite_difference(start, data, 15, 0.2);
    CHECK(cross_entropy(trained, data) <= before);
}

TEST_CASE("trainer separates a modulus-separable toy problem") {
    // class by which half of the vector carries the energy
    RngStream rng(69, 0);
    Dataset data;
    data.dim = 4;
    data.class_count = 2;
    for (int i = 0; i < 16; ++i) {
        std::vector<cplx> v(4);
        const bool hi = i % 2 == 1;
        for (std::size_t j = 0; j < 4; ++j) {
            const double mag = (hi == (j >= 2)) ? 2.0 + 0.3 * rng.uniform() : 0.15 * rng.uniform();
            v[j] = std::polar(mag, 2.0 * std::numbers::pi * rng.uniform());
        }
        data.samples.push_back(std::move(v));
        data.labels.push_back(hi ? 1 : 0);
    }
    const IpnnModel trained = train_finite_difference({{2, 4}}, data, 150, 0.5, 7);
    CHECK(evaluate_accuracy(trained, data) >= 0.95);
}

TEST_CASE("finite differences converge at second order") {
    RngStream rng(70, 0);
    Dataset data;
    data.dim = 3;
    data.class_count = 3;
    for (int i = 0; i < 6; ++i) {
        data.samples.push_back(random_vec(3, rng));
        data.labels.push_back(i % 3);
    }
    IpnnModel model = build_model({random_complex(3, 3, rng)});
    double* param = &model.layers[0].u_mesh.nodes[0].phases.theta;

    auto directional = [&](double h) {
        const double saved = *param;
        *param = saved + h;
        const double up = cross_entropy(model, data);
        *param = saved - h;
        const double down = cross_entropy(model, data);
        *param = saved;
        return (up - down) / (2.0 * h);
    };
    const double g1 = directional(1e-3);
    const double g2 = directional(5e-4);
    const double g3 = directional(2.5e-4);
    const double ratio = std::abs(g1 - g2) / std::abs(g2 - g3);
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("weight and dataset files round trip") {
    RngStream rng(71, 0);
    const std::vector<ComplexMatrix> weights = {random_complex(3, 4, rng),
                                                random_complex(2, 3, rng)};
    const std::vector<ComplexMatrix> wback = io::weights_from_json(io::weights_to_json(weights));
    REQUIRE(wback.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK((wback[i] - weights[i]).max_abs() == 0.0);

    auto [model, data] = build_toy_classifier(3);
    const Dataset dback = io::dataset_from_json(io::dataset_to_json(data));
    CHECK(dback.dim == data.dim);
    CHECK(dback.class_count == data.class_count);
    CHECK(dback.labels == data.labels);
    CHECK(dback.samples == data.samples);

    CHECK_THROWS(io::dataset_from_json("{\"format\": 2}"));
    CHECK_THROWS(io::weights_from_json("not json"));
}

TEST_CASE("log-softmax never moves the argmax of the intensities") {
    RngStream rng(72, 0);
    const IpnnModel model = build_model({random_complex(5, 5, rng)});
    const CompiledModel cm = compile(model);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cplx> x(5);
        for (auto& v : x) v = cplx(rng.gaussian(), rng.gaussian());
        // raw intensities of the linear stage
        std::vector<cplx> y = cm.layers[0].v_h.apply(x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] *= cm.layers[0].scalars[i];
        y = cm.layers[0].u.apply(y);
        std::size_t best_raw = 0;
        for (std::size_t i = 1; i < y.size(); ++i)
            if (std::norm(y[i]) > std::norm(y[best_raw])) best_raw = i;

        const std::vector<double> lp = forward(cm, x);
        std::size_t best_lp = 0;
        for (std::size_t i = 1; i < lp.size(); ++i)
            if (lp[i] > lp[best_lp]) best_lp = i;
        CHECK(best_raw == best_lp);
    }
}
