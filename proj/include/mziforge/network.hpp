#pragma once

#include "mziforge/linalg.hpp"
#include "mziforge/mesh.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mziforge {

/// One linear layer W = U * Sigma * V^H realized as two meshes and a
/// gained diagonal stage.
struct LinearLayer {
    MeshPlan u_mesh;
    DiagonalStage diag;
    MeshPlan v_h_mesh;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

/// Feed-forward coherent model: modulus-softplus between layers,
/// modulus-squared detection plus log-softmax after the last one.
struct IpnnModel {
    std::vector<LinearLayer> layers;
};

struct Dataset {
    std::size_t dim = 0;
    std::size_t class_count = 0;
    std::vector<std::vector<cplx>> samples;
    std::vector<std::size_t> labels;
};

/// Central crop of the shifted 2-D spectrum, flattened row-major into a
/// crop x crop complex feature vector. crop must be even and fit the
/// image.
std::vector<cplx> extract_features(const RealMatrix& image, std::size_t crop);

/// SVD every weight, mesh the unitary factors, stage the singular
/// values. Layer dimensions must chain.
IpnnModel build_model(const std::vector<ComplexMatrix>& weights);

/// Modulus-softplus activation: softplus(|y|) * y / |y|, and ln 2 (real)
/// at exactly zero, the continuous limit.
cplx modulus_softplus(cplx y);

/// Log-probability vector for one input.
std::vector<double> forward(const IpnnModel& model, const std::vector<cplx>& x);

/// Fraction of samples whose argmax log-probability matches the label.
double evaluate_accuracy(const IpnnModel& model, const Dataset& dataset);

/// Meshes precomputed into plain matrices for repeated inference.
struct CompiledLayer {
    ComplexMatrix u;
    ComplexMatrix v_h;
    std::vector<double> scalars;
    double gain = 1.0;
    std::size_t in_dim = 0, out_dim = 0;
};
struct CompiledModel {
    std::vector<CompiledLayer> layers;
};
CompiledModel compile(const IpnnModel& model);
std::vector<double> forward(const CompiledModel& model, const std::vector<cplx>& x);
double evaluate_accuracy(const CompiledModel& model, const Dataset& dataset);

/// Desk-scale stand-in classifier: one n x n identity-weight layer and
/// the n basis vectors scaled to modulus 3, labeled 0..n-1. Nominal
/// accuracy is exactly 1.
std::pair<IpnnModel, Dataset> build_toy_classifier(std::size_t n_classes);

/// Identity-weight model with the given number of chained n x n layers.
IpnnModel build_toy_model(std::size_t n, std::size_t layer_count);

/// Mean cross-entropy of the model on the dataset.
double cross_entropy(const IpnnModel& model, const Dataset& dataset);

/// Gradient descent on all mesh phases and diagonal scalars using
/// central finite differences (h = 1e-4 rad) with step-halving
/// backtracking, so the final loss never exceeds the initial one.
/// Weights are initialized from the seed; shapes are (out_dim, in_dim)
/// per layer.
IpnnModel train_finite_difference(const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                                  const Dataset& dataset, std::size_t steps, double learning_rate,
                                  std::uint64_t seed);

/// Same optimizer starting from an existing model.
IpnnModel train_finite_difference(IpnnModel model, const Dataset& dataset, std::size_t steps,
                                  double learning_rate);

} // namespace mziforge
