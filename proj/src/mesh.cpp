#include "mziforge/mesh.hpp"

#include "mziforge/linalg.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mziforge {

namespace {

constexpr double kRvdEps = 1e-9;

struct NullOp {
    std::size_t mode; // acts on (mode, mode + 1)
    double theta;
    double phi;
};

// (theta, phi) such that right-multiplying u by T^H on (m, m+1) zeroes
// entry (row, m). With den = u[row][m] and num = u[row][m+1], the zero
// condition is den * e^{-i phi} * tan(theta/2) + num = 0.
NullOp solve_right_null(const ComplexMatrix& u, std::size_t row, std::size_t m) {
    const cplx den = u.at(row, m);
    const cplx num = u.at(row, m + 1);
    if (std::abs(den) == 0.0) return {m, std::numbers::pi, 0.0};
    const cplx rho = -num / den;
    return {m, 2.0 * std::atan(std::abs(rho)), -std::arg(rho)};
}

// (theta, phi) such that left-multiplying u by T on (m, m+1) zeroes entry
// (m+1, col): e^{i phi} * cos(theta/2) * num = sin(theta/2) * den with
// num = u[m][col], den = u[m+1][col].
NullOp solve_left_null(const ComplexMatrix& u, std::size_t m, std::size_t col) {
    const cplx num = u.at(m, col);
    const cplx den = u.at(m + 1, col);
    if (std::abs(den) == 0.0) return {m, std::numbers::pi, 0.0};
    const cplx rho = num / den;
    return {m, 2.0 * std::atan(std::abs(rho)), -std::arg(rho)};
}

void apply_right_inverse(ComplexMatrix& u, const NullOp& op) {
    // u <- u * T(theta, phi)^H on columns (m, m+1)
    const ComplexMatrix t = mzi_transfer(PhasePair(op.theta, op.phi));
    const cplx h00 = std::conj(t.at(0, 0)), h01 = std::conj(t.at(1, 0));
    const cplx h10 = std::conj(t.at(0, 1)), h11 = std::conj(t.at(1, 1));
    for (std::size_t i = 0; i < u.rows(); ++i) {
        const cplx a = u.at(i, op.mode), b = u.at(i, op.mode + 1);
        u.at(i, op.mode) = a * h00 + b * h10;
        u.at(i, op.mode + 1) = a * h01 + b * h11;
    }
}

void apply_left(ComplexMatrix& u, const NullOp& op) {
    // u <- T(theta, phi) * u on rows (m, m+1)
    const ComplexMatrix t = mzi_transfer(PhasePair(op.theta, op.phi));
    for (std::size_t j = 0; j < u.cols(); ++j) {
        const cplx a = u.at(op.mode, j), b = u.at(op.mode + 1, j);
        u.at(op.mode, j) = t.at(0, 0) * a + t.at(0, 1) * b;
        u.at(op.mode + 1, j) = t.at(1, 0) * a + t.at(1, 1) * b;
    }
}

// Greedy earliest-layer scheduling. The rectangular construction always
// packs into layers 0 .. n-1 with alternating mode parity.
void assign_layers(MeshPlan& plan) {
    std::vector<std::size_t> avail(plan.n, 0);
    for (MziNode& node : plan.nodes) {
        const std::size_t layer = std::max(avail[node.top_mode], avail[node.top_mode + 1]);
        node.layer = layer;
        avail[node.top_mode] = layer + 1;
        avail[node.top_mode + 1] = layer + 1;
        node.grid_x = 2 * layer;
        node.grid_y = node.top_mode;
    }
}

} // namespace

MeshPlan clements_decompose(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols() || u.rows() < 2)
        throw std::invalid_argument("clements_decompose: need a square matrix with n >= 2");
    const double uerr = unitarity_error(u);
    if (!(uerr <= 1e-8))
        throw std::invalid_argument("clements_decompose: input is not unitary (unitarity error " +
                                    std::to_string(uerr) + ")");

    const std::size_t n = u.rows();
    ComplexMatrix work = u;
    std::vector<NullOp> right_ops;
    std::vector<NullOp> left_ops;

    for (std::size_t diag = 0; diag + 1 < n; ++diag) {
        if (diag % 2 == 0) {
            for (std::size_t j = 0; j <= diag; ++j) {
                const std::size_t row = n - 1 - j;
                const std::size_t col = diag - j;
                const NullOp op = solve_right_null(work, row, col);
                apply_right_inverse(work, op);
                right_ops.push_back(op);
            }
        } else {
            for (std::size_t j = 0; j <= diag; ++j) {
                const std::size_t row = n - 1 - diag + j;
                const std::size_t col = j;
                const NullOp op = solve_left_null(work, row - 1, col);
                apply_left(work, op);
                left_ops.push_back(op);
            }
        }
    }

    // work is now diagonal with unit-modulus entries d_k.
    std::vector<cplx> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = work.at(k, k);

    // Push the diagonal through the left factors:
    // T(theta, phi)^H . diag(d) = diag(d') . T(theta, phi') with
    //   phi'    = arg(d_m / d_{m+1})
    //   d'_m    = -exp(-i (theta + phi)) * d_{m+1}
    //   d'_{m+1}= -exp(-i theta)         * d_{m+1}
    std::vector<NullOp> commuted(left_ops.size());
    for (std::size_t idx = left_ops.size(); idx-- > 0;) {
        const NullOp& op = left_ops[idx];
        const cplx dm = d[op.mode];
        const cplx dm1 = d[op.mode + 1];
        commuted[idx] = {op.mode, op.theta, std::arg(dm / dm1)};
        d[op.mode] = -std::polar(1.0, -(op.theta + op.phi)) * dm1;
        d[op.mode + 1] = -std::polar(1.0, -op.theta) * dm1;
    }

    MeshPlan plan;
    plan.n = n;
    plan.nodes.reserve(right_ops.size() + commuted.size());
    for (const NullOp& op : right_ops) {
        MziNode node;
        node.top_mode = op.mode;
        node.phases = PhasePair(op.theta, op.phi);
        plan.nodes.push_back(node);
    }
    for (std::size_t idx = commuted.size(); idx-- > 0;) {
        MziNode node;
        node.top_mode = commuted[idx].mode;
        node.phases = PhasePair(commuted[idx].theta, commuted[idx].phi);
        plan.nodes.push_back(node);
    }
    assign_layers(plan);

    plan.phase_screen.resize(n);
    for (std::size_t k = 0; k < n; ++k) plan.phase_screen[k] = std::arg(d[k]);

    const ComplexMatrix rebuilt = mesh_to_unitary(plan);
    const double err = (rebuilt - u).frobenius_norm();
    if (!(err <= tol))
        throw std::runtime_error("clements_decompose: reconstruction error " + std::to_string(err) +
                                 " exceeds tolerance");
    return plan;
}

ComplexMatrix mesh_to_unitary(const MeshPlan& plan) {
    ComplexMatrix acc = ComplexMatrix::identity(plan.n);
    for (const MziNode& node : plan.nodes) {
        const ComplexMatrix t = mzi_transfer(node.phases, node.splitters, node.loss);
        const std::size_t m = node.top_mode;
        for (std::size_t j = 0; j < plan.n; ++j) {
            const cplx a = acc.at(m, j), b = acc.at(m + 1, j);
            acc.at(m, j) = t.at(0, 0) * a + t.at(0, 1) * b;
            acc.at(m + 1, j) = t.at(1, 0) * a + t.at(1, 1) * b;
        }
    }
    for (std::size_t k = 0; k < plan.n; ++k) {
        const double angle = k < plan.phase_screen.size() ? plan.phase_screen[k] : 0.0;
        const cplx ph = std::polar(1.0, angle);
        for (std::size_t j = 0; j < plan.n; ++j) acc.at(k, j) *= ph;
    }
    return acc;
}

std::size_t grid_width(std::size_t n) { return 2 * n; }
std::size_t grid_height(std::size_t n) { return n - 1; }

std::vector<GridPos> grid_layout(std::size_t n) {
    if (n < 2) throw std::invalid_argument("grid_layout: need n >= 2");
    std::vector<GridPos> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t layer = 0; layer < n; ++layer)
        for (std::size_t m = layer % 2; m + 1 < n; m += 2)
            out.push_back({layer, m, 2 * layer, m});
    return out;
}

DiagonalStage diagonal_stage(const std::vector<double>& singular_values) {
    DiagonalStage stage;
    double gain = 0.0;
    for (double v : singular_values) {
        if (v < 0.0)
            throw std::invalid_argument("diagonal_stage: negative singular value");
        gain = std::max(gain, v);
    }
    if (gain == 0.0) gain = 1.0;
    stage.gain = gain;
    stage.scalars.reserve(singular_values.size());
    for (double v : singular_values) stage.scalars.push_back(v / gain);
    return stage;
}

double attenuator_theta(double scalar) {
    if (scalar < 0.0 || scalar > 1.0)
        throw std::invalid_argument("attenuator_theta: scalar outside [0, 1]");
    return 2.0 * std::asin(scalar);
}

double rvd(const ComplexMatrix& u, const ComplexMatrix& u_ref) {
    if (!u.same_shape(u_ref))
        throw std::invalid_argument("rvd: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
            const double denom = std::abs(u_ref.at(i, j));
            if (denom < kRvdEps) continue;
            acc += std::abs(u.at(i, j) - u_ref.at(i, j)) / denom;
        }
    }
    return acc;
}

} // namespace mziforge
