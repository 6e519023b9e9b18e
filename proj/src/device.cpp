#include "mziforge/device.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mziforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y -= kTwoPi; // the += above can round up to exactly 2*pi
    return y;
}

ComplexMatrix top_arm_phase(double angle) {
    ComplexMatrix m(2, 2);
    m.at(0, 0) = std::polar(1.0, angle);
    m.at(1, 1) = 1.0;
    return m;
}

// Splitter with per-input-arm attenuation folded in:
// [[r, i t], [i t, r]] * diag(beta_top, beta_bottom).
ComplexMatrix lossy_splitter(double r, double t, double beta_top, double beta_bottom) {
    ComplexMatrix m(2, 2);
    m.at(0, 0) = r * beta_top;
    m.at(0, 1) = cplx(0.0, t * beta_bottom);
    m.at(1, 0) = cplx(0.0, t * beta_top);
    m.at(1, 1) = r * beta_bottom;
    return m;
}

} // namespace

PhasePair::PhasePair(double theta_rad, double phi_rad)
    : theta(wrap_two_pi(theta_rad)), phi(wrap_two_pi(phi_rad)) {}

SplitterQuad SplitterQuad::ideal() {
    const double v = 1.0 / std::numbers::sqrt2;
    return {v, v, v, v};
}

PhaseShifterSpec PhaseShifterSpec::defaults() {
    PhaseShifterSpec s;
    s.v_pi = 4.36;
    s.k = std::numbers::pi / (s.v_pi * s.v_pi);
    s.v_max = 6.166;
    return s;
}

ComplexMatrix mzi_transfer(double theta, double phi, const SplitterQuad& sp, const ArmLoss& loss) {
    const ComplexMatrix stage_phi = top_arm_phase(phi);
    const ComplexMatrix in_split = lossy_splitter(sp.r, sp.t, loss.beta_lt, loss.beta_lb);
    const ComplexMatrix stage_theta = top_arm_phase(theta);
    const ComplexMatrix out_split = lossy_splitter(sp.r2, sp.t2, loss.beta_rt, loss.beta_rb);
    return out_split * (stage_theta * (in_split * stage_phi));
}

ComplexMatrix mzi_transfer(const PhasePair& phases, const SplitterQuad& sp, const ArmLoss& loss) {
    return mzi_transfer(phases.theta, phases.phi, sp, loss);
}

ComplexMatrix mzi_transfer(const PhasePair& phases) {
    return mzi_transfer(phases.theta, phases.phi, SplitterQuad::ideal(), ArmLoss::lossless());
}

ComplexMatrix mzi_first_order_delta(const PhasePair& phases, double d_theta, double d_phi) {
    const cplx i{0.0, 1.0};
    const cplx e_t = std::polar(1.0, phases.theta);
    const cplx e_p = std::polar(1.0, phases.phi);
    const cplx e_tp = e_t * e_p;

    ComplexMatrix out(2, 2);
    // d/dtheta term
    out.at(0, 0) = 0.5 * i * e_tp * d_theta;
    out.at(0, 1) = -0.5 * e_t * d_theta;
    out.at(1, 0) = -0.5 * e_tp * d_theta;
    out.at(1, 1) = -0.5 * i * e_t * d_theta;
    // d/dphi term
    out.at(0, 0) += 0.5 * i * e_p * (e_t - 1.0) * d_phi;
    out.at(1, 0) += -0.5 * e_p * (e_t + 1.0) * d_phi;
    return out;
}

double phase_from_voltage(double v, const PhaseShifterSpec& spec) {
    if (!(v >= 0.0 && v <= spec.v_max))
        throw std::out_of_range("phase_from_voltage: voltage outside [0, v_max]");
    return spec.k * v * v;
}

double voltage_from_phase(double phi, const PhaseShifterSpec& spec) {
    if (!(phi >= 0.0 && phi <= kTwoPi))
        throw std::out_of_range("voltage_from_phase: phase outside [0, 2*pi]");
    return std::sqrt(phi / spec.k);
}

DeviationGrids relative_deviation_grid(double k_factor, const std::vector<double>& theta_grid,
                                       const std::vector<double>& phi_grid) {
    const std::size_t nt = theta_grid.size();
    const std::size_t np = phi_grid.size();
    DeviationGrids g{RealMatrix(nt, np), RealMatrix(nt, np), RealMatrix(nt, np), RealMatrix(nt, np)};
    static const char* entry_names[4] = {"T11", "T12", "T21", "T22"};

    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t ip = 0; ip < np; ++ip) {
            const PhasePair p(theta_grid[it], phi_grid[ip]);
            const ComplexMatrix t = mzi_transfer(p);
            const ComplexMatrix dt =
                mzi_first_order_delta(p, k_factor * theta_grid[it], k_factor * phi_grid[ip]);
            RealMatrix* grids[4] = {&g.t11, &g.t12, &g.t21, &g.t22};
            for (int e = 0; e < 4; ++e) {
                const std::size_t r = static_cast<std::size_t>(e) / 2;
                const std::size_t c = static_cast<std::size_t>(e) % 2;
                const double denom = std::abs(t.at(r, c));
                if (denom < 1e-12)
                    throw std::domain_error(std::string("relative_deviation_grid: nominal ") +
                                            entry_names[e] + " vanishes at grid point (theta=" +
                                            std::to_string(theta_grid[it]) +
                                            ", phi=" + std::to_string(phi_grid[ip]) + ")");
                grids[e]->at(it, ip) = std::abs(dt.at(r, c)) / denom;
            }
        }
    }
    return g;
}

} // namespace mziforge
