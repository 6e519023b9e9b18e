#pragma once

#include "mziforge/matrix.hpp"

#include <vector>

namespace mziforge {

/// Tuned phase pair of one interferometer. Values are wrapped into
/// [0, 2*pi) at construction; perturbed evaluation goes through the raw
/// mzi_transfer overload, where wrapping is irrelevant anyway.
struct PhasePair {
    double theta = 0.0;
    double phi = 0.0;

    PhasePair() = default;
    PhasePair(double theta_rad, double phi_rad);
};

/// Amplitude reflectance/transmittance of the two splitters of an MZI.
/// r, t belong to the input-side splitter, r2, t2 to the output-side one.
/// Deviated values are clamped to [0, 1]; r^2 + t^2 = 1 is deliberately
/// not enforced, matching independent per-parameter sampling.
struct SplitterQuad {
    double r, t, r2, t2;

    static SplitterQuad ideal();
};

/// Per-arm amplitude attenuation factors. lt/lb feed the input splitter
/// (top/bottom), rt/rb feed the output splitter. 1.0 means lossless.
struct ArmLoss {
    double beta_lt = 1.0, beta_lb = 1.0, beta_rt = 1.0, beta_rb = 1.0;

    static ArmLoss lossless() { return {}; }
    static ArmLoss uniform(double beta) { return {beta, beta, beta, beta}; }
};

/// Thermo-optic phase shifter electrical model: phase = k * V^2.
/// Defaults anchor k to the 4.36 V pi-voltage, so k prints as 0.165 and
/// both voltage landmarks are reproduced within a milliradian.
struct PhaseShifterSpec {
    double k;     // rad / V^2
    double v_pi;  // volts for a pi shift
    double v_max; // volts for a 2*pi shift

    static PhaseShifterSpec defaults();
};

/// Full MZI transfer matrix: [lossy output splitter] * [theta on top arm]
/// * [lossy input splitter] * [phi on top arm]. Ideal splitters with unit
/// losses reduce to the textbook closed form; the deviated-splitter and
/// uniform-loss closed forms fall out as special cases (verified in the
/// test suite rather than hard-coded here).
ComplexMatrix mzi_transfer(double theta, double phi, const SplitterQuad& splitters,
                           const ArmLoss& loss);
ComplexMatrix mzi_transfer(const PhasePair& phases, const SplitterQuad& splitters,
                           const ArmLoss& loss);
/// Ideal lossless MZI.
ComplexMatrix mzi_transfer(const PhasePair& phases);

/// First-order deviation dT = (dT/dtheta) * d_theta + (dT/dphi) * d_phi of
/// the ideal MZI transfer matrix.
ComplexMatrix mzi_first_order_delta(const PhasePair& phases, double d_theta, double d_phi);

/// Voltage <-> phase conversion. Inputs outside [0, v_max] / [0, 2*pi]
/// raise std::out_of_range.
double phase_from_voltage(double v, const PhaseShifterSpec& spec);
double voltage_from_phase(double phi, const PhaseShifterSpec& spec);

/// |dT_mn| / |T_mn| for the four MZI matrix entries over a (theta, phi)
/// grid, with d_theta = k_factor * theta and d_phi = k_factor * phi.
/// Grids hitting a point where some nominal |T_mn| < 1e-12 raise
/// std::domain_error naming the entry.
struct DeviationGrids {
    RealMatrix t11, t12, t21, t22; // indexed [theta][phi]
};
DeviationGrids relative_deviation_grid(double k_factor, const std::vector<double>& theta_grid,
                                       const std::vector<double>& phi_grid);

} // namespace mziforge
