#pragma once

#include <cmath>

#include "sgnoise/core.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/trajectory.hpp"

namespace sgn {

/// Coherent state of one arm: a Gaussian wave packet of fixed (ground-state)
/// width, fully described by its phase-space coordinate and a global phase.
struct GaussianArmState {
    complexd alpha{0.0, 0.0};
    double global_phase = 0.0;  ///< radians
};

/// Evolve a coherent state along a classical arm trajectory up to time t
/// (a grid point). The packet stays coherent:
///
///   alpha(t) = alpha_c(t) + e^{-i w0 t} (beta0 - alpha_c(0))
///
/// and the global phase accumulates the classical action integral of the
/// driven Lagrangian plus the two state-dependent pieces
/// -Im(dAlpha_c beta0^*) and -w0 t / 2.
inline GaussianArmState evolve_coherent(const PhysParams& p, const GaussianArmState& state0,
                                        const ArmTrajectory& traj, double t) {
    if (traj.size() < 2 || traj.drive.size() != traj.size())
        throw config_error("evolve_coherent: trajectory must carry its drive");
    const double dt = traj.dt();
    const double idx = t / dt;
    const auto k_t = static_cast<std::size_t>(std::floor(idx + 0.5));
    if (k_t >= traj.size() || std::abs(idx - double(k_t)) > 1e-6)
        throw config_error("evolve_coherent: t is not on the trajectory grid");

    // action integral of L = m v^2/2 - m w0^2 x^2/2 + m a(t) x along the arm
    std::vector<double> lagrangian(k_t + 1);
    const double w02 = p.omega0 * p.omega0;
    for (std::size_t k = 0; k <= k_t; ++k) {
        lagrangian[k] = 0.5 * p.mass * traj.v[k] * traj.v[k] -
                        0.5 * p.mass * w02 * traj.x[k] * traj.x[k] +
                        p.mass * traj.drive[k] * traj.x[k];
    }
    const double action = trapezoid(lagrangian, dt);

    const complexd alpha_c0 = traj.alpha.front();
    const complexd alpha_ct = traj.alpha[k_t];
    const complexd rot{std::cos(p.omega0 * t), -std::sin(p.omega0 * t)};

    GaussianArmState out;
    out.alpha = alpha_ct + rot * (state0.alpha - alpha_c0);
    out.global_phase = state0.global_phase + action / p.hbar -
                       std::imag((alpha_ct - alpha_c0) * std::conj(state0.alpha)) -
                       0.5 * p.omega0 * t;
    return out;
}

/// Uhlmann fidelity between the ideal arm state and the same state displaced
/// by the noise response: exp(-|dalpha|^2 / 2) for coherent states.
inline double single_arm_fidelity(const GaussianArmState& /*state_ideal*/, complexd delta_alpha) {
    return std::exp(-0.5 * std::norm(delta_alpha));
}

/// Ensemble-averaged suppression of the spatial coherence between x1 and x2:
/// exp(-(m w0 / hbar) sigma_alpha^2 (x1 - x2)^2). Diagonal elements are
/// untouched.
inline double decoherence_factor(const PhysParams& p, double sigma_alpha_sq, double x1,
                                 double x2) {
    if (sigma_alpha_sq < 0.0)
        throw config_error("decoherence_factor: sigma_alpha_sq must be >= 0");
    const double dx = x1 - x2;
    return std::exp(-p.mass * p.omega0 / p.hbar * sigma_alpha_sq * dx * dx);
}

}  // namespace sgn
