#pragma once

#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/noise_synthesis.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/trajectory.hpp"

namespace sgn {

namespace detail {

inline void require_shared_grid(const NoiseTrace& noise, const ArmTrajectory& traj,
                                const char* who) {
    if (noise.samples.size() != traj.size() ||
        std::abs(noise.dt - traj.dt()) > 1e-12 * std::max(noise.dt, traj.dt()))
        throw grid_mismatch_error(std::string(who) + ": noise and trajectory grids differ");
}

}  // namespace detail

/// Phase fluctuation of a single arm, (m/hbar) Integral da(t) x(t) dt.
/// Uses the unperturbed trajectory; the trajectory-fluctuation channel is a
/// total derivative and contributes nothing (see total_derivative_check).
inline double phase_fluctuation_single(const PhysParams& p, const NoiseTrace& noise,
                                       const ArmTrajectory& arm) {
    detail::require_shared_grid(noise, arm, "phase_fluctuation_single");
    std::vector<double> integrand(arm.size());
    for (std::size_t k = 0; k < arm.size(); ++k)
        integrand[k] = noise.samples[k] * arm.x[k];
    return p.mass / p.hbar * trapezoid(integrand, noise.dt);
}

/// Differential phase fluctuation for common noise on both arms,
/// (m/hbar) Integral da(t) (x_plus - x_minus) dt.
inline double delta_phi(const PhysParams& p, const NoiseTrace& noise,
                        const ArmTrajectory& x_plus, const ArmTrajectory& x_minus) {
    detail::require_shared_grid(noise, x_plus, "delta_phi");
    detail::require_shared_grid(noise, x_minus, "delta_phi");
    std::vector<double> integrand(x_plus.size());
    for (std::size_t k = 0; k < x_plus.size(); ++k)
        integrand[k] = noise.samples[k] * (x_plus.x[k] - x_minus.x[k]);
    return p.mass / p.hbar * trapezoid(integrand, noise.dt);
}

/// Phase-space displacement response at time t,
///
///   dalpha(t) = i sqrt(m / 2 hbar w0) e^{-i w0 t} Integral_0^t da(t') e^{i w0 t'} dt'
///
/// by complex trapezoid quadrature. The rotating phases follow the convention
/// of the complex canonical equation for alpha; observable results depend on
/// |dalpha| only.
inline complexd delta_alpha(const PhysParams& p, const NoiseTrace& noise, double t) {
    if (t < -1e-12 || t > noise.duration() * (1.0 + 1e-12))
        throw config_error("delta_alpha: t outside the noise trace");
    const double dt = noise.dt;
    const std::size_t n_full = std::min<std::size_t>(
        noise.samples.size() - 1, static_cast<std::size_t>(std::floor(t / dt + 1e-9)));

    auto integrand = [&](std::size_t k) {
        const double tk = dt * double(k);
        return noise.samples[k] * complexd{std::cos(p.omega0 * tk), std::sin(p.omega0 * tk)};
    };

    complexd acc{0.0, 0.0};
    for (std::size_t k = 1; k < n_full; ++k) acc += integrand(k);
    if (n_full >= 1) {
        acc += 0.5 * (integrand(0) + integrand(n_full));
        acc *= dt;
    }
    const double t_part = t - dt * double(n_full);
    if (t_part > 1e-12 * dt && n_full + 1 < noise.samples.size()) {
        // partial last segment, integrand interpolated linearly
        const complexd f0 = integrand(n_full);
        const complexd f1 = integrand(n_full + 1);
        const complexd ft = f0 + (f1 - f0) * (t_part / dt);
        acc += 0.5 * (f0 + ft) * t_part;
    }

    const complexd rotate{std::cos(p.omega0 * t), -std::sin(p.omega0 * t)};
    return iunit * std::sqrt(p.mass / (2.0 * p.hbar * p.omega0)) * rotate * acc;
}

struct TotalDerivativeCheck {
    double channel_integral = 0.0;  ///< quadrature of m(v dv - w0^2 x dx + a dx)
    double boundary_term = 0.0;     ///< m (v dx) evaluated at the endpoints
    double dominant_scale = 0.0;    ///< max of the individual term magnitudes
};

/// Evaluates both sides of the identity
///   m x' dx' - m w0^2 x dx + m a(t) dx = m d/dt (x' dx)
/// along a perturbed/ideal trajectory pair. Their agreement (to quadrature
/// tolerance) is what licenses computing phase fluctuations from unperturbed
/// trajectories alone.
inline TotalDerivativeCheck total_derivative_check(const PhysParams& p,
                                                   const ArmTrajectory& ideal,
                                                   const ArmTrajectory& perturbed,
                                                   const std::vector<double>& drive) {
    if (!ideal.same_grid(perturbed) || drive.size() != ideal.size())
        throw grid_mismatch_error("total_derivative_check: grids differ");
    const std::size_t n = ideal.size();
    const double w02 = p.omega0 * p.omega0;

    std::vector<double> kinetic(n), potential(n), forcing(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = perturbed.x[k] - ideal.x[k];
        const double dv = perturbed.v[k] - ideal.v[k];
        kinetic[k] = p.mass * ideal.v[k] * dv;
        potential[k] = -p.mass * w02 * ideal.x[k] * dx;
        forcing[k] = p.mass * drive[k] * dx;
    }
    const double dt = ideal.dt();
    const double ik = trapezoid(kinetic, dt);
    const double ip = trapezoid(potential, dt);
    const double ia = trapezoid(forcing, dt);

    TotalDerivativeCheck out;
    out.channel_integral = ik + ip + ia;
    const double dx0 = perturbed.x.front() - ideal.x.front();
    const double dxf = perturbed.x.back() - ideal.x.back();
    out.boundary_term = p.mass * (ideal.v.back() * dxf - ideal.v.front() * dx0);
    out.dominant_scale = std::max({std::abs(ik), std::abs(ip), std::abs(ia), 1e-300});
    return out;
}

}  // namespace sgn
