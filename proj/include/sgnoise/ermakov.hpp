#pragma once

#include <array>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/noise_synthesis.hpp"
#include "sgnoise/params.hpp"

namespace sgn {

// Trap-frequency (quadratic) noise enters as w^2(t) = w0^2 + dw2(t). The
// scale factor rho(t) of the time-dependent oscillator obeys the Ermakov
// equation rho'' + w^2(t) rho = w0^2 / rho^3, built from two independent
// solutions y1, y2 of y'' + w^2(t) y = 0 as rho = sqrt(y1^2 + y2^2) for the
// branch that reduces to rho = 1 without noise.

enum class ErmakovMethod { perturbative, ode_oracle };

struct ErmakovSolution {
    std::vector<double> times;
    std::vector<double> rho;
    std::vector<double> rho_dot;
    std::vector<double> delta_rho;  ///< rho - 1
    std::vector<double> y1;
    std::vector<double> y2;
    std::vector<double> y1_dot;
    std::vector<double> y2_dot;
    ErmakovMethod method = ErmakovMethod::ode_oracle;
    double max_residual = 0.0;  ///< Ermakov-equation residual of the integrated rho

    /// y1 y2' - y2 y1'; conserved at w0 along the flow.
    double wronskian(std::size_t k) const {
        return y1[k] * y2_dot[k] - y2[k] * y1_dot[k];
    }
};

/// Leading-order squeeze/shear parameters of the evolving packet.
struct SqueezeParams {
    double delta_rho = 0.0;      ///< dimensionless
    double delta_rho_dot = 0.0;  ///< 1/s
    double t = 0.0;
};

namespace detail {

inline void check_perturbative_amplitude(const PhysParams& p, const NoiseTrace& noise) {
    double peak = 0.0;
    for (double s : noise.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.1 * p.omega0 * p.omega0)
        warn("quadratic noise amplitude exceeds 0.1 w0^2; perturbative solutions degrade");
}

/// Splits an in-range time into whole grid segments plus a partial remainder.
struct SplitTime {
    std::size_t k_full = 0;
    double t_part = 0.0;
};

inline SplitTime split_time(const NoiseTrace& noise, double t, const char* who) {
    if (t < -1e-12 || t > noise.duration() * (1.0 + 1e-12))
        throw config_error(std::string(who) + ": t outside the noise trace");
    SplitTime out;
    out.k_full = std::min<std::size_t>(noise.samples.size() - 1,
                                       static_cast<std::size_t>(std::floor(t / noise.dt + 1e-9)));
    out.t_part = t - noise.dt * double(out.k_full);
    if (out.t_part < 1e-12 * noise.dt || out.k_full + 1 >= noise.samples.size()) out.t_part = 0.0;
    return out;
}

inline double noise_at(const NoiseTrace& noise, double t) {
    const std::size_t k = std::min<std::size_t>(
        noise.samples.size() - 2, static_cast<std::size_t>(std::floor(t / noise.dt)));
    const double frac = t / noise.dt - double(k);
    return noise.samples[k] + frac * (noise.samples[k + 1] - noise.samples[k]);
}

/// Trapezoid of noise(tau) * kernel(tau) over [0, t] with a linearly
/// interpolated partial last segment.
template <typename Kernel>
double convolve_to(const NoiseTrace& noise, double t, const char* who, Kernel&& kernel) {
    const auto split = split_time(noise, t, who);
    double acc = 0.0;
    for (std::size_t k = 1; k < split.k_full; ++k)
        acc += noise.samples[k] * kernel(noise.dt * double(k));
    if (split.k_full >= 1) {
        acc += 0.5 * (noise.samples[0] * kernel(0.0) +
                      noise.samples[split.k_full] * kernel(noise.dt * double(split.k_full)));
        acc *= noise.dt;
    }
    if (split.t_part > 0.0) {
        const double t0 = noise.dt * double(split.k_full);
        acc += 0.5 * (noise.samples[split.k_full] * kernel(t0) + noise_at(noise, t) * kernel(t)) *
               split.t_part;
    }
    return acc;
}

}  // namespace detail

/// First-order solutions of y'' + (w0^2 + dw2(t)) y = 0:
///   y1(t) = cos w0 t - (1/w0) Int dw2(tau) sin(w0 (t - tau)) cos(w0 tau) dtau
///   y2(t) = sin w0 t - (1/w0) Int dw2(tau) sin(w0 (t - tau)) sin(w0 tau) dtau
/// by trapezoid evaluation of the convolutions. Their Wronskian stays w0 at
/// this order.
inline std::pair<double, double> pinney_perturbative(const PhysParams& p, const NoiseTrace& noise,
                                                     double t) {
    detail::check_perturbative_amplitude(p, noise);
    const double w0 = p.omega0;
    const double c1 = detail::convolve_to(noise, t, "pinney_perturbative", [&](double tau) {
        return std::sin(w0 * (t - tau)) * std::cos(w0 * tau);
    });
    const double c2 = detail::convolve_to(noise, t, "pinney_perturbative", [&](double tau) {
        return std::sin(w0 * (t - tau)) * std::sin(w0 * tau);
    });
    return {std::cos(w0 * t) - c1 / w0, std::sin(w0 * t) - c2 / w0};
}

/// Perturbative scale-factor correction and its derivative:
///   drho(t)     = -(1 / 2 w0) Int dw2(tau) sin(2 w0 (t - tau)) dtau
///   drho_dot(t) = -           Int dw2(tau) cos(2 w0 (t - tau)) dtau
inline SqueezeParams ermakov_rho_perturbative(const PhysParams& p, const NoiseTrace& noise,
                                              double t) {
    detail::check_perturbative_amplitude(p, noise);
    const double w0 = p.omega0;
    SqueezeParams out;
    out.delta_rho = -detail::convolve_to(noise, t, "ermakov_rho_perturbative", [&](double tau) {
                        return std::sin(2.0 * w0 * (t - tau));
                    }) /
                    (2.0 * w0);
    out.delta_rho_dot = -detail::convolve_to(noise, t, "ermakov_rho_perturbative", [&](double tau) {
        return std::cos(2.0 * w0 * (t - tau));
    });
    out.t = t;
    return out;
}

/// RK4 integration of the nonlinear Ermakov equation (and of the two Pinney
/// solutions alongside, for Wronskian checks) with the unperturbed initial
/// data rho(0) = 1, rho'(0) = 0. Steps on the noise grid; half-step noise is
/// the neighbour average. Aborts if rho approaches the singularity.
inline ErmakovSolution ermakov_ode_oracle(const PhysParams& p, const NoiseTrace& noise,
                                          double t_final, double dt) {
    if (std::abs(dt - noise.dt) > 1e-12 * std::max(dt, noise.dt))
        throw grid_mismatch_error("ermakov_ode_oracle: dt must match the noise grid");
    const auto n_steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (n_steps + 1 > noise.samples.size())
        throw config_error("ermakov_ode_oracle: t_final exceeds the noise trace");

    const double w02 = p.omega0 * p.omega0;
    auto omega2_at = [&](std::size_t k) { return w02 + noise.samples[k]; };

    // state: rho, rho', y1, y1', y2, y2'
    std::array<double, 6> s{1.0, 0.0, 1.0, 0.0, 0.0, p.omega0};
    auto deriv = [&](const std::array<double, 6>& u, double omega2) {
        if (u[0] < 0.1)
            throw numeric_error("ermakov_ode_oracle: rho fell below the 0.1 singularity guard");
        return std::array<double, 6>{u[1], -omega2 * u[0] + w02 / (u[0] * u[0] * u[0]),
                                     u[3], -omega2 * u[2],
                                     u[5], -omega2 * u[4]};
    };

    ErmakovSolution out;
    out.method = ErmakovMethod::ode_oracle;
    auto record = [&](double t) {
        out.times.push_back(t);
        out.rho.push_back(s[0]);
        out.rho_dot.push_back(s[1]);
        out.delta_rho.push_back(s[0] - 1.0);
        out.y1.push_back(s[2]);
        out.y1_dot.push_back(s[3]);
        out.y2.push_back(s[4]);
        out.y2_dot.push_back(s[5]);
    };
    record(0.0);

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double w2_0 = omega2_at(k);
        const double w2_1 = omega2_at(k + 1);
        const double w2_m = 0.5 * (w2_0 + w2_1);

        const auto k1 = deriv(s, w2_0);
        std::array<double, 6> tmp;
        for (int i = 0; i < 6; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
        const auto k2 = deriv(tmp, w2_m);
        for (int i = 0; i < 6; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
        const auto k3 = deriv(tmp, w2_m);
        for (int i = 0; i < 6; ++i) tmp[i] = s[i] + dt * k3[i];
        const auto k4 = deriv(tmp, w2_1);
        for (int i = 0; i < 6; ++i)
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        record(dt * double(k + 1));
    }

    // central-difference residual of the integrated rho against the equation
    double max_res = 0.0;
    for (std::size_t k = 1; k + 1 < out.rho.size(); ++k) {
        const double rdd = (out.rho[k + 1] - 2.0 * out.rho[k] + out.rho[k - 1]) / (dt * dt);
        const double rhs = -omega2_at(k) * out.rho[k] + w02 / std::pow(out.rho[k], 3);
        max_res = std::max(max_res, std::abs(rdd - rhs));
    }
    out.max_residual = max_res;
    return out;
}

}  // namespace sgn
