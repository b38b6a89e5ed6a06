#pragma once

#include <string>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/noise_synthesis.hpp"
#include "sgnoise/params.hpp"

namespace sgn {

enum class DriveLabel { plus, minus };

/// Classical trajectory of one interferometer arm on a uniform grid, with the
/// complex phase-space coordinate alpha = sqrt(m w0 / 2 hbar)(x + i v / w0)
/// kept consistent with (x, v) at every sample.
struct ArmTrajectory {
    std::vector<double> times;
    std::vector<double> x;      ///< m
    std::vector<double> v;      ///< m/s
    std::vector<complexd> alpha;
    std::vector<double> drive;  ///< acceleration a(t) that produced the arm, m/s^2
    DriveLabel drive_label = DriveLabel::plus;

    std::size_t size() const { return times.size(); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    double final_time() const { return times.empty() ? 0.0 : times.back(); }

    bool same_grid(const ArmTrajectory& other) const {
        return times.size() == other.times.size() &&
               (times.empty() || (std::abs(times.back() - other.times.back()) <=
                                  1e-12 * std::max(1.0, std::abs(times.back()))));
    }
};

namespace detail {

inline void fill_alpha(const PhysParams& p, ArmTrajectory& traj) {
    const double c = p.alpha_per_position();
    traj.alpha.resize(traj.x.size());
    for (std::size_t k = 0; k < traj.x.size(); ++k)
        traj.alpha[k] = c * complexd{traj.x[k], traj.v[k] / p.omega0};
}

}  // namespace detail

/// Unperturbed arms under a constant magnetic gradient,
/// x_pm(t) = A_pm (1 - cos w0 t), evaluated in closed form.
inline std::pair<ArmTrajectory, ArmTrajectory> ideal_trajectories(const PhysParams& p,
                                                                  double t_final, double dt) {
    p.validate();
    if (!(t_final > 0.0) || !(dt > 0.0))
        throw config_error("ideal_trajectories: t_final and dt must be positive");
    const std::size_t n = static_cast<std::size_t>(std::floor(t_final / dt + 0.5)) + 1;

    auto build = [&](double amplitude, DriveLabel label) {
        ArmTrajectory traj;
        traj.drive_label = label;
        traj.times.resize(n);
        traj.x.resize(n);
        traj.v.resize(n);
        traj.drive.resize(n);
        const double w0 = p.omega0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = dt * double(k);
            traj.times[k] = t;
            traj.x[k] = amplitude * (1.0 - std::cos(w0 * t));
            traj.v[k] = amplitude * w0 * std::sin(w0 * t);
            traj.drive[k] = amplitude * w0 * w0;
        }
        detail::fill_alpha(p, traj);
        return traj;
    };
    return {build(p.amplitude_plus(), DriveLabel::plus),
            build(p.amplitude_minus(), DriveLabel::minus)};
}

/// Classical RK4 integration of x'' = -w0^2 x + a(t) + da(t) with fixed step
/// tied to the grid (two half-steps per grid interval). `drive` is a sampled
/// acceleration series; values between samples are linearly interpolated,
/// which is exact for constant and piecewise-linear drives.
inline ArmTrajectory integrate_trajectory(const PhysParams& p, const std::vector<double>& drive,
                                          double dt, const NoiseTrace* noise, double x0,
                                          double v0, DriveLabel label = DriveLabel::plus) {
    p.validate();
    if (drive.size() < 2) throw config_error("integrate_trajectory: drive needs >= 2 samples");
    if (noise && (noise->samples.size() != drive.size() ||
                  std::abs(noise->dt - dt) > 1e-15 * std::max(noise->dt, dt)))
        throw grid_mismatch_error("integrate_trajectory: drive and noise grids differ");

    const std::size_t n = drive.size();
    ArmTrajectory traj;
    traj.drive_label = label;
    traj.times.resize(n);
    traj.x.resize(n);
    traj.v.resize(n);
    traj.drive = drive;

    const double w02 = p.omega0 * p.omega0;
    double x = x0;
    double v = v0;
    traj.times[0] = 0.0;
    traj.x[0] = x;
    traj.v[0] = v;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a0 = drive[k] + (noise ? noise->samples[k] : 0.0);
        const double a1 = drive[k + 1] + (noise ? noise->samples[k + 1] : 0.0);
        auto accel = [a0, a1](double theta) { return a0 + theta * (a1 - a0); };

        auto rk4_substep = [&](double theta0, double h) {
            const double am = accel(theta0 + 0.5 * h / dt);
            const double ae = accel(theta0 + h / dt);
            const double k1x = v;
            const double k1v = -w02 * x + accel(theta0);
            const double k2x = v + 0.5 * h * k1v;
            const double k2v = -w02 * (x + 0.5 * h * k1x) + am;
            const double k3x = v + 0.5 * h * k2v;
            const double k3v = -w02 * (x + 0.5 * h * k2x) + am;
            const double k4x = v + h * k3v;
            const double k4v = -w02 * (x + h * k3x) + ae;
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        };
        rk4_substep(0.0, 0.5 * dt);
        rk4_substep(0.5, 0.5 * dt);

        traj.times[k + 1] = dt * double(k + 1);
        traj.x[k + 1] = x;
        traj.v[k + 1] = v;
    }
    detail::fill_alpha(p, traj);
    return traj;
}

/// Constant-gradient drive series for one arm (a = A w0^2 at every sample).
inline std::vector<double> constant_gradient_drive(const PhysParams& p, double amplitude,
                                                   std::size_t n_samples) {
    return std::vector<double>(n_samples, amplitude * p.omega0 * p.omega0);
}

}  // namespace sgn
