#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sgnoise/core.hpp"
#include "sgnoise/ermakov.hpp"
#include "sgnoise/fft.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/phase.hpp"
#include "sgnoise/quadrature.hpp"
#include "sgnoise/quantum_state.hpp"
#include "sgnoise/trajectory.hpp"
#include "sgnoise/variance.hpp"

namespace sgn {

/// Differential displacement response to quadratic noise at time t:
///
///   dAlpha(t) = -(i/w0) e^{-i w0 t} Int_0^t dw2(tau) Re[dAlpha0(tau)] e^{i w0 tau} dtau
///
/// where Re[dAlpha0(tau)] = sqrt(m w0 / 2 hbar) (x_plus - x_minus)(tau) is the
/// ideal differential trajectory in phase-space units. Quadratic noise needs
/// arm separation to decohere: closed identical arms give zero.
inline complexd delta_alpha_quadratic(const PhysParams& p, const NoiseTrace& noise,
                                      const ArmTrajectory& x_plus, const ArmTrajectory& x_minus,
                                      double t) {
    if (noise.samples.size() != x_plus.size() || !x_plus.same_grid(x_minus))
        throw grid_mismatch_error("delta_alpha_quadratic: grids differ");
    const double w0 = p.omega0;
    const double to_alpha = p.alpha_per_position();

    auto diff_x = [&](std::size_t k) { return x_plus.x[k] - x_minus.x[k]; };
    const double re_part =
        detail::convolve_to(noise, t, "delta_alpha_quadratic", [&](double tau) {
            const auto k = std::min<std::size_t>(
                x_plus.size() - 2, static_cast<std::size_t>(std::floor(tau / noise.dt)));
            const double frac = tau / noise.dt - double(k);
            const double xd = diff_x(k) + frac * (diff_x(k + 1) - diff_x(k));
            return to_alpha * xd * std::cos(w0 * tau);
        });
    const double im_part =
        detail::convolve_to(noise, t, "delta_alpha_quadratic", [&](double tau) {
            const auto k = std::min<std::size_t>(
                x_plus.size() - 2, static_cast<std::size_t>(std::floor(tau / noise.dt)));
            const double frac = tau / noise.dt - double(k);
            const double xd = diff_x(k) + frac * (diff_x(k + 1) - diff_x(k));
            return to_alpha * xd * std::sin(w0 * tau);
        });
    const complexd rotate{std::cos(w0 * t), -std::sin(w0 * t)};
    return -iunit / w0 * rotate * complexd{re_part, im_part};
}

/// Contrast-loss filter for quadratic noise in the constant-gradient scenario,
/// F(W) = (m / 2 hbar w0) F_N(W): the dephasing filter rescaled to phase-space
/// units.
inline double quadratic_contrast_transfer(const PhysParams& p, double omega) {
    return p.mass / (2.0 * p.hbar * p.omega0) * transfer_closed_form_FN(p, omega);
}

/// Same filter from sampled trajectories,
/// F(W) = |(1/w0) Int Re[dAlpha0] e^{i W tau} dtau|^2, for route comparisons.
inline TransferFunction quadratic_transfer_from_trajectories(const PhysParams& p,
                                                             const ArmTrajectory& x_plus,
                                                             const ArmTrajectory& x_minus,
                                                             double w_max,
                                                             std::size_t pad_factor = 32) {
    if (!x_plus.same_grid(x_minus))
        throw grid_mismatch_error("quadratic_transfer_from_trajectories: arm grids differ");
    std::vector<double> re_dalpha0(x_plus.size());
    const double to_alpha = p.alpha_per_position();
    for (std::size_t k = 0; k < re_dalpha0.size(); ++k)
        re_dalpha0[k] = to_alpha * (x_plus.x[k] - x_minus.x[k]);
    const auto ft = finite_time_transform(re_dalpha0, x_plus.dt(), pad_factor);

    TransferFunction out;
    out.provenance = TransferProvenance::higher_order_n;
    for (std::size_t j = 0; j < ft.omegas.size() && ft.omegas[j] <= w_max; ++j) {
        out.omegas.push_back(ft.omegas[j]);
        out.values.push_back(std::norm(ft.values[j]) / (p.omega0 * p.omega0));
    }
    return out;
}

enum class ContrastMode { quadrature, closed_form, monte_carlo };

struct QuadraticMonteCarloOptions {
    std::size_t n_trials = 10000;
    std::uint64_t master_seed = 1;
    double dt = 0.0;  ///< 0 = period / 128
    SynthesisOptions synthesis{};
};

/// -E[log C] for quadratic noise with PSD S_{w2 w2}, in the constant-gradient
/// scenario over N whole periods.
///
///  quadrature  : (1/2) Int S(W) (m / 2 hbar w0) F_N(W - w0) dW. The
///                parametric noise multiplies the differential trajectory, so
///                its frequency mixes with the w0 carrier and the filter the
///                displacement variance sees is the dephasing filter shifted
///                by w0: a noise line at W = w0 drives the static arm
///                separation resonantly. This kernel reproduces the Monte
///                Carlo mean of |dAlpha|^2/2 (see the ensemble tests).
///  closed_form : m N^2 pi^2 (dA)^2 S(w0) / (hbar w0^6)  (resonant
///                approximation, reported alongside the quadrature, never
///                alone)
///  monte_carlo : mean of |dAlpha(t_f)|^2 / 2 over synthesized realizations
inline VarianceReport quadratic_contrast(const PhysParams& p, const Psd& psd_omega2,
                                         ContrastMode mode,
                                         const QuadraticMonteCarloOptions& mc = {}) {
    p.validate();
    VarianceReport report;
    report.units = "dimensionless (-E[log C])";

    const double w0 = p.omega0;
    const double hi = std::max(support_cutoff(psd_omega2, 1e-9), 30.0 * w0);
    std::vector<double> seeds = detail::psd_seeds(psd_omega2);
    for (double s : detail::psd_seeds(psd_omega2)) seeds.push_back(-s);
    // the shifted filter peaks at W = 0, w0 and 2 w0
    for (double center : {0.0, w0, 2.0 * w0}) {
        seeds.push_back(center);
        for (double d : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4}) {
            seeds.push_back(center + d * w0);
            seeds.push_back(center - d * w0);
        }
    }
    for (double w = -3.0 * w0; w < 5.0 * w0; w += w0 / (4.0 * p.n_periods)) seeds.push_back(w);
    auto q = integrate_adaptive(
        [&](double w) {
            return evaluate_psd(psd_omega2, w) * quadratic_contrast_transfer(p, w - w0);
        },
        -hi, hi, seeds, 1e-15, 1e-9);
    report.quadrature_value = 0.5 * q.value;
    report.quadrature_error = 0.5 * q.error_estimate;

    const double n = double(p.n_periods);
    const double da = p.delta_amplitude();
    report.closed_form_value = p.mass * n * n * pi * pi * da * da *
                               evaluate_psd(psd_omega2, w0) / (p.hbar * std::pow(w0, 6));

    if (mode == ContrastMode::monte_carlo) {
        const double t_f = p.default_final_time();
        const double dt = mc.dt > 0.0 ? mc.dt : p.period() / 128.0;
        const auto arms = ideal_trajectories(p, t_f, dt);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t j = 0; j < mc.n_trials; ++j) {
            const auto trace = synthesize(psd_omega2, t_f, dt, mix_seed(mc.master_seed, j),
                                          mc.synthesis);
            const complexd da_q = delta_alpha_quadratic(p, trace, arms.first, arms.second, t_f);
            const double neg_log_c = 0.5 * std::norm(da_q);
            sum += neg_log_c;
            sum_sq += neg_log_c * neg_log_c;
        }
        MonteCarloEstimate est;
        est.n = mc.n_trials;
        est.value = sum / double(mc.n_trials);
        const double var = std::max(0.0, sum_sq / double(mc.n_trials) - est.value * est.value);
        est.standard_error = std::sqrt(var / double(mc.n_trials));
        report.monte_carlo = est;
    }
    return report;
}

/// Leading-order squeeze/shear map as a symplectic matrix acting on (x, p).
inline Eigen::Matrix2d squeeze_symplectic_map(const PhysParams& p, const SqueezeParams& sq) {
    Eigen::Matrix2d squeeze = Eigen::Matrix2d::Zero();
    squeeze(0, 0) = std::exp(sq.delta_rho);
    squeeze(1, 1) = std::exp(-sq.delta_rho);
    Eigen::Matrix2d shear = Eigen::Matrix2d::Identity();
    shear(1, 0) = p.mass * sq.delta_rho_dot;
    return shear * squeeze;
}

/// Applies the squeeze/shear map to both members of a displaced Gaussian pair
/// and returns |overlap_before - overlap_after|. The map is symplectic, so the
/// overlap is invariant; the check quantifies how well the covariance algebra
/// realises that.
inline double squeeze_unitarity_check(const PhysParams& p, const SqueezeParams& sq,
                                      const GaussianArmState& a, const GaussianArmState& b) {
    const double sx2 = p.hbar / (2.0 * p.mass * p.omega0);
    const double sp2 = 0.5 * p.mass * p.hbar * p.omega0;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    cov(0, 0) = sx2;
    cov(1, 1) = sp2;

    auto center = [&](const GaussianArmState& s) {
        Eigen::Vector2d c;
        c << std::sqrt(2.0 * p.hbar / (p.mass * p.omega0)) * s.alpha.real(),
            std::sqrt(2.0 * p.mass * p.hbar * p.omega0) * s.alpha.imag();
        return c;
    };
    auto overlap = [](const Eigen::Matrix2d& sigma, const Eigen::Vector2d& d) {
        // |<psi1|psi2>|^2 = exp(-d^T sigma^{-1} d / 4) for equal-covariance
        // pure Gaussian states
        return std::exp(-0.25 * d.dot(sigma.inverse() * d));
    };

    const Eigen::Vector2d d0 = center(a) - center(b);
    const double before = overlap(cov, d0);

    const Eigen::Matrix2d m = squeeze_symplectic_map(p, sq);
    const Eigen::Matrix2d cov_after = m * cov * m.transpose();
    const Eigen::Vector2d d_after = m * d0;
    const double after = overlap(cov_after, d_after);
    return std::abs(before - after);
}

}  // namespace sgn
