#pragma once

#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/fft.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/trajectory.hpp"

namespace sgn {

enum class TransferProvenance { fft_of_trajectories, closed_form_fn, higher_order_n, cross_term };

/// Dephasing filter function on a non-negative frequency grid. Diagonal
/// transfers are real, non-negative and even; only w >= 0 is stored.
struct TransferFunction {
    std::vector<double> omegas;
    std::vector<double> values;  ///< m^2 s^2 for dephasing transfer
    TransferProvenance provenance = TransferProvenance::fft_of_trajectories;

    double max_omega() const { return omegas.empty() ? 0.0 : omegas.back(); }

    /// Linear interpolation on the grid; even continuation in w.
    double interpolate(double omega) const {
        const double w = std::abs(omega);
        if (omegas.size() < 2 || w > omegas.back()) return 0.0;
        const double dw = omegas[1] - omegas[0];
        const std::size_t j = std::min<std::size_t>(
            omegas.size() - 2, static_cast<std::size_t>(std::floor((w - omegas.front()) / dw)));
        const double frac = (w - omegas[j]) / dw;
        return values[j] + frac * (values[j + 1] - values[j]);
    }
};

/// Complex cross transfer x_plus(w) x_minus(w)^* on a non-negative grid.
struct ComplexTransfer {
    std::vector<double> omegas;
    std::vector<complexd> values;

    complexd interpolate(double omega) const {
        const double w = std::abs(omega);
        if (omegas.size() < 2 || w > omegas.back()) return {0.0, 0.0};
        const double dw = omegas[1] - omegas[0];
        const std::size_t j = std::min<std::size_t>(
            omegas.size() - 2, static_cast<std::size_t>(std::floor((w - omegas.front()) / dw)));
        const double frac = (w - omegas[j]) / dw;
        complexd val = values[j] + frac * (values[j + 1] - values[j]);
        // even continuation of the underlying real series: F(-w) = conj(F(w))
        return omega >= 0.0 ? val : std::conj(val);
    }
};

namespace detail {

inline std::vector<double> power_series(const std::vector<double>& x, int n) {
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::pow(x[k], n);
    return out;
}

}  // namespace detail

/// F(w) = |x_plus(w) - x_minus(w)|^2 from finite-time FFTs of the sampled
/// trajectories, truncated at w_max.
inline TransferFunction transfer_from_trajectories(const ArmTrajectory& x_plus,
                                                   const ArmTrajectory& x_minus, double w_max,
                                                   std::size_t pad_factor = 32) {
    if (!x_plus.same_grid(x_minus))
        throw grid_mismatch_error("transfer_from_trajectories: arm grids differ");
    std::vector<double> diff(x_plus.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = x_plus.x[k] - x_minus.x[k];
    const auto ft = finite_time_transform(diff, x_plus.dt(), pad_factor);

    TransferFunction out;
    out.provenance = TransferProvenance::fft_of_trajectories;
    for (std::size_t j = 0; j < ft.omegas.size() && ft.omegas[j] <= w_max; ++j) {
        out.omegas.push_back(ft.omegas[j]);
        out.values.push_back(std::norm(ft.values[j]));
    }
    return out;
}

/// Higher-order filter F(w) = |x_plus^n(w) - x_minus^n(w)|^2 (n >= 1).
inline TransferFunction transfer_higher_order(const ArmTrajectory& x_plus,
                                              const ArmTrajectory& x_minus, int n, double w_max,
                                              std::size_t pad_factor = 32) {
    if (n < 1) throw config_error("transfer_higher_order: n must be >= 1");
    if (!x_plus.same_grid(x_minus))
        throw grid_mismatch_error("transfer_higher_order: arm grids differ");
    std::vector<double> diff(x_plus.size());
    const auto xp = detail::power_series(x_plus.x, n);
    const auto xm = detail::power_series(x_minus.x, n);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = xp[k] - xm[k];
    const auto ft = finite_time_transform(diff, x_plus.dt(), pad_factor);

    TransferFunction out;
    out.provenance = n == 1 ? TransferProvenance::fft_of_trajectories
                            : TransferProvenance::higher_order_n;
    for (std::size_t j = 0; j < ft.omegas.size() && ft.omegas[j] <= w_max; ++j) {
        out.omegas.push_back(ft.omegas[j]);
        out.values.push_back(std::norm(ft.values[j]));
    }
    return out;
}

/// Cross transfer F_pm(w) = x_plus(w) x_minus(w)^*.
inline ComplexTransfer cross_transfer_from_trajectories(const ArmTrajectory& x_plus,
                                                        const ArmTrajectory& x_minus,
                                                        double w_max,
                                                        std::size_t pad_factor = 32) {
    if (!x_plus.same_grid(x_minus))
        throw grid_mismatch_error("cross_transfer_from_trajectories: arm grids differ");
    const auto fp = finite_time_transform(x_plus.x, x_plus.dt(), pad_factor);
    const auto fm = finite_time_transform(x_minus.x, x_minus.dt(), pad_factor);
    ComplexTransfer out;
    for (std::size_t j = 0; j < fp.omegas.size() && fp.omegas[j] <= w_max; ++j) {
        out.omegas.push_back(fp.omegas[j]);
        out.values.push_back(fp.values[j] * std::conj(fm.values[j]));
    }
    return out;
}

/// Closed-form filter for N whole periods of the constant-gradient arms,
///
///   F_N(w) = 4 (dA)^2 w0^4 sin^2(N pi w / w0) / (w^2 (w^2 - w0^2)^2),
///
/// with the removable singularities at w = 0 and w = +-w0 evaluated through
/// their series limits. Even and finite everywhere:
///   F_N(0)  = 4 pi^2 N^2 dA^2 / w0^2,
///   F_N(w0) = pi^2 N^2 dA^2 / w0^2.
inline double transfer_closed_form_FN(const PhysParams& p, double omega) {
    const double w0 = p.omega0;
    const double w = std::abs(omega);
    const double da = p.delta_amplitude();
    const double npi = double(p.n_periods) * pi;
    const double pref = 4.0 * da * da * std::pow(w0, 4);

    // stable pieces: sin(N pi w / w0) has zeros at every k w0 / N, matching
    // the w = 0 and w = +-w0 zeros of the denominator
    if (w < 0.5 * w0) {
        const double s_over_w = (npi / w0) * sinc(npi * w / w0);  // sin(.)/w
        const double d = w * w - w0 * w0;
        return pref * s_over_w * s_over_w / (d * d);
    }
    if (std::abs(w - w0) < 0.5 * w0) {
        const double delta = w - w0;
        // sin(N pi w / w0) = +- sin(N pi delta / w0)
        const double s_over_d = (npi / w0) * sinc(npi * delta / w0);  // sin(.)/delta
        const double wp = w + w0;
        return pref * s_over_d * s_over_d / (w * w * wp * wp);
    }
    const double s = std::sin(npi * w / w0);
    const double d = w * w - w0 * w0;
    return pref * s * s / (w * w * d * d);
}

/// F_N sampled on a grid (for route comparisons against the FFT transfer).
inline TransferFunction transfer_closed_form_grid(const PhysParams& p,
                                                  const std::vector<double>& omegas) {
    TransferFunction out;
    out.provenance = TransferProvenance::closed_form_fn;
    out.omegas = omegas;
    out.values.resize(omegas.size());
    for (std::size_t j = 0; j < omegas.size(); ++j)
        out.values[j] = transfer_closed_form_FN(p, omegas[j]);
    return out;
}

}  // namespace sgn
