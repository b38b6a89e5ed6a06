#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/psd.hpp"
#include "sgnoise/quadrature.hpp"
#include "sgnoise/transfer.hpp"

namespace sgn {

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t n = 0;
};

/// A variance computed along as many routes as are available. The quadrature
/// value is always present and is the ground truth; closed forms and Monte
/// Carlo estimates are reported alongside it, never alone.
struct VarianceReport {
    double quadrature_value = 0.0;
    double quadrature_error = 0.0;
    std::optional<double> closed_form_value;
    std::optional<MonteCarloEstimate> monte_carlo;
    std::string units;
};

namespace detail {

inline std::vector<double> resonance_seeds(double w0, double width_scale) {
    // geometric ladder down to 1e-4 w0 so the quadrature resolves the filter
    // resonance however narrow the surrounding structure is
    std::vector<double> seeds;
    for (double d : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3}) {
        seeds.push_back(w0 * (1.0 - d));
        seeds.push_back(w0 * (1.0 + d));
    }
    for (int k = 1; k <= 8; ++k) {
        seeds.push_back(w0 + k * width_scale);
        if (w0 - k * width_scale > 0.0) seeds.push_back(w0 - k * width_scale);
    }
    seeds.push_back(w0);
    return seeds;
}

inline std::vector<double> psd_seeds(const Psd& psd) {
    std::vector<double> seeds;
    std::visit(
        [&seeds](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BandLimitedWhite>) {
                seeds = {m.w_max};
            } else if constexpr (std::is_same_v<M, LorentzianPair>) {
                for (double f : {-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0})
                    if (m.w_c + f * m.gamma > 0.0) seeds.push_back(m.w_c + f * m.gamma);
            } else if constexpr (std::is_same_v<M, PowerLaw>) {
                seeds = {m.w_lo, m.w_hi};
            } else {
                for (double f : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0})
                    if (m.w_c + f * m.width > 0.0) seeds.push_back(m.w_c + f * m.width);
            }
        },
        psd.model);
    return seeds;
}

}  // namespace detail

/// prefactor * Integral S(w) F(w) dw over the (two-sided, even) transfer grid.
/// Adaptive refinement resolves PSD structure narrower than the grid spacing;
/// the transfer itself is linearly interpolated between its samples. Warns when
/// more than 0.1% of the PSD power lies beyond the grid span and fails hard
/// above 5%.
inline VarianceReport variance_from_psd(const Psd& psd, const TransferFunction& transfer,
                                        double prefactor, const std::string& units = "rad^2") {
    if (transfer.omegas.size() < 2)
        throw config_error("variance_from_psd: transfer grid too small");
    const double span = transfer.max_omega();
    const double covered =
        2.0 * integrate_adaptive([&psd](double w) { return evaluate_psd(psd, w); }, 0.0, span,
                                 detail::psd_seeds(psd), 1e-14, 1e-10)
                  .value;
    const double total = total_power_analytic(psd);
    if (total > 0.0) {
        const double missing = std::max(0.0, (total - covered) / total);
        if (missing > 0.05)
            throw numeric_error("variance_from_psd: transfer grid truncates " +
                                std::to_string(100.0 * missing) + "% of the PSD power");
        if (missing > 1e-3)
            warn("variance_from_psd: transfer grid truncates " + std::to_string(100.0 * missing) +
                 "% of the PSD power");
    }

    std::vector<double> seeds = detail::psd_seeds(psd);
    // coarse ladder across the grid keeps the recursion aware of filter lobes
    const double dw = transfer.omegas[1] - transfer.omegas[0];
    for (double w = 0.0; w <= span; w += 4.0 * dw) seeds.push_back(w);

    auto integrand = [&](double w) { return evaluate_psd(psd, w) * transfer.interpolate(w); };
    auto q = integrate_adaptive(integrand, 0.0, span, seeds, 1e-14, 1e-9);

    VarianceReport report;
    report.quadrature_value = 2.0 * prefactor * q.value;
    report.quadrature_error = 2.0 * std::abs(prefactor) * q.error_estimate;
    report.units = units;
    return report;
}

/// Ground-truth quadrature for the dephasing variance of the constant-gradient
/// scenario: (m^2/hbar^2) Integral S(w) F_N(w) dw with the analytic filter.
inline VarianceReport dephasing_variance_quadrature(const PhysParams& p, const Psd& psd) {
    const double w0 = p.omega0;
    const double hi = std::max(support_cutoff(psd, 1e-9), 30.0 * w0);
    std::vector<double> seeds = detail::psd_seeds(psd);
    auto res = detail::resonance_seeds(w0, w0 / (2.0 * p.n_periods));
    seeds.insert(seeds.end(), res.begin(), res.end());
    // filter lobes have width w0/N
    for (double w = 0.0; w < 5.0 * w0; w += w0 / (4.0 * p.n_periods)) seeds.push_back(w);

    const double pref = (p.mass / p.hbar) * (p.mass / p.hbar);
    auto q = integrate_adaptive(
        [&](double w) { return evaluate_psd(psd, w) * transfer_closed_form_FN(p, w); }, 0.0, hi,
        seeds, 1e-14, 1e-9);
    VarianceReport report;
    report.quadrature_value = 2.0 * pref * q.value;
    report.quadrature_error = 2.0 * pref * q.error_estimate;
    report.units = "rad^2";
    return report;
}

/// Residue-theorem closed form for the same quantity,
/// 4 pi m^2 N^2 (dA)^2 S(w0) / (w0 hbar^2). Valid only when the PSD is smooth
/// (slowly varying on the filter-lobe scale w0/N) around the resonance; the
/// caller asserts that. Report it next to the quadrature, never alone.
inline double dephasing_variance_residue(const PhysParams& p, const Psd& psd) {
    const double n = double(p.n_periods);
    const double da = p.delta_amplitude();
    return 4.0 * pi * p.mass * p.mass * n * n * da * da * evaluate_psd(psd, p.omega0) /
           (p.omega0 * p.hbar * p.hbar);
}

/// Variance of the single-arm displacement response at time t,
/// (m / 2 hbar w0) t^2 Integral S(w) sinc^2((w - w0) t / 2) dw,
/// with refinement across the sinc main lobe at w0. The kernel is centred at
/// +w0 only, so the integral runs over both signs of w.
inline VarianceReport displacement_variance_quadrature(const PhysParams& p, const Psd& psd,
                                                       double t) {
    if (!(t > 0.0)) throw config_error("displacement_variance_quadrature: t must be positive");
    const double w0 = p.omega0;
    const double cut = std::max(support_cutoff(psd, 1e-9), w0 + 60.0 * pi / t);
    const double lobe = 2.0 * pi / t;

    std::vector<double> seeds = detail::psd_seeds(psd);
    for (auto& s : detail::psd_seeds(psd)) seeds.push_back(-s);
    for (int k = -40; k <= 40; ++k) seeds.push_back(w0 + k * lobe / 2.0);
    auto res = detail::resonance_seeds(w0, lobe);
    seeds.insert(seeds.end(), res.begin(), res.end());

    const double pref = p.mass / (2.0 * p.hbar * p.omega0);
    auto q = integrate_adaptive(
        [&](double w) {
            const double s = sinc(0.5 * (w - w0) * t);
            return evaluate_psd(psd, w) * s * s;
        },
        -cut, cut, seeds, 1e-15, 1e-9);
    VarianceReport report;
    report.quadrature_value = pref * t * t * q.value;
    report.quadrature_error = pref * t * t * q.error_estimate;
    report.units = "dimensionless";
    return report;
}

/// Closed form for the displacement variance at t_f = 2 pi N / w0,
/// 2 pi^2 N m S(w0) / (hbar w0^2); equals D2 t_f exactly. Same smooth-PSD
/// caveat as the dephasing closed form.
inline double displacement_variance_closed_form(const PhysParams& p, const Psd& psd) {
    return 2.0 * pi * pi * double(p.n_periods) * p.mass * evaluate_psd(psd, p.omega0) /
           (p.hbar * p.omega0 * p.omega0);
}

/// Short-time diffusion coefficient D1 = m sigma_a^2 / (2 hbar w0).
inline double diffusion_d1(const PhysParams& p, const Psd& psd) {
    return p.mass * total_power_analytic(psd) / (2.0 * p.hbar * p.omega0);
}

/// Long-time diffusion coefficient D2 = pi m S(w0) / (hbar w0).
inline double diffusion_d2(const PhysParams& p, const Psd& psd) {
    return pi * p.mass * evaluate_psd(psd, p.omega0) / (p.hbar * p.omega0);
}

struct ResidueIntegralReport {
    double closed_form = 0.0;  ///< amplitude * (pi^2 N^2 / w0^5) S(w0), S(0) terms dropped
    double quadrature = 0.0;   ///< direct integral of the same master integrand
    double quadrature_error = 0.0;
};

/// The recurring master integral
///   I0 = amplitude * Integral S(w) sin^2(N pi w / w0) / (w^2 (w^2 - w0^2)^2) dw.
/// The closed form keeps the +-w0 pole contribution with the S(0) terms
/// dropped; the direct quadrature of the integrand is returned alongside as
/// the arbiter.
inline ResidueIntegralReport residue_master_integral(const Psd& psd, const PhysParams& p,
                                                     double amplitude) {
    const double w0 = p.omega0;
    const double n = double(p.n_periods);
    ResidueIntegralReport out;
    out.closed_form = amplitude * pi * pi * n * n * evaluate_psd(psd, w0) / std::pow(w0, 5);

    // same integrand as F_N up to the 4 dA^2 w0^4 prefactor
    PhysParams unit = p;
    auto kernel = [&](double w) {
        const double da = p.delta_amplitude();
        return transfer_closed_form_FN(unit, w) / (4.0 * da * da * std::pow(w0, 4));
    };
    const double hi = std::max(support_cutoff(psd, 1e-9), 30.0 * w0);
    std::vector<double> seeds = detail::psd_seeds(psd);
    auto res = detail::resonance_seeds(w0, w0 / (2.0 * n));
    seeds.insert(seeds.end(), res.begin(), res.end());
    for (double w = 0.0; w < 5.0 * w0; w += w0 / (4.0 * n)) seeds.push_back(w);
    auto q = integrate_adaptive([&](double w) { return evaluate_psd(psd, w) * kernel(w); }, 0.0,
                                hi, seeds, 1e-15, 1e-9);
    out.quadrature = 2.0 * amplitude * q.value;
    out.quadrature_error = 2.0 * std::abs(amplitude) * q.error_estimate;
    return out;
}

/// Dephasing variance for arm-dependent noise with cross-correlation:
///
///   prefactor * Integral [ S_pp F_pp + S_mm F_mm - 2 Re(S_pm conj(F_pm)) ] dw
///
/// where F_pm = x_plus(w) x_minus(w)^*. The cross PSD enters with the sign
/// required by the differential phase, so perfectly correlated noise on
/// identical coupling reduces to the |x_plus - x_minus|^2 filter. The caller
/// must supply a cross PSD with conjugate symmetry S_pm(-w) = S_pm(w)^*.
inline VarianceReport cross_dephasing_variance(const Psd& s_pp, const Psd& s_mm,
                                               const std::function<complexd(double)>& s_pm,
                                               const TransferFunction& f_pp,
                                               const TransferFunction& f_mm,
                                               const ComplexTransfer& f_pm, double prefactor) {
    if (f_pp.omegas.size() < 2 || f_mm.omegas.size() < 2 || f_pm.omegas.size() < 2)
        throw config_error("cross_dephasing_variance: transfer grids too small");
    const double span =
        std::min({f_pp.max_omega(), f_mm.max_omega(), f_pm.omegas.back()});

    for (double w : {0.3 * span, 0.7 * span, span}) {
        const complexd a = s_pm(-w);
        const complexd b = std::conj(s_pm(w));
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(b)))
            throw config_error(
                "cross_dephasing_variance: cross PSD lacks conjugate symmetry S(-w) = S(w)^*");
    }

    std::vector<double> seeds = detail::psd_seeds(s_pp);
    auto more = detail::psd_seeds(s_mm);
    seeds.insert(seeds.end(), more.begin(), more.end());
    const double dw = f_pp.omegas[1] - f_pp.omegas[0];
    for (double w = 0.0; w <= span; w += 4.0 * dw) seeds.push_back(w);

    // integrand is even under w -> -w once the conjugate symmetries are used,
    // so integrate w >= 0 and double
    auto integrand = [&](double w) {
        const double diag =
            evaluate_psd(s_pp, w) * f_pp.interpolate(w) + evaluate_psd(s_mm, w) * f_mm.interpolate(w);
        const double cross = -2.0 * std::real(s_pm(w) * std::conj(f_pm.interpolate(w)));
        return diag + cross;
    };
    auto q = integrate_adaptive(integrand, 0.0, span, seeds, 1e-14, 1e-9);

    VarianceReport report;
    report.quadrature_value = 2.0 * prefactor * q.value;
    report.quadrature_error = 2.0 * std::abs(prefactor) * q.error_estimate;
    report.units = "rad^2";
    return report;
}

}  // namespace sgn
