#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sgnoise/density_matrix.hpp"
#include "sgnoise/ermakov.hpp"
#include "sgnoise/phase.hpp"
#include "sgnoise/quadratic_noise.hpp"
#include "sgnoise/report.hpp"
#include "sgnoise/scenario.hpp"
#include "sgnoise/spin.hpp"
#include "sgnoise/transfer.hpp"
#include "sgnoise/variance.hpp"

namespace sgn::validation {

// The end-to-end verification suite behind `sgnoise validate`. Each criterion
// prints one pass/fail line; tolerances are fixed here, not tunable from the
// outside. Closed-form checks compare against quadrature and Monte Carlo
// ground truth and are reported even when the closed form is outside its
// validity regime.

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& line) {
        passed = passed && ok;
        details.push_back(std::string(ok ? "    ok   " : "    FAIL ") + line);
    }
};

namespace detail {

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string rel_line(const std::string& what, double measured, double reference,
                            double tol) {
    const double rel = std::abs(measured - reference) / std::max(std::abs(reference), 1e-300);
    return what + ": measured " + num(measured) + ", reference " + num(reference) +
           ", |rel| " + num(rel) + " (tol " + num(tol) + ")";
}

inline bool within_rel(double measured, double reference, double tol) {
    return std::abs(measured - reference) <= tol * std::abs(reference);
}

template <typename Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned n_threads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 8u);
    if (n_threads <= 1 || n < 2 * n_threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &failure, &failure_mutex]() {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// 1. Wiener-Khinchin consistency of the synthesizer: pooled autocorrelation
/// of 2000 traces against the Fourier transform of the PSD, and R(0) against
/// the analytic total power pi gamma S0.
inline CriterionResult criterion_01_wiener_khinchin() {
    CriterionResult r{1, "Wiener-Khinchin: synthesized autocorrelation matches the PSD transform"};
    const Psd psd{LorentzianPair{1.0, 1.0, 0.1}};
    const double gamma = 0.1;
    const double duration = 20.0 / gamma;  // 20 correlation times
    const double dt = 0.1;
    const std::size_t n_traces = 2000;

    SynthesisOptions opt;
    opt.oversample = 4.0;
    opt.tail_fraction = 5e-3;

    std::vector<NoiseTrace> traces(n_traces);
    detail::parallel_for(n_traces, [&](std::size_t j) {
        traces[j] = synthesize(psd, duration, dt, mix_seed(0x57a71c5eedULL, j), opt);
    });

    const double max_lag = 3.0 / gamma;
    const auto acf = sample_autocorrelation(traces, max_lag);

    // R(0) vs pi gamma S0 within 3 standard errors of the pooled estimate
    const double target_r0 = pi * gamma * 1.0;
    std::vector<double> per_trace_r0(n_traces);
    for (std::size_t j = 0; j < n_traces; ++j) {
        double acc = 0.0;
        for (double s : traces[j].samples) acc += s * s;
        per_trace_r0[j] = acc / double(traces[j].samples.size());
    }
    double mean_r0 = 0.0;
    for (double v : per_trace_r0) mean_r0 += v;
    mean_r0 /= double(n_traces);
    double var_r0 = 0.0;
    for (double v : per_trace_r0) var_r0 += (v - mean_r0) * (v - mean_r0);
    const double se_r0 = std::sqrt(var_r0 / double(n_traces - 1) / double(n_traces));
    r.check(std::abs(acf[0].second - target_r0) <= 3.0 * se_r0 + 0.005 * target_r0,
            "R(0) = " + detail::num(acf[0].second) + " vs pi*gamma*S0 = " +
                detail::num(target_r0) + " (3 se = " + detail::num(3.0 * se_r0) + ")");

    // normalized autocorrelation against the quadrature transform of S,
    // deviation bounded by 5% of R(0) out to 3 correlation times
    double worst = 0.0;
    double worst_tau = 0.0;
    for (const auto& [tau, rhat] : acf) {
        const double target = autocorrelation_target(psd, tau);
        const double dev = std::abs(rhat / acf[0].second - target / target_r0);
        if (dev > worst) {
            worst = dev;
            worst_tau = tau;
        }
    }
    r.check(worst <= 0.05, "normalized ACF worst deviation " + detail::num(worst) + " at tau = " +
                               detail::num(worst_tau) + " (tol 0.05)");
    return r;
}

/// 2. Dephasing as a linear response: Monte Carlo variance of the differential
/// phase against the PSD-filter quadrature, and the FFT filter against the
/// closed form F_N.
inline CriterionResult criterion_02_dephasing_linear_response() {
    CriterionResult r{2, "dephasing variance: Monte Carlo vs quadrature, FFT filter vs closed form"};
    PhysParams p = PhysParams::natural(3);
    const Psd psd{LorentzianPair{0.002, p.omega0, 0.1}};

    ScenarioConfig config;
    config.params = p;
    config.psd = psd;
    config.noise_kind = NoiseKind::acceleration;
    config.arm_correlation = ArmCorrelation::common_mode;
    config.n_trials = 10000;
    config.dt = p.period() / 128.0;
    config.master_seed = 0xd311a5ULL;
    config.synthesis.oversample = 16.0;
    config.synthesis.tail_fraction = 2.5e-3;

    const auto report = run_scenario(config);
    const auto& sig = report.stats.quantities.at("sigma_phi_sq");
    const double quad = *report.references.at("sigma_phi_sq").quadrature;
    r.check(std::abs(sig.mean - quad) <= 3.0 * sig.stderr_of_mean,
            "sample sigma_phi^2 = " + detail::num(sig.mean) + " vs quadrature " +
                detail::num(quad) + " (3 se = " + detail::num(3.0 * sig.stderr_of_mean) + ")");

    // FFT-derived filter vs closed form on the bin grid
    const double dt = p.period() / 256.0;
    const auto arms = ideal_trajectories(p, p.default_final_time(), dt);
    const auto fft_transfer = transfer_from_trajectories(arms.first, arms.second, 5.0 * p.omega0);
    double worst = 0.0;
    double peak = 0.0;
    for (double v : fft_transfer.values) peak = std::max(peak, v);
    for (std::size_t j = 0; j < fft_transfer.omegas.size(); ++j) {
        const double w = fft_transfer.omegas[j];
        if (w < 0.02 * p.omega0) continue;
        const double ref = transfer_closed_form_FN(p, w);
        const double err = std::abs(fft_transfer.values[j] - ref);
        worst = std::max(worst, err / (ref + 1e-9 * peak));
    }
    r.check(worst <= 5e-3,
            "FFT filter vs F_N worst relative deviation " + detail::num(worst) + " (tol 0.005)");
    return r;
}

/// 3. Asymptotics of the closed-form filter F_N.
inline CriterionResult criterion_03_transfer_asymptotics() {
    CriterionResult r{3, "filter F_N: low-frequency plateau, resonance value, high-frequency slope"};
    PhysParams p = PhysParams::natural(3);
    const double da = p.delta_amplitude();
    const double n = double(p.n_periods);
    const double w0 = p.omega0;

    const double plateau = 4.0 * pi * pi * n * n * da * da / (w0 * w0);
    const double measured_plateau = transfer_closed_form_FN(p, 1e-4 * w0);
    r.check(detail::within_rel(measured_plateau, plateau, 1e-6),
            detail::rel_line("plateau F_N(1e-4 w0)", measured_plateau, plateau, 1e-6));

    const double resonance = pi * pi * n * n * da * da / (w0 * w0);
    const double measured_res = transfer_closed_form_FN(p, w0);
    r.check(detail::within_rel(measured_res, resonance, 1e-9),
            detail::rel_line("resonance F_N(w0)", measured_res, resonance, 1e-9));

    // envelope slope on [10 w0, 100 w0] from the sin^2 = 1 ridge
    std::vector<double> lw, lf;
    for (double w = 10.0 * w0; w <= 100.0 * w0; w *= 1.15) {
        // snap to the nearest envelope point (k + 1/2) w0 / N
        const double k = std::floor(w * n / w0) + 0.5;
        const double wk = k * w0 / n;
        lw.push_back(std::log(wk));
        lf.push_back(std::log(transfer_closed_form_FN(p, wk)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        sx += lw[i];
        sy += lf[i];
        sxx += lw[i] * lw[i];
        sxy += lw[i] * lf[i];
    }
    const double m = double(lw.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    r.check(std::abs(slope + 6.0) <= 0.1,
            "log-log envelope slope " + detail::num(slope) + " (required -6.0 +- 0.1)");
    return r;
}

/// 4. Residue closed forms against the adaptive-quadrature oracle for a
/// narrow PSD (gamma = 0.01 w0) at the resonance. The closed forms assume a
/// PSD smooth across the filter lobes (width w0/N); a narrow line violates
/// that assumption, and the quadrature is the ground truth.
inline CriterionResult criterion_04_residue_closed_forms() {
    CriterionResult r{4, "residue closed forms vs quadrature oracle (narrow PSD, gamma = 0.01 w0)"};
    PhysParams p = PhysParams::natural(3);
    const Psd psd{LorentzianPair{1.0, p.omega0, 0.01 * p.omega0}};

    const auto quad_phi = dephasing_variance_quadrature(p, psd);
    const double residue_phi = dephasing_variance_residue(p, psd);
    r.check(detail::within_rel(quad_phi.quadrature_value, residue_phi, 0.10),
            detail::rel_line("sigma_phi^2 quadrature vs residue form",
                             quad_phi.quadrature_value, residue_phi, 0.10));

    const auto quad_alpha = displacement_variance_quadrature(p, psd, p.default_final_time());
    const double closed_alpha = displacement_variance_closed_form(p, psd);
    r.check(detail::within_rel(quad_alpha.quadrature_value, closed_alpha, 0.10),
            detail::rel_line("sigma_alpha^2(t_f) quadrature vs closed form",
                             quad_alpha.quadrature_value, closed_alpha, 0.10));
    if (!r.passed) {
        r.details.push_back(
            "    note: known resonant-approximation defect; the closed forms hold only for PSDs "
            "smooth across the filter lobe width w0/N. At gamma = 0.01 w0 the line is far "
            "narrower, the integral collapses to F(w0) * (line power), and the quadrature / "
            "Monte Carlo values are the trustworthy ones. Ratios quad/closed: " +
            detail::num(quad_phi.quadrature_value / residue_phi) + " (dephasing), " +
            detail::num(quad_alpha.quadrature_value / closed_alpha) + " (displacement).");
    }
    return r;
}

/// 5. Short- and long-time diffusion of the displacement response for a
/// broadband PSD, against D1 and D2, plus Monte Carlo |dalpha|^2 at both times.
inline CriterionResult criterion_05_diffusion_regimes() {
    CriterionResult r{5, "displacement diffusion: D1 and D2 regimes with Monte Carlo cross-check"};
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{1.0, 3.0 * p.omega0}};

    const double t_short = 0.01 / p.omega0;
    const double d1 = diffusion_d1(p, psd);
    const auto var_short = displacement_variance_quadrature(p, psd, t_short);
    r.check(detail::within_rel(var_short.quadrature_value / (t_short * t_short), d1, 0.02),
            detail::rel_line("sigma_alpha^2/t^2 at t = 0.01/w0 vs D1",
                             var_short.quadrature_value / (t_short * t_short), d1, 0.02));

    const double t_long = 200.0 / p.omega0;
    const double d2 = diffusion_d2(p, psd);
    const auto var_long = displacement_variance_quadrature(p, psd, t_long);
    r.check(detail::within_rel(var_long.quadrature_value / t_long, d2, 0.05),
            detail::rel_line("sigma_alpha^2/t at t = 200/w0 vs D2",
                             var_long.quadrature_value / t_long, d2, 0.05));

    // Monte Carlo |dalpha(t)|^2 at both times
    auto mc_abs_dalpha_sq = [&](double t, double dt, double oversample, std::size_t trials) {
        std::vector<double> vals(trials);
        SynthesisOptions opt;
        opt.oversample = oversample;
        detail::parallel_for(trials, [&](std::size_t j) {
            const auto trace = synthesize(psd, t, dt, mix_seed(0xd1f5u, j), opt);
            vals[j] = std::norm(delta_alpha(p, trace, t));
        });
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= double(trials);
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        return std::pair<double, double>{mean,
                                         std::sqrt(var / double(trials - 1) / double(trials))};
    };

    const auto [mean_s, se_s] = mc_abs_dalpha_sq(t_short, t_short / 8.0, 30000.0, 2000);
    r.check(std::abs(mean_s - var_short.quadrature_value) <= 3.0 * se_s,
            "MC |dalpha|^2 at t = 0.01/w0: " + detail::num(mean_s) + " vs quadrature " +
                detail::num(var_short.quadrature_value) + " (3 se = " + detail::num(3.0 * se_s) +
                ")");
    const auto [mean_l, se_l] = mc_abs_dalpha_sq(t_long, 0.05 / p.omega0, 8.0, 1500);
    r.check(std::abs(mean_l - var_long.quadrature_value) <= 3.0 * se_l,
            "MC |dalpha|^2 at t = 200/w0: " + detail::num(mean_l) + " vs quadrature " +
                detail::num(var_long.quadrature_value) + " (3 se = " + detail::num(3.0 * se_l) +
                ")");
    return r;
}

/// 6. Ramsey spin layer: pulse unitarity and printed matrix, witness
/// projector, and Tr[rho(phi) W] = cos^2(phi/2) across a 100-point grid.
inline CriterionResult criterion_06_ramsey_layer() {
    CriterionResult r{6, "Ramsey layer: pi/2 pulse, witness projector, cos^2 fringe"};
    const auto u = ramsey_pulse();
    const double unit_defect = (u.adjoint() * u - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff();
    r.check(unit_defect <= 1e-12, "pulse unitarity defect " + detail::num(unit_defect));

    Eigen::Matrix3cd printed;
    const double s2 = std::sqrt(2.0);
    printed << complexd{0.5, 0}, complexd{0, -1.0 / s2}, complexd{-0.5, 0},
        complexd{0, -1.0 / s2}, complexd{0, 0}, complexd{0, -1.0 / s2},
        complexd{-0.5, 0}, complexd{0, -1.0 / s2}, complexd{0.5, 0};
    r.check((u - printed).cwiseAbs().maxCoeff() <= 1e-15, "pulse matches its printed matrix");

    const auto w = ramsey_witness();
    const double proj_defect = (w * w - w).cwiseAbs().maxCoeff();
    const double trace_w = w.trace().real();
    r.check(proj_defect <= 1e-14 && std::abs(trace_w - 1.0) <= 1e-14,
            "witness is a rank-1 projector (W^2 = W, Tr W = 1)");
    const auto w_built = (ramsey_pulse().adjoint() *
                          Eigen::Vector3cd(0, 1, 0).asDiagonal().toDenseMatrix() * ramsey_pulse())
                             .eval();
    r.check((w - w_built).cwiseAbs().maxCoeff() <= 1e-14,
            "witness equals U^dag |0><0| U from the pulse");

    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double phi = -2.0 * pi + 4.0 * pi * double(k) / 99.0;
        const double value = witness_value(spin_density(phi, 0.0, 1.0));
        const double expected = std::cos(0.5 * phi) * std::cos(0.5 * phi);
        worst = std::max(worst, std::abs(value - expected));
    }
    r.check(worst <= 1e-12, "fringe worst |Tr[rho W] - cos^2(phi/2)| = " + detail::num(worst));
    return r;
}

/// 7. Master equation: exact dephasing rates in the H = 0 mode, conservation
/// laws at Lambda = 0, and the full evolution against a displaced-ensemble
/// oracle that does not assume Markovianity.
inline CriterionResult criterion_07_master_equation() {
    CriterionResult r{7, "master equation: dephasing rates, conservation, ensemble oracle"};
    PhysParams p = PhysParams::natural(1);

    // (a) H = 0: off-diagonal decay exp(-Lambda dx^2 t), rates 1:4:9
    {
        const Psd psd{BandLimitedWhite{0.02, 3.0}};
        const double lambda = pi * evaluate_psd(psd, p.omega0);
        const std::size_t n = 97;
        auto rho0 = coherent_density(p, {0.0, 0.0}, make_position_grid(4.2, n));
        const double dx = rho0.dx();
        MasterEvolveOptions opt;
        opt.include_hamiltonian = false;
        const double t_run = 2.0;
        const auto rho_t = master_evolve(p, rho0, psd, t_run, 0.01, opt);

        const std::size_t steps_per_unit = static_cast<std::size_t>(std::floor(1.0 / dx));
        const std::size_t center = n / 2;
        bool rates_ok = true;
        std::array<double, 3> rate{};
        for (int k = 1; k <= 3; ++k) {
            const std::size_t i = center + (std::size_t(k) * steps_per_unit) / 2;
            const std::size_t j = center - (std::size_t(k) * steps_per_unit -
                                            (std::size_t(k) * steps_per_unit) / 2);
            const double sep = rho0.grid[i] - rho0.grid[j];
            const double ratio = std::abs(rho_t.rho(long(i), long(j))) /
                                 std::abs(rho0.rho(long(i), long(j)));
            rate[k - 1] = -std::log(ratio) / t_run;
            const double expected = lambda * sep * sep;
            if (!detail::within_rel(rate[k - 1], expected, 0.02)) rates_ok = false;
        }
        r.check(rates_ok, "H = 0 decay rates match Lambda dx^2 within 2% at three separations");
        const double r21 = rate[1] / rate[0];
        const double r31 = rate[2] / rate[0];
        r.check(std::abs(r21 - 4.0) <= 0.12 && std::abs(r31 - 9.0) <= 0.27,
                "rate ratios " + detail::num(r21) + " : " + detail::num(r31) +
                    " vs 4 : 9 (tol 3%)");
    }

    // (b) Lambda = 0 over 10 periods: trace, purity, energy conserved
    {
        const Psd zero{BandLimitedWhite{0.0, 3.0}};
        const std::size_t n = 97;
        auto rho0 = coherent_density(p, {0.8, 0.0}, make_position_grid(4.2, n));
        const double purity0 = rho0.purity();
        const double trace0 = rho0.trace();
        const auto rho_t = master_evolve(p, rho0, zero, 10.0 * p.period(), 0.01);
        r.check(std::abs(rho_t.trace() - trace0) <= 1e-8,
                "trace drift " + detail::num(std::abs(rho_t.trace() - trace0)) + " (tol 1e-8)");
        r.check(std::abs(rho_t.purity() - purity0) <= 1e-6,
                "purity drift " + detail::num(std::abs(rho_t.purity() - purity0)) + " (tol 1e-6)");
    }

    // (c) full evolution vs 2000-member displaced ensemble
    {
        const Psd psd{BandLimitedWhite{0.01, 5.0}};
        const std::size_t n = 128;
        const auto grid = make_position_grid(5.6, n);
        auto rho0 = coherent_density(p, {0.0, 0.0}, grid);
        const double t_f = 2.0 * p.period();
        const auto rho_master = master_evolve(p, rho0, psd, t_f, 0.005);

        const std::size_t members = 2000;
        SynthesisOptions opt;
        opt.oversample = 8.0;
        const double dt_trace = t_f / 256.0;  // commensurate with t_f
        std::vector<complexd> dalphas(members);
        detail::parallel_for(members, [&](std::size_t j) {
            const auto trace = synthesize(psd, t_f, dt_trace, mix_seed(0xe26e5b1eULL, j), opt);
            dalphas[j] = delta_alpha(p, trace, t_f);
        });
        Eigen::MatrixXcd ensemble = Eigen::MatrixXcd::Zero(long(n), long(n));
        Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(long(n), long(n));
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(long(n));
        for (std::size_t j = 0; j < members; ++j) {
            const double x0 = std::sqrt(2.0 * p.hbar / (p.mass * p.omega0)) * dalphas[j].real();
            const double p0 = std::sqrt(2.0 * p.mass * p.hbar * p.omega0) * dalphas[j].imag();
            const double norm = std::pow(p.mass * p.omega0 / (pi * p.hbar), 0.25);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = grid[i];
                psi[long(i)] = norm *
                               std::exp(-p.mass * p.omega0 / (2.0 * p.hbar) * (x - x0) * (x - x0)) *
                               complexd{std::cos(p0 * x / p.hbar), std::sin(p0 * x / p.hbar)};
            }
            const Eigen::MatrixXcd outer = psi * psi.adjoint();
            ensemble += outer;
            sum_sq += outer.cwiseAbs2();
        }
        ensemble /= double(members);
        sum_sq /= double(members);
        const double dx = grid[1] - grid[0];
        const double tr = ensemble.diagonal().real().sum() * dx;
        ensemble /= tr;

        // far-out elements are exponentially sensitive to the finite ensemble,
        // so the 5% band widens to three Monte Carlo standard errors of the
        // element mean where the 2000 members cannot resolve 5%
        double worst = 0.0;
        std::size_t n_compared = 0;
        const double floor_rho = 5e-3 * ensemble.cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double sep = std::abs(grid[i] - grid[j]);
                if (sep < 0.3 || sep > 2.5) continue;
                const double ref = std::abs(ensemble(long(i), long(j)));
                if (ref < floor_rho) continue;
                const double var = std::max(
                    0.0, sum_sq(long(i), long(j)) - std::norm(ensemble(long(i), long(j)) * tr));
                const double se = std::sqrt(var / double(members)) / tr;
                const double dev =
                    std::abs(rho_master.rho(long(i), long(j)) - ensemble(long(i), long(j)));
                worst = std::max(worst, dev / std::max(0.05 * ref, 3.0 * se));
                ++n_compared;
            }
        r.check(worst <= 1.0,
                "master vs displaced-ensemble off-diagonals: worst deviation at " +
                    detail::num(100.0 * worst) +
                    "% of tolerance max(5%, 3 MC se) over " + std::to_string(n_compared) +
                    " elements");
    }
    return r;
}

/// 8. Common-mode cancellation: identical acceleration noise on both arms
/// leaves per-trial contrast at exactly 1 and the witness loss is pure
/// dephasing, |E e^{i dphi}| = e^{-sigma^2/2}.
inline CriterionResult criterion_08_common_mode() {
    CriterionResult r{8, "common-mode acceleration noise: contrast 1, Gaussian dephasing factor"};
    PhysParams p = PhysParams::natural(2);
    ScenarioConfig config;
    config.params = p;
    config.psd = Psd{LorentzianPair{0.002, p.omega0, 0.1}};
    config.noise_kind = NoiseKind::acceleration;
    config.arm_correlation = ArmCorrelation::common_mode;
    config.n_trials = 10000;
    config.dt = p.period() / 128.0;
    config.master_seed = 0xc0316cULL;
    config.synthesis.oversample = 8.0;
    config.synthesis.tail_fraction = 2.5e-3;

    const auto report = run_scenario(config);
    const auto& contrast = report.stats.quantities.at("contrast");
    r.check(std::abs(contrast.mean - 1.0) <= 1e-12 && contrast.variance <= 1e-24,
            "per-trial contrast mean " + detail::num(contrast.mean) + ", variance " +
                detail::num(contrast.variance));

    const double sigma_sq = report.stats.quantities.at("sigma_phi_sq").mean;
    const double sigma_se = report.stats.quantities.at("sigma_phi_sq").stderr_of_mean;
    const double expected = std::exp(-0.5 * sigma_sq);
    const double expected_se = 0.5 * expected * sigma_se;
    const double measured = report.stats.dephasing_factor;
    const double combined_se =
        std::hypot(expected_se, report.stats.dephasing_factor_stderr);
    r.check(std::abs(measured - expected) <= 3.0 * combined_se,
            "|E e^{i dphi}| = " + detail::num(measured) + " vs e^{-sigma^2/2} = " +
                detail::num(expected) + " (3 se = " + detail::num(3.0 * combined_se) + ")");
    return r;
}

/// 9. Magnetic-gradient noise: dephasing cancels identically for the unbiased
/// gradient; the contrast loss is compared against the resonant closed form
/// m g^2 mu^2 S_eta(w0) / (hbar w0).
inline CriterionResult criterion_09_magnetic_noise() {
    CriterionResult r{9, "magnetic-gradient noise: zero dephasing, contrast loss vs closed form"};
    PhysParams p = PhysParams::natural(1);
    ScenarioConfig config;
    config.params = p;
    config.psd = Psd{LorentzianPair{2.0, p.omega0, 0.01}};  // S_eta(w0) = 1
    config.noise_kind = NoiseKind::magnetic_gradient;
    config.arm_correlation = ArmCorrelation::anti_correlated;
    config.n_trials = 10000;
    config.dt = p.period() / 128.0;
    config.master_seed = 0x3a6e713cULL;
    config.synthesis.oversample = 400.0;
    config.synthesis.tail_fraction = 2.5e-3;

    const auto report = run_magnetic_scenario(config);
    const auto& dphi = report.stats.quantities.at("delta_phi");
    const double dphi_extreme =
        std::max(std::abs(dphi.mean), std::sqrt(dphi.variance));
    r.check(dphi_extreme <= 1e-14, "per-trial dephasing magnitude " + detail::num(dphi_extreme) +
                                       " (unbiased gradient cancels exactly)");

    const auto& nlc = report.stats.quantities.at("neg_log_contrast");
    const double closed = *report.references.at("neg_log_contrast").closed_form;
    const double quad = *report.references.at("neg_log_contrast").quadrature;
    r.check(std::abs(nlc.mean - closed) <= 3.0 * nlc.stderr_of_mean,
            "-E[log C] MC " + detail::num(nlc.mean) + " vs closed form " + detail::num(closed) +
                " (3 se = " + detail::num(3.0 * nlc.stderr_of_mean) + ")");
    r.check(detail::within_rel(nlc.mean, closed, 0.10),
            detail::rel_line("-E[log C] MC vs closed form", nlc.mean, closed, 0.10));
    r.details.push_back("    info: -E[log C] quadrature ground truth = " + detail::num(quad) +
                        " (MC and quadrature agree; the closed form carries the resonant "
                        "approximation)");
    return r;
}

/// 10. Quadratic noise: perturbative Ermakov solutions against the ODE
/// oracle, the contrast closed form against quadrature and Monte Carlo, and
/// the squeeze unitarity check.
inline CriterionResult criterion_10_quadratic_noise() {
    CriterionResult r{10, "quadratic noise: perturbative Ermakov, contrast routes, squeeze unitarity"};
    PhysParams p = PhysParams::natural(1);

    // (a) perturbative delta_rho vs ODE oracle, with O(eps^2) error scaling
    struct PerturbativeError {
        double relative;  // worst deviation over the scale of delta_rho itself
        double absolute;  // worst deviation, for the eps^2 scaling check
    };
    auto perturbative_error = [&](double eps) {
        const double t_f = p.period();
        const double dt = p.period() / 2048.0;
        NoiseTrace trace;
        trace.dt = dt;
        trace.psd_descriptor = Psd{BandLimitedWhite{0.0, 1.0}};
        trace.samples.assign(static_cast<std::size_t>(std::llround(t_f / dt)) + 1, eps);
        const auto oracle = ermakov_ode_oracle(p, trace, t_f, dt);
        double worst = 0.0;
        double scale_max = 0.0;
        for (std::size_t k = 0; k < oracle.times.size(); k += 16) {
            const auto pert = ermakov_rho_perturbative(p, trace, oracle.times[k]);
            worst = std::max(worst, std::abs(pert.delta_rho - oracle.delta_rho[k]));
            scale_max = std::max(scale_max, std::abs(oracle.delta_rho[k]));
        }
        return PerturbativeError{worst / std::max(scale_max, 1e-300), worst};
    };
    const double eps1 = 1e-3 * p.omega0 * p.omega0;
    const auto err1 = perturbative_error(eps1);
    const auto err2 = perturbative_error(0.5 * eps1);
    r.check(err1.relative < 1e-2, "perturbative delta_rho relative error " +
                                      detail::num(err1.relative) +
                                      " at eps = 1e-3 w0^2 (tol 1e-2)");
    const double ratio = err1.absolute / std::max(err2.absolute, 1e-300);
    r.check(ratio >= 2.0 && ratio <= 8.0,
            "error scaling ratio err(eps)/err(eps/2) = " + detail::num(ratio) +
                " (expected 4, factor-2 band)");

    // (b) contrast closed form vs quadrature and Monte Carlo
    const Psd psd{LorentzianPair{2.0, p.omega0, 0.01}};  // S(w0) = 1
    QuadraticMonteCarloOptions mc;
    mc.n_trials = 10000;
    mc.master_seed = 0x9a2d30ULL;
    mc.dt = p.period() / 128.0;
    mc.synthesis.oversample = 400.0;
    mc.synthesis.tail_fraction = 2.5e-3;
    const auto report = quadratic_contrast(p, psd, ContrastMode::monte_carlo, mc);
    const double closed = *report.closed_form_value;
    const double quad = report.quadrature_value;
    const auto& est = *report.monte_carlo;
    r.check(detail::within_rel(quad, closed, 0.10),
            detail::rel_line("-E[log C] quadrature vs closed form", quad, closed, 0.10));
    r.check(std::abs(est.value - closed) <= 3.0 * est.standard_error,
            "-E[log C] MC " + detail::num(est.value) + " vs closed form " + detail::num(closed) +
                " (3 se = " + detail::num(3.0 * est.standard_error) + ")");
    r.details.push_back("    info: MC vs quadrature ground truth: " + detail::num(est.value) +
                        " vs " + detail::num(quad) + " (the pair that must agree)");
    r.check(std::abs(est.value - quad) <= 3.0 * est.standard_error,
            "-E[log C] MC vs quadrature (3 se = " + detail::num(3.0 * est.standard_error) + ")");

    // (c) squeeze unitarity
    double worst_overlap_change = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        SqueezeParams sq;
        sq.delta_rho = 0.02 * (uniform01(0x5eedULL, 2 * trial) - 0.5);
        sq.delta_rho_dot = 0.02 * (uniform01(0x5eedULL, 2 * trial + 1) - 0.5) * p.omega0;
        GaussianArmState a{complexd{1.3 * uniform01(7u, trial), -0.4}, 0.0};
        GaussianArmState b{complexd{-0.2, 0.9 * uniform01(11u, trial)}, 0.0};
        worst_overlap_change =
            std::max(worst_overlap_change, squeeze_unitarity_check(p, sq, a, b));
    }
    r.check(worst_overlap_change < 1e-8,
            "squeeze/shear overlap change " + detail::num(worst_overlap_change) + " (tol 1e-8)");
    return r;
}

/// 11. Spin purity and entropy for a decayed coherence e^{-Gamma}: purity
/// from eigenvalues is exact; the von Neumann entropy is compared against the
/// small-Gamma approximation S ~ Gamma.
inline CriterionResult criterion_11_entropy_purity() {
    CriterionResult r{11, "spin purity and entropy for off-diagonal decay e^{-Gamma}"};
    for (double gamma_tot : {0.01, 0.1}) {
        // contrast 1, dephasing variance 2 Gamma gives corner factor e^{-Gamma}
        const auto rho = spin_density(0.0, 2.0 * gamma_tot, 1.0);
        const auto [purity, entropy] = purity_and_entropy(rho);
        const double exact_purity = 0.5 * (1.0 + std::exp(-2.0 * gamma_tot));
        r.check(std::abs(purity - exact_purity) <= 1e-12,
                "purity(Gamma = " + detail::num(gamma_tot) + ") = " + detail::num(purity) +
                    " vs (1 + C^2 e^{-sigma^2})/2 = " + detail::num(exact_purity));
        const double tol = gamma_tot < 0.05 ? 0.05 : 0.15;
        r.check(detail::within_rel(entropy, gamma_tot, tol),
                detail::rel_line("entropy(Gamma = " + detail::num(gamma_tot) + ") vs Gamma",
                                 entropy, gamma_tot, tol));
    }
    if (!r.passed) {
        r.details.push_back(
            "    note: the small-Gamma linearisation matches the linear entropy 1 - Tr[rho^2] "
            "(which is within the stated tolerances), but the von Neumann entropy carries the "
            "extra -lambda ln(lambda) weight of the small eigenvalue, S ~ (Gamma/2) ln(1/Gamma); "
            "the approximation S ~ Gamma cannot hold at these tolerances.");
    }
    return r;
}

/// 12. Total-derivative identity: the trajectory-fluctuation phase channel
/// equals its boundary term, so dephasing uses unperturbed trajectories only.
inline CriterionResult criterion_12_total_derivative() {
    CriterionResult r{12, "total-derivative identity for the trajectory-fluctuation phase channel"};
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{0.1, 3.0}};
    const double t_f = p.period();
    // the identity holds pointwise; the residual is pure trapezoid error,
    // O(dt^2), so the grid must be fine enough for the 1e-6 budget
    const double dt = p.period() / 8192.0;
    const std::size_t n = static_cast<std::size_t>(std::llround(t_f / dt)) + 1;

    SynthesisOptions opt;
    opt.oversample = 16.0;

    double worst = 0.0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const auto noise = synthesize(psd, t_f, dt, mix_seed(0x7d1e57ULL, trial), opt);
        const auto drive = constant_gradient_drive(p, p.amplitude_plus(), n);
        const auto ideal = ideal_trajectories(p, t_f, dt).first;
        const auto perturbed =
            integrate_trajectory(p, drive, dt, &noise, 0.0, 0.0, DriveLabel::plus);
        const auto check = total_derivative_check(p, ideal, perturbed, drive);
        worst = std::max(worst, std::abs(check.channel_integral - check.boundary_term) /
                                    check.dominant_scale);
    }
    r.check(worst <= 1e-6,
            "worst |channel - boundary| / dominant scale = " + detail::num(worst) +
                " over 100 realizations (tol 1e-6)");
    return r;
}

inline std::vector<CriterionResult> run_all(const std::vector<int>& only = {}) {
    using Fn = CriterionResult (*)();
    const Fn criteria[] = {
        criterion_01_wiener_khinchin,  criterion_02_dephasing_linear_response,
        criterion_03_transfer_asymptotics, criterion_04_residue_closed_forms,
        criterion_05_diffusion_regimes, criterion_06_ramsey_layer,
        criterion_07_master_equation,  criterion_08_common_mode,
        criterion_09_magnetic_noise,   criterion_10_quadratic_noise,
        criterion_11_entropy_purity,   criterion_12_total_derivative,
    };
    std::vector<CriterionResult> results;
    for (int id = 1; id <= 12; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        results.push_back(criteria[id - 1]());
    }
    return results;
}

inline int print_and_return_exit_code(const std::vector<CriterionResult>& results,
                                      std::ostream& os, bool verbose) {
    bool all_ok = true;
    for (const auto& res : results) {
        os << (res.passed ? "PASS" : "FAIL") << "  criterion " << res.id << ": " << res.name
           << "\n";
        if (verbose || !res.passed)
            for (const auto& line : res.details) os << line << "\n";
        all_ok = all_ok && res.passed;
    }
    os << (all_ok ? "all criteria passed" : "one or more criteria failed") << "\n";
    return all_ok ? 0 : 3;
}

}  // namespace sgn::validation
