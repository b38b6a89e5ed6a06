#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/noise_synthesis.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/phase.hpp"
#include "sgnoise/quadratic_noise.hpp"
#include "sgnoise/rng.hpp"
#include "sgnoise/spin.hpp"
#include "sgnoise/trajectory.hpp"
#include "sgnoise/transfer.hpp"
#include "sgnoise/variance.hpp"

namespace sgn {

enum class NoiseKind { acceleration, magnetic_gradient, quadratic };
enum class ArmCorrelation { common_mode, independent, anti_correlated };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::acceleration: return "acceleration";
        case NoiseKind::magnetic_gradient: return "magnetic-gradient";
        default: return "quadratic";
    }
}

inline std::string to_string(ArmCorrelation c) {
    switch (c) {
        case ArmCorrelation::common_mode: return "common-mode";
        case ArmCorrelation::independent: return "independent";
        default: return "anti-correlated";
    }
}

/// Everything a Monte Carlo run needs, serializable to/from JSON for
/// provenance.
struct ScenarioConfig {
    PhysParams params;
    NoiseKind noise_kind = NoiseKind::acceleration;
    Psd psd;
    std::size_t n_trials = 1000;
    double t_final = 0.0;  ///< 0 = default 2 pi N / w0
    double dt = 0.0;       ///< 0 = default period / 128
    std::uint64_t master_seed = 1;
    ArmCorrelation arm_correlation = ArmCorrelation::common_mode;
    double phi_diff_ideal = 0.0;  ///< bookkeeping value of the signal phase
    std::vector<std::string> outputs;  ///< empty = all quantities
    SynthesisOptions synthesis{};
    std::size_t max_samples_per_trace = 4'000'000;
    unsigned threads = 0;  ///< 0 = hardware concurrency

    double resolved_t_final() const {
        return t_final > 0.0 ? t_final : params.default_final_time();
    }
    double resolved_dt() const { return dt > 0.0 ? dt : params.period() / 128.0; }

    void validate() const {
        params.validate();
        if (n_trials < 1) throw config_error("scenario.n_trials: must be >= 1");
        if (t_final < 0.0) throw config_error("scenario.t_f: must be positive (or 0 for default)");
        if (dt < 0.0) throw config_error("scenario.dt: must be positive (or 0 for default)");
        if (resolved_dt() >= resolved_t_final())
            throw config_error("scenario.dt: must be smaller than t_f");
        if (resolved_t_final() / resolved_dt() > double(max_samples_per_trace))
            throw config_error("scenario.dt: t_f/dt exceeds the per-trace sample cap");
    }
};

struct QuantityStats {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t n = 0;
};

/// Per-quantity ensemble statistics plus the matching analytic references.
struct EnsembleStats {
    std::map<std::string, QuantityStats> quantities;
    /// |E[e^{i dphi}]| and a conservative propagated standard error.
    double dephasing_factor = 1.0;
    double dephasing_factor_stderr = 0.0;
};

struct AnalyticReference {
    std::optional<double> quadrature;
    std::optional<double> closed_form;
    std::string units;
};

struct ScenarioReport {
    EnsembleStats stats;
    std::map<std::string, AnalyticReference> references;
};

namespace detail {

struct TrialRecord {
    double delta_phi = 0.0;
    double abs_dalpha_sq = 0.0;      // single arm (plus)
    double neg_log_contrast = 0.0;   // |dAlpha_plus - dAlpha_minus|^2 / 2
    double witness = 0.0;
    double cos_phi = 1.0;
    double sin_phi = 0.0;
};

inline QuantityStats reduce(const std::vector<double>& values) {
    QuantityStats out;
    out.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / double(values.size());
    double m2 = 0.0;
    for (double v : values) m2 += (v - out.mean) * (v - out.mean);
    out.variance = values.size() > 1 ? m2 / double(values.size() - 1) : 0.0;
    out.stderr_of_mean = std::sqrt(out.variance / double(values.size()));
    return out;
}

template <typename TrialFn>
inline std::vector<TrialRecord> run_trials(const ScenarioConfig& config, TrialFn&& trial) {
    std::vector<TrialRecord> records(config.n_trials);
    unsigned n_threads = config.threads > 0 ? config.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(1, config.n_trials));

    if (n_threads == 1) {
        for (std::size_t j = 0; j < config.n_trials; ++j) records[j] = trial(j);
        return records;
    }
    // static contiguous partition; each trial is a pure function of
    // (config, index), so the result is identical for any thread count
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (config.n_trials + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(config.n_trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (std::size_t j = lo; j < hi; ++j) records[j] = trial(j);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return records;
}

inline EnsembleStats reduce_records(const std::vector<TrialRecord>& records) {
    EnsembleStats stats;
    auto collect = [&records](auto&& get) {
        std::vector<double> v(records.size());
        for (std::size_t j = 0; j < records.size(); ++j) v[j] = get(records[j]);
        return v;
    };

    const auto dphi = collect([](const TrialRecord& r) { return r.delta_phi; });
    stats.quantities["delta_phi"] = reduce(dphi);

    // sample variance of delta_phi as its own quantity, stderr ~ s^2 sqrt(2/(n-1))
    QuantityStats sigma;
    sigma.n = records.size();
    sigma.mean = stats.quantities["delta_phi"].variance;
    sigma.variance = 0.0;
    sigma.stderr_of_mean =
        records.size() > 1 ? sigma.mean * std::sqrt(2.0 / double(records.size() - 1)) : 0.0;
    stats.quantities["sigma_phi_sq"] = sigma;

    stats.quantities["abs_delta_alpha_sq"] =
        reduce(collect([](const TrialRecord& r) { return r.abs_dalpha_sq; }));
    stats.quantities["neg_log_contrast"] =
        reduce(collect([](const TrialRecord& r) { return r.neg_log_contrast; }));
    stats.quantities["contrast"] =
        reduce(collect([](const TrialRecord& r) { return std::exp(-r.neg_log_contrast); }));

    // exp(E[log C]): the alternative contrast estimator, reported so the gap
    // between the two averaging orders is visible instead of hidden
    QuantityStats exp_log;
    const auto nlc = stats.quantities["neg_log_contrast"];
    exp_log.n = nlc.n;
    exp_log.mean = std::exp(-nlc.mean);
    exp_log.variance = 0.0;
    exp_log.stderr_of_mean = exp_log.mean * nlc.stderr_of_mean;
    stats.quantities["contrast_exp_mean_log"] = exp_log;

    stats.quantities["witness"] =
        reduce(collect([](const TrialRecord& r) { return r.witness; }));

    const auto cosv = reduce(collect([](const TrialRecord& r) { return r.cos_phi; }));
    const auto sinv = reduce(collect([](const TrialRecord& r) { return r.sin_phi; }));
    stats.dephasing_factor = std::hypot(cosv.mean, sinv.mean);
    stats.dephasing_factor_stderr = std::hypot(cosv.stderr_of_mean, sinv.stderr_of_mean);

    QuantityStats deph;
    deph.n = records.size();
    deph.mean = stats.dephasing_factor;
    deph.stderr_of_mean = stats.dephasing_factor_stderr;
    stats.quantities["dephasing_factor"] = deph;
    return stats;
}

}  // namespace detail

/// Scale the spectral density of a PSD by a constant factor (unit conversion
/// between noise channels).
inline Psd scale_psd(const Psd& psd, double factor) {
    Psd out = psd;
    std::visit([factor](auto& m) { m.s0 *= factor; }, out.model);
    return out;
}

/// Monte Carlo ensemble for acceleration noise on the constant-gradient
/// interferometer, bundled with the matching quadrature and closed-form
/// references. Trial j derives its seed as mix(master_seed, j); trials are
/// independent and order-insensitive.
inline ScenarioReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    if (config.noise_kind != NoiseKind::acceleration)
        throw config_error("run_scenario: noise_kind must be 'acceleration'");

    const PhysParams& p = config.params;
    const double t_f = config.resolved_t_final();
    const double dt = config.resolved_dt();
    const auto arms = ideal_trajectories(p, t_f, dt);

    auto trial = [&](std::size_t j) {
        detail::TrialRecord rec;
        const std::uint64_t seed_j = mix_seed(config.master_seed, j);
        complexd dalpha_plus, dalpha_minus;
        switch (config.arm_correlation) {
            case ArmCorrelation::common_mode: {
                const auto trace = synthesize(config.psd, t_f, dt, seed_j, config.synthesis);
                rec.delta_phi = delta_phi(p, trace, arms.first, arms.second);
                dalpha_plus = delta_alpha(p, trace, t_f);
                dalpha_minus = dalpha_plus;  // identical coupling, identical response
                break;
            }
            case ArmCorrelation::independent: {
                const auto trace_p =
                    synthesize(config.psd, t_f, dt, mix_seed(seed_j, 1), config.synthesis);
                const auto trace_m =
                    synthesize(config.psd, t_f, dt, mix_seed(seed_j, 2), config.synthesis);
                rec.delta_phi = phase_fluctuation_single(p, trace_p, arms.first) -
                                phase_fluctuation_single(p, trace_m, arms.second);
                dalpha_plus = delta_alpha(p, trace_p, t_f);
                dalpha_minus = delta_alpha(p, trace_m, t_f);
                break;
            }
            case ArmCorrelation::anti_correlated: {
                const auto trace = synthesize(config.psd, t_f, dt, seed_j, config.synthesis);
                const auto flipped = scale(trace, -1.0);
                rec.delta_phi = phase_fluctuation_single(p, trace, arms.first) -
                                phase_fluctuation_single(p, flipped, arms.second);
                dalpha_plus = delta_alpha(p, trace, t_f);
                dalpha_minus = -dalpha_plus;
                break;
            }
        }
        rec.abs_dalpha_sq = std::norm(dalpha_plus);
        rec.neg_log_contrast = 0.5 * std::norm(dalpha_plus - dalpha_minus);
        const double phi = config.phi_diff_ideal + rec.delta_phi;
        rec.cos_phi = std::cos(rec.delta_phi);
        rec.sin_phi = std::sin(rec.delta_phi);
        rec.witness = 0.5 * (1.0 + std::exp(-rec.neg_log_contrast) * std::cos(phi));
        return rec;
    };

    ScenarioReport report;
    report.stats = detail::reduce_records(detail::run_trials(config, trial));

    const auto sigma_quad = dephasing_variance_quadrature(p, config.psd);
    report.references["sigma_phi_sq"] = {sigma_quad.quadrature_value,
                                         dephasing_variance_residue(p, config.psd), "rad^2"};
    const auto alpha_quad = displacement_variance_quadrature(p, config.psd, t_f);
    report.references["abs_delta_alpha_sq"] = {alpha_quad.quadrature_value,
                                               displacement_variance_closed_form(p, config.psd),
                                               "dimensionless"};
    double contrast_variance = 0.0;  // E|dAlpha_plus - dAlpha_minus|^2
    switch (config.arm_correlation) {
        case ArmCorrelation::common_mode: contrast_variance = 0.0; break;
        case ArmCorrelation::independent: contrast_variance = 2.0 * alpha_quad.quadrature_value; break;
        case ArmCorrelation::anti_correlated: contrast_variance = 4.0 * alpha_quad.quadrature_value; break;
    }
    report.references["neg_log_contrast"] = {0.5 * contrast_variance, std::nullopt,
                                             "dimensionless"};
    report.references["dephasing_factor"] = {std::exp(-0.5 * sigma_quad.quadrature_value),
                                             std::nullopt, "dimensionless"};
    report.references["witness"] = {
        0.5 * (1.0 + std::exp(-0.5 * contrast_variance - 0.5 * sigma_quad.quadrature_value) *
                         std::cos(config.phi_diff_ideal)),
        std::nullopt, "dimensionless"};
    return report;
}

/// Magnetic-gradient noise: the arms couple with opposite sign,
/// da_pm = +- g mu_B d eta / m, so dephasing runs through the sum of the
/// trajectories (identically zero for the unbiased constant gradient) while
/// the arm displacements add, Delta alpha = 2 dalpha_plus.
inline ScenarioReport run_magnetic_scenario(const ScenarioConfig& config) {
    config.validate();
    if (config.noise_kind != NoiseKind::magnetic_gradient)
        throw config_error("run_magnetic_scenario: noise_kind must be 'magnetic-gradient'");

    const PhysParams& p = config.params;
    const double t_f = config.resolved_t_final();
    const double dt = config.resolved_dt();
    const auto arms = ideal_trajectories(p, t_f, dt);
    const double coupling = p.g_nv * p.mu_b / p.mass;  // d eta -> acceleration

    auto trial = [&](std::size_t j) {
        detail::TrialRecord rec;
        const std::uint64_t seed_j = mix_seed(config.master_seed, j);
        const auto eta_trace = synthesize(config.psd, t_f, dt, seed_j, config.synthesis);
        const auto accel_plus = scale(eta_trace, coupling);

        // (m/hbar) Int da_+ x_+ - da_- x_- dt = (g mu / hbar) Int d_eta (x_+ + x_-) dt
        rec.delta_phi = phase_fluctuation_single(p, accel_plus, arms.first) -
                        phase_fluctuation_single(p, scale(accel_plus, -1.0), arms.second);
        const complexd dalpha_plus = delta_alpha(p, accel_plus, t_f);
        rec.abs_dalpha_sq = std::norm(dalpha_plus);
        rec.neg_log_contrast = 0.5 * std::norm(2.0 * dalpha_plus);
        const double phi = config.phi_diff_ideal + rec.delta_phi;
        rec.cos_phi = std::cos(rec.delta_phi);
        rec.sin_phi = std::sin(rec.delta_phi);
        rec.witness = 0.5 * (1.0 + std::exp(-rec.neg_log_contrast) * std::cos(phi));
        return rec;
    };

    ScenarioReport report;
    report.stats = detail::reduce_records(detail::run_trials(config, trial));

    // dephasing reference through the sum-of-trajectories filter
    ArmTrajectory minus_flipped = arms.second;
    for (auto& x : minus_flipped.x) x = -x;
    for (auto& v : minus_flipped.v) v = -v;
    const double w_span = std::min(support_cutoff(config.psd, 1e-6), 0.8 * pi / dt);
    const auto sum_transfer = transfer_from_trajectories(arms.first, minus_flipped, w_span);
    const double pref = std::pow(p.g_nv * p.mu_b / p.hbar, 2);
    const auto sigma_sum = variance_from_psd(config.psd, sum_transfer, pref);
    report.references["sigma_phi_sq"] = {sigma_sum.quadrature_value, 0.0, "rad^2"};

    // contrast: |2 dalpha|^2 variance from the displacement quadrature with the
    // PSD mapped into acceleration units, against the resonant closed form
    const Psd accel_psd = scale_psd(config.psd, 4.0 * coupling * coupling);
    const auto dalpha_var = displacement_variance_quadrature(p, accel_psd, t_f);
    const double closed =
        p.mass * std::pow(p.g_nv * p.mu_b, 2) * evaluate_psd(config.psd, p.omega0) /
        (p.hbar * p.omega0);
    report.references["neg_log_contrast"] = {0.5 * dalpha_var.quadrature_value, closed,
                                             "dimensionless"};
    report.references["abs_delta_alpha_sq"] = {0.25 * dalpha_var.quadrature_value, std::nullopt,
                                               "dimensionless"};
    return report;
}

/// Quadratic (trap-frequency) noise ensemble; see quadratic_contrast for the
/// per-trial mathematics.
inline ScenarioReport run_quadratic_scenario(const ScenarioConfig& config) {
    config.validate();
    if (config.noise_kind != NoiseKind::quadratic)
        throw config_error("run_quadratic_scenario: noise_kind must be 'quadratic'");

    const PhysParams& p = config.params;
    const double t_f = config.resolved_t_final();
    const double dt = config.resolved_dt();
    const auto arms = ideal_trajectories(p, t_f, dt);

    auto trial = [&](std::size_t j) {
        detail::TrialRecord rec;
        const auto trace =
            synthesize(config.psd, t_f, dt, mix_seed(config.master_seed, j), config.synthesis);
        const complexd da_q = delta_alpha_quadratic(p, trace, arms.first, arms.second, t_f);
        rec.neg_log_contrast = 0.5 * std::norm(da_q);
        rec.abs_dalpha_sq = std::norm(da_q);
        rec.witness =
            0.5 * (1.0 + std::exp(-rec.neg_log_contrast) * std::cos(config.phi_diff_ideal));
        return rec;
    };

    ScenarioReport report;
    report.stats = detail::reduce_records(detail::run_trials(config, trial));
    const auto contrast = quadratic_contrast(p, config.psd, ContrastMode::quadrature);
    report.references["neg_log_contrast"] = {contrast.quadrature_value,
                                             contrast.closed_form_value, "dimensionless"};
    return report;
}

/// Dispatch on noise kind.
inline ScenarioReport run_any_scenario(const ScenarioConfig& config) {
    switch (config.noise_kind) {
        case NoiseKind::acceleration: return run_scenario(config);
        case NoiseKind::magnetic_gradient: return run_magnetic_scenario(config);
        default: return run_quadratic_scenario(config);
    }
}

}  // namespace sgn
