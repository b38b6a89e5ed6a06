#pragma once

#include <cstdint>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/psd.hpp"
#include "sgnoise/rng.hpp"

namespace sgn {

/// One realization of a stationary Gaussian process on a uniform grid
/// t_k = k * dt, together with everything needed to regenerate it.
struct NoiseTrace {
    double dt = 0.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
    Psd psd_descriptor;

    std::size_t size() const { return samples.size(); }
    double duration() const { return samples.empty() ? 0.0 : dt * double(samples.size() - 1); }
    double time_at(std::size_t k) const { return dt * double(k); }

    bool same_grid(const NoiseTrace& other) const {
        return samples.size() == other.samples.size() &&
               std::abs(dt - other.dt) <= 1e-15 * std::max(dt, other.dt);
    }
};

struct SynthesisOptions {
    /// Frequency-grid oversampling relative to 2 pi / duration. Values above
    /// the minimum of 4 avoid spurious periodicity and shrink the Riemann
    /// mismatch between the mode sum and the continuum power integral.
    double oversample = 8.0;
    /// Fraction of PSD power allowed beyond the synthesis band.
    double tail_fraction = 1e-3;
    std::size_t sample_cap = 4'000'000;
};

/// Harmonic-superposition synthesis of a stationary Gaussian realization:
///
///   da(t_k) = sum_j A_j cos(w_j t_k + phi_j),   A_j = 2 sqrt(S(w_j) dw)
///
/// on the midpoint frequency grid w_j = (j + 1/2) dw, dw = 2 pi /
/// (oversample * duration). Phases are i.i.d. uniform on [0, 2 pi), drawn
/// from a counter-based generator keyed by `seed`, so the result is a pure
/// function of (psd, duration, dt, seed, options) and is bit-identical across
/// runs and thread counts. Var -> Integral S dw as dw -> 0.
inline NoiseTrace synthesize(const Psd& psd, double duration, double dt, std::uint64_t seed,
                             const SynthesisOptions& opt = {}) {
    if (!(dt > 0.0)) throw config_error("synthesize: dt must be positive");
    if (duration < 2.0 * dt) throw config_error("synthesize: duration must be >= 2 dt");
    if (opt.oversample < 4.0)
        throw config_error("synthesize: oversample factor must be >= 4");

    const std::size_t n = static_cast<std::size_t>(std::floor(duration / dt + 0.5)) + 1;
    if (n > opt.sample_cap)
        throw config_error("synthesize: duration/dt exceeds the sample cap");

    const double support = support_cutoff(psd, opt.tail_fraction);
    const double nyquist = pi / dt;
    if (nyquist < support)
        warn("synthesize: Nyquist frequency " + std::to_string(nyquist) +
             " rad/s is below the PSD support " + std::to_string(support) +
             " rad/s; band will be truncated at Nyquist");

    const double w_cut = std::min(support, nyquist);
    const double dw = 2.0 * pi / (opt.oversample * duration);
    const std::size_t n_modes = static_cast<std::size_t>(std::ceil(w_cut / dw));

    NoiseTrace trace;
    trace.dt = dt;
    trace.seed = seed;
    trace.psd_descriptor = psd;
    trace.samples.assign(n, 0.0);

    for (std::size_t j = 0; j < n_modes; ++j) {
        const double wj = (double(j) + 0.5) * dw;
        const double sj = evaluate_psd(psd, wj);
        if (sj <= 0.0) continue;
        const double amp = 2.0 * std::sqrt(sj * dw);
        const double phase = 2.0 * pi * uniform01(seed, j);
        // one complex rotation per sample; drift over ~1e6 steps is far below
        // the double roundoff floor of the accumulated sum
        const complexd step{std::cos(wj * dt), std::sin(wj * dt)};
        complexd phasor{amp * std::cos(phase), amp * std::sin(phase)};
        for (std::size_t k = 0; k < n; ++k) {
            trace.samples[k] += phasor.real();
            phasor *= step;
        }
    }
    return trace;
}

/// Pointwise linear combination of two traces on the same grid.
inline NoiseTrace combine(const NoiseTrace& a, double ca, const NoiseTrace& b, double cb) {
    if (!a.same_grid(b)) throw grid_mismatch_error("combine: traces on different grids");
    NoiseTrace out = a;
    for (std::size_t k = 0; k < out.samples.size(); ++k)
        out.samples[k] = ca * a.samples[k] + cb * b.samples[k];
    return out;
}

inline NoiseTrace scale(const NoiseTrace& a, double c) {
    NoiseTrace out = a;
    for (auto& s : out.samples) s *= c;
    return out;
}

/// Unbiased lag-averaged autocorrelation estimator pooled across traces.
/// Returns (tau, R(tau)) for tau = 0, dt, ..., max_lag. Compare against
/// autocorrelation_target(psd, tau) for the Wiener-Khinchin check.
inline std::vector<std::pair<double, double>> sample_autocorrelation(
    const std::vector<NoiseTrace>& traces, double max_lag) {
    if (traces.size() < 2)
        throw config_error("sample_autocorrelation: need at least two traces");
    for (const auto& t : traces)
        if (!t.same_grid(traces.front()))
            throw grid_mismatch_error("sample_autocorrelation: traces on different grids");

    const double dt = traces.front().dt;
    const std::size_t n = traces.front().size();
    std::size_t n_lags = static_cast<std::size_t>(std::floor(max_lag / dt)) + 1;
    if (n_lags > n) n_lags = n;

    std::vector<std::pair<double, double>> out(n_lags);
    for (std::size_t l = 0; l < n_lags; ++l) {
        double pooled = 0.0;
        for (const auto& t : traces) {
            double acc = 0.0;
            for (std::size_t k = 0; k + l < n; ++k) acc += t.samples[k] * t.samples[k + l];
            pooled += acc / double(n - l);
        }
        out[l] = {dt * double(l), pooled / double(traces.size())};
    }
    return out;
}

}  // namespace sgn
