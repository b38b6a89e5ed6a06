#include <catch2/catch_amalgamated.hpp>

#include "sgnoise/noise_synthesis.hpp"

using namespace sgn;

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

}  // namespace

// =============================================================================
// Determinism and trivial cases
// =============================================================================

TEST_CASE("synthesis is a pure function of (psd, duration, dt, seed)", "[synth]") {
    const Psd psd{LorentzianPair{1.0, 1.0, 0.1}};
    const auto a = synthesize(psd, 30.0, 0.05, 42);
    const auto b = synthesize(psd, 30.0, 0.05, 42);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k] == b.samples[k]);

    const auto c = synthesize(psd, 30.0, 0.05, 43);
    bool any_different = false;
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        any_different = any_different || (a.samples[k] != c.samples[k]);
    CHECK(any_different);
}

TEST_CASE("zero PSD gives the zero trace", "[synth]") {
    const Psd psd{BandLimitedWhite{0.0, 5.0}};
    const auto trace = synthesize(psd, 10.0, 0.1, 7);
    for (double s : trace.samples) CHECK(s == 0.0);
}

TEST_CASE("preconditions are enforced", "[synth]") {
    const Psd psd{BandLimitedWhite{1.0, 5.0}};
    CHECK_THROWS_AS(synthesize(psd, 0.05, 0.1, 1), config_error);  // duration < 2 dt
    SynthesisOptions opt;
    opt.sample_cap = 10;
    CHECK_THROWS_AS(synthesize(psd, 10.0, 0.001, 1, opt), config_error);
    opt = SynthesisOptions{};
    opt.oversample = 2.0;
    CHECK_THROWS_AS(synthesize(psd, 10.0, 0.1, 1, opt), config_error);
}

TEST_CASE("coarse grids trigger the Nyquist warning", "[synth]") {
    const Psd psd{BandLimitedWhite{1.0, 50.0}};
    std::vector<std::string> captured;
    auto previous = warning_sink();
    warning_sink() = [&captured](const std::string& msg) { captured.push_back(msg); };
    synthesize(psd, 10.0, 0.5, 3);  // Nyquist pi/dt ~ 6.3 < support 50
    warning_sink() = previous;
    REQUIRE(!captured.empty());
    CHECK(captured.front().find("Nyquist") != std::string::npos);
}

// =============================================================================
// Ensemble statistics
// =============================================================================

TEST_CASE("pooled sample variance approaches the PSD power", "[synth][stat]") {
    const Psd psd{LorentzianPair{1.0, 1.0, 0.1}};
    const double target = total_power_analytic(psd);  // pi gamma S0 = 0.3141...
    const std::size_t n_traces = 2000;

    SynthesisOptions opt;
    opt.oversample = 4.0;
    opt.tail_fraction = 2.5e-3;

    std::vector<double> per_trace(n_traces);
    for (std::size_t j = 0; j < n_traces; ++j) {
        const auto trace = synthesize(psd, 20.0, 0.1, mix_seed(0xfeedULL, j), opt);
        double acc = 0.0;
        for (double s : trace.samples) acc += s * s;
        per_trace[j] = acc / double(trace.samples.size());
    }
    const double mean = mean_of(per_trace);
    double var = 0.0;
    for (double v : per_trace) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / double(n_traces - 1) / double(n_traces));
    CHECK(std::abs(mean - target) <= 3.0 * se + 5e-3 * target);
}

TEST_CASE("marginal at fixed time passes the normality check", "[synth][stat]") {
    const Psd psd{LorentzianPair{1.0, 1.0, 0.1}};
    const std::size_t n = 10000;
    SynthesisOptions opt;
    // the peak must carry many modes or the marginal degenerates towards a
    // single-cosine (arcsine) law; dw ~ gamma/30 here
    opt.oversample = 512.0;
    opt.tail_fraction = 5e-3;

    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto trace = synthesize(psd, 4.0, 0.25, mix_seed(0x6a55ULL, j), opt);
        samples[j] = trace.samples[trace.samples.size() / 2];
    }
    const double mean = mean_of(samples);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= double(n);
    m3 /= double(n);
    m4 /= double(n);
    const double skew = m3 / std::pow(m2, 1.5);
    const double excess_kurtosis = m4 / (m2 * m2) - 3.0;
    CHECK(std::abs(skew) < 0.1);
    CHECK(std::abs(excess_kurtosis) < 0.2);
}

// =============================================================================
// Autocorrelation estimator
// =============================================================================

TEST_CASE("autocorrelation estimator preconditions", "[synth]") {
    CHECK_THROWS_AS(sample_autocorrelation({}, 1.0), config_error);
    const Psd psd{BandLimitedWhite{1.0, 3.0}};
    const auto a = synthesize(psd, 10.0, 0.1, 1);
    CHECK_THROWS_AS(sample_autocorrelation({a}, 1.0), config_error);
    const auto b = synthesize(psd, 10.0, 0.05, 2);
    CHECK_THROWS_AS(sample_autocorrelation({a, b}, 1.0), grid_mismatch_error);
}

TEST_CASE("pooled autocorrelation tracks the damped-cosine target", "[synth][stat]") {
    const double gamma = 0.1;
    const Psd psd{LorentzianPair{1.0, 1.0, gamma}};
    const std::size_t n_traces = 400;
    SynthesisOptions opt;
    opt.oversample = 4.0;
    opt.tail_fraction = 5e-3;

    std::vector<NoiseTrace> traces(n_traces);
    for (std::size_t j = 0; j < n_traces; ++j)
        traces[j] = synthesize(psd, 100.0, 0.1, mix_seed(0xac0ULL, j), opt);
    const auto acf = sample_autocorrelation(traces, 3.0 / gamma);

    const double r0 = acf[0].second;
    CHECK(std::abs(r0 - total_power_analytic(psd)) <= 0.05 * total_power_analytic(psd));
    for (std::size_t l = 0; l < acf.size(); l += 10) {
        const auto [tau, r] = acf[l];
        const double expected = std::cos(tau) * std::exp(-gamma * tau);
        CHECK(std::abs(r / r0 - expected) <= 0.05);
    }
}

// =============================================================================
// Trace combinators
// =============================================================================

TEST_CASE("combine and scale act pointwise", "[synth]") {
    const Psd psd{BandLimitedWhite{1.0, 3.0}};
    const auto a = synthesize(psd, 10.0, 0.1, 1);
    const auto b = synthesize(psd, 10.0, 0.1, 2);
    const auto sum = combine(a, 1.0, b, 2.0);
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        CHECK(sum.samples[k] == a.samples[k] + 2.0 * b.samples[k]);
    const auto neg = scale(a, -1.0);
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(neg.samples[k] == -a.samples[k]);
}
