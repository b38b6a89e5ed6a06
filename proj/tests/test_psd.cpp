#include <catch2/catch_amalgamated.hpp>

#include "sgnoise/psd.hpp"
#include "sgnoise/rng.hpp"

using namespace sgn;

// =============================================================================
// Model evaluation
// =============================================================================

TEST_CASE("band-limited white density", "[psd]") {
    const Psd psd{BandLimitedWhite{1.0, 10.0}};
    CHECK(evaluate_psd(psd, 5.0) == 1.0);
    CHECK(evaluate_psd(psd, 11.0) == 0.0);
    CHECK(evaluate_psd(psd, -5.0) == 1.0);
}

TEST_CASE("evenness holds exactly for random frequencies", "[psd]") {
    const std::vector<Psd> models = {
        Psd{BandLimitedWhite{1.3, 4.0}}, Psd{LorentzianPair{0.7, 2.0, 0.3}},
        Psd{PowerLaw{1.0, 1.5, 0.2, 40.0}}, Psd{GaussianBump{2.0, 3.0, 0.5}}};
    for (const auto& psd : models) {
        for (int k = 0; k < 1000; ++k) {
            const double w = 50.0 * (uniform01(0xabcdULL, k) - 0.5);
            CHECK(evaluate_psd(psd, w) == evaluate_psd(psd, -w));
        }
    }
}

TEST_CASE("densities are non-negative", "[psd]") {
    const std::vector<Psd> models = {
        Psd{BandLimitedWhite{1.3, 4.0}}, Psd{LorentzianPair{0.7, 2.0, 0.3}},
        Psd{PowerLaw{1.0, 1.5, 0.2, 40.0}}, Psd{GaussianBump{2.0, 3.0, 0.5}}};
    for (const auto& psd : models)
        for (int k = 0; k < 300; ++k)
            CHECK(evaluate_psd(psd, 60.0 * uniform01(0x77ULL, k)) >= 0.0);
}

// =============================================================================
// Total power
// =============================================================================

TEST_CASE("total power shortcuts", "[psd]") {
    CHECK(total_power(Psd{BandLimitedWhite{2.0, 5.0}}) == Catch::Approx(20.0));
    // Lorentzian pair integrates to pi gamma S0 = 0.314159...
    CHECK(total_power(Psd{LorentzianPair{1.0, 1.0, 0.1}}) ==
          Catch::Approx(0.3141592653589793).epsilon(1e-12));
}

TEST_CASE("analytic power matches quadrature to 1e-9 relative", "[psd]") {
    const std::vector<Psd> models = {
        Psd{BandLimitedWhite{2.0, 5.0}}, Psd{LorentzianPair{1.0, 1.0, 0.1}},
        Psd{LorentzianPair{0.5, 3.0, 1.2}}, Psd{GaussianBump{1.7, 2.5, 0.4}},
        Psd{PowerLaw{1.0, 2.0, 0.5, 20.0}}};
    for (const auto& psd : models) {
        const double analytic = total_power_analytic(psd);
        const double quad = total_power_quadrature(psd).value;
        CHECK(std::abs(analytic - quad) <= 1e-9 * std::abs(analytic));
    }
}

TEST_CASE("degenerate power-law cutoff is rejected", "[psd]") {
    const Psd psd{PowerLaw{1.0, 1.5, 0.0, 10.0}};
    CHECK_THROWS_AS(total_power_analytic(psd), numeric_error);
    CHECK_THROWS_AS(total_power_quadrature(psd), numeric_error);
}

// =============================================================================
// Autocorrelation target and config parsing
// =============================================================================

TEST_CASE("lorentzian autocorrelation target is the damped cosine", "[psd]") {
    const double s0 = 1.0, wc = 1.0, gamma = 0.1;
    const Psd psd{LorentzianPair{s0, wc, gamma}};
    const double r0 = pi * gamma * s0;
    for (double tau : {0.0, 1.0, 5.0, 12.0, 25.0}) {
        const double expected = r0 * std::cos(wc * tau) * std::exp(-gamma * std::abs(tau));
        CHECK(autocorrelation_target(psd, tau) == Catch::Approx(expected).margin(2e-3 * r0));
    }
}

TEST_CASE("psd from name and parameter map", "[psd]") {
    const Psd psd = make_psd("lorentzian-pair", {{"s0", 1.0}, {"w_c", 2.0}, {"gamma", 0.2}});
    CHECK(model_name(psd) == "lorentzian-pair");
    CHECK(evaluate_psd(psd, 2.0) == Catch::Approx(0.5).epsilon(1e-2));
    CHECK_THROWS_AS(make_psd("lorentzian-pair", {{"s0", 1.0}}), config_error);
    CHECK_THROWS_AS(make_psd("unknown-model", {}), config_error);
    CHECK_THROWS_AS(make_psd("gaussian-bump", {{"s0", 1.0}, {"w_c", -2.0}, {"width", 0.1}}),
                    config_error);
}
