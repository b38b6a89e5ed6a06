#include <catch2/catch_amalgamated.hpp>

#include "sgnoise/transfer.hpp"
#include "sgnoise/variance.hpp"

using namespace sgn;

// =============================================================================
// Transfer functions
// =============================================================================

TEST_CASE("identical arms give a vanishing filter", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 256.0);
    const auto f = transfer_from_trajectories(arms.first, arms.first, 5.0);
    for (double v : f.values) CHECK(v <= 1e-24);
}

TEST_CASE("FFT filter matches the closed form F_N on the bin grid", "[response]") {
    PhysParams p = PhysParams::natural(2);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 256.0);
    const auto f = transfer_from_trajectories(arms.first, arms.second, 5.0 * p.omega0);
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, v);
    double worst = 0.0;
    for (std::size_t j = 0; j < f.omegas.size(); ++j) {
        if (f.omegas[j] < 0.02) continue;
        const double ref = transfer_closed_form_FN(p, f.omegas[j]);
        worst = std::max(worst, std::abs(f.values[j] - ref) / (ref + 1e-9 * peak));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("scaling both arms scales the filter quadratically", "[response]") {
    PhysParams p = PhysParams::natural(1);
    auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 128.0);
    const auto f1 = transfer_from_trajectories(arms.first, arms.second, 4.0);
    const double c = 3.0;
    auto scaled_plus = arms.first;
    auto scaled_minus = arms.second;
    for (auto& x : scaled_plus.x) x *= c;
    for (auto& x : scaled_minus.x) x *= c;
    const auto f2 = transfer_from_trajectories(scaled_plus, scaled_minus, 4.0);
    for (std::size_t j = 0; j < f1.values.size(); j += 50)
        CHECK(f2.values[j] == Catch::Approx(c * c * f1.values[j]).epsilon(1e-12));
}

TEST_CASE("higher-order filter reduces to the linear one at n = 1", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 128.0);
    const auto f1 = transfer_from_trajectories(arms.first, arms.second, 4.0);
    const auto h1 = transfer_higher_order(arms.first, arms.second, 1, 4.0);
    for (std::size_t j = 0; j < f1.values.size(); j += 25)
        CHECK(h1.values[j] == Catch::Approx(f1.values[j]).margin(1e-18));
    CHECK_THROWS_AS(transfer_higher_order(arms.first, arms.second, 0, 4.0), config_error);
}

TEST_CASE("quadratic coupling filter: unbiased arms cancel, biased do not", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 128.0;
    const auto arms = ideal_trajectories(p, p.default_final_time(), dt);

    // x_minus = -x_plus, so the squares coincide and the n = 2 filter vanishes
    const auto h2 = transfer_higher_order(arms.first, arms.second, 2, 4.0);
    for (double v : h2.values) CHECK(v <= 1e-22);

    // a biased pair (A_minus != -A_plus) has distinct squares
    auto biased = arms.second;
    for (auto& x : biased.x) x *= 0.6;
    const auto h2b = transfer_higher_order(arms.first, biased, 2, 4.0);
    double peak = 0.0;
    for (double v : h2b.values) peak = std::max(peak, v);
    CHECK(peak > 1e-3);
}

// =============================================================================
// Closed-form filter
// =============================================================================

TEST_CASE("F_N limits and symmetry", "[response]") {
    PhysParams p = PhysParams::natural(3);
    const double da = p.delta_amplitude();
    const double n = 3.0;

    CHECK(transfer_closed_form_FN(p, 1e-4) ==
          Catch::Approx(4.0 * pi * pi * n * n * da * da).epsilon(1e-6));
    CHECK(transfer_closed_form_FN(p, 1.0) ==
          Catch::Approx(pi * pi * n * n * da * da).epsilon(1e-9));
    for (double w : {0.3, 0.9999, 1.0, 1.37, 5.0})
        CHECK(transfer_closed_form_FN(p, w) == transfer_closed_form_FN(p, -w));
    // continuity across the evaluation-branch seams
    for (double w : {0.5, 1.5}) {
        const double below = transfer_closed_form_FN(p, w - 1e-9);
        const double above = transfer_closed_form_FN(p, w + 1e-9);
        CHECK(below == Catch::Approx(above).epsilon(1e-6));
    }
}

// =============================================================================
// Variance quadrature
// =============================================================================

TEST_CASE("variance vanishes for a zero PSD and scales with the prefactor", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 128.0);
    const auto f = transfer_from_trajectories(arms.first, arms.second, 6.0);

    const Psd zero{BandLimitedWhite{0.0, 3.0}};
    CHECK(variance_from_psd(zero, f, 1.0).quadrature_value == 0.0);

    const Psd psd{LorentzianPair{0.1, 1.0, 0.3}};
    const auto v1 = variance_from_psd(psd, f, 1.0);
    const auto v2 = variance_from_psd(psd, f, 2.0);
    CHECK(v2.quadrature_value == Catch::Approx(2.0 * v1.quadrature_value).epsilon(1e-12));
}

TEST_CASE("two routes to the dephasing integral agree within 0.5%", "[response]") {
    PhysParams p = PhysParams::natural(2);
    const Psd psd{LorentzianPair{0.1, 1.0, 0.3}};
    const double pref = (p.mass / p.hbar) * (p.mass / p.hbar);

    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 256.0);
    const auto fft_route = transfer_from_trajectories(arms.first, arms.second, 6.0);
    const auto closed_route = transfer_closed_form_grid(p, fft_route.omegas);

    const double v_fft = variance_from_psd(psd, fft_route, pref).quadrature_value;
    const double v_closed = variance_from_psd(psd, closed_route, pref).quadrature_value;
    CHECK(std::abs(v_fft - v_closed) <= 5e-3 * v_closed);

    // and the gridded route against the fully adaptive analytic quadrature
    const double v_analytic = dephasing_variance_quadrature(p, psd).quadrature_value;
    CHECK(std::abs(v_closed - v_analytic) <= 5e-3 * v_analytic);
}

TEST_CASE("hard truncation of the PSD support is rejected", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 128.0);
    const auto f = transfer_from_trajectories(arms.first, arms.second, 2.0);
    const Psd wide{BandLimitedWhite{1.0, 50.0}};  // 96% of the power beyond the grid
    CHECK_THROWS_AS(variance_from_psd(wide, f, 1.0), numeric_error);
}

// =============================================================================
// Displacement variance and diffusion coefficients
// =============================================================================

TEST_CASE("displacement variance: trivial and identity checks", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const Psd zero{BandLimitedWhite{0.0, 3.0}};
    CHECK(displacement_variance_quadrature(p, zero, 1.0).quadrature_value == 0.0);

    // closed form equals D2 t_f exactly (algebraic identity)
    for (int n_periods : {1, 2, 5}) {
        PhysParams pn = PhysParams::natural(n_periods);
        const Psd psd{LorentzianPair{0.7, 1.0, 0.4}};
        CHECK(displacement_variance_closed_form(pn, psd) ==
              Catch::Approx(diffusion_d2(pn, psd) * pn.default_final_time()).epsilon(1e-14));
    }
}

TEST_CASE("broadband displacement variance approaches the closed form", "[response]") {
    // for a PSD flat across the filter lobes the resonant approximation is the
    // right answer; this is its validity regime
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{0.3, 5.0}};
    const double t = 200.0 / p.omega0;
    const auto quad = displacement_variance_quadrature(p, psd, t);
    CHECK(quad.quadrature_value == Catch::Approx(diffusion_d2(p, psd) * t).epsilon(0.01));
}

// =============================================================================
// Residue master integral
// =============================================================================

TEST_CASE("master integral: zero at vanishing resonance density, linear in amplitude",
          "[response]") {
    PhysParams p = PhysParams::natural(2);
    const Psd off_resonance{GaussianBump{1.0, 4.0, 0.1}};  // S(w0) ~ e^{-450}
    const auto rep = residue_master_integral(off_resonance, p, 1.0);
    CHECK(std::abs(rep.closed_form) < 1e-100);

    const Psd psd{LorentzianPair{1.0, 1.0, 0.3}};
    const auto r1 = residue_master_integral(psd, p, 1.0);
    const auto r2 = residue_master_integral(psd, p, 2.0);
    CHECK(r2.closed_form == Catch::Approx(2.0 * r1.closed_form).epsilon(1e-14));
    CHECK(r2.quadrature == Catch::Approx(2.0 * r1.quadrature).epsilon(1e-12));
}

TEST_CASE("master integral quadrature against a brute-force Riemann oracle", "[response]") {
    PhysParams p = PhysParams::natural(2);
    const Psd psd{LorentzianPair{1.0, 1.0, 0.3}};
    const auto rep = residue_master_integral(psd, p, 1.0);

    // independent oracle: plain midpoint sum on a very fine uniform grid
    const double hi = 40.0;
    const std::size_t n = 4'000'000;
    const double dw = hi / double(n);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (double(k) + 0.5) * dw;
        const double s = std::sin(2.0 * pi * w);  // N pi w / w0 with N = 2, w0 = 1
        const double d = w * w - 1.0;
        acc += evaluate_psd(psd, w) * (s * s) / (w * w * d * d) * dw;
    }
    const double oracle = 2.0 * double(acc);
    CHECK(rep.quadrature == Catch::Approx(oracle).epsilon(2e-6));
}

// =============================================================================
// Cross-spectrum dephasing
// =============================================================================

TEST_CASE("cross formulation reduces correctly in the limiting cases", "[response]") {
    PhysParams p = PhysParams::natural(1);
    const Psd psd{LorentzianPair{0.2, 1.0, 0.3}};
    const double pref = (p.mass / p.hbar) * (p.mass / p.hbar);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 256.0);

    // |x_i|^2 filters: difference against a zero arm
    auto zero_arm = arms.first;
    for (auto& x : zero_arm.x) x = 0.0;
    const auto f_plus = transfer_from_trajectories(arms.first, zero_arm, 6.0);
    const auto f_minus = transfer_from_trajectories(arms.second, zero_arm, 6.0);
    const auto f_cross = cross_transfer_from_trajectories(arms.first, arms.second, 6.0);

    // uncorrelated arms: just the sum of the diagonal terms
    const auto uncorrelated = cross_dephasing_variance(
        psd, psd, [](double) { return complexd{0.0, 0.0}; }, f_plus, f_minus, f_cross, pref);
    const double diag_sum = variance_from_psd(psd, f_plus, pref).quadrature_value +
                            variance_from_psd(psd, f_minus, pref).quadrature_value;
    CHECK(uncorrelated.quadrature_value == Catch::Approx(diag_sum).epsilon(1e-9));

    // perfectly correlated identical noise on identical coupling reduces to
    // the |x_plus - x_minus|^2 filter
    const auto correlated = cross_dephasing_variance(
        psd, psd, [&psd](double w) { return complexd{evaluate_psd(psd, w), 0.0}; }, f_plus,
        f_minus, f_cross, pref);
    const auto diff_filter = transfer_from_trajectories(arms.first, arms.second, 6.0);
    const double expected = variance_from_psd(psd, diff_filter, pref).quadrature_value;
    CHECK(correlated.quadrature_value == Catch::Approx(expected).epsilon(1e-6));

    // a cross PSD without conjugate symmetry is rejected
    CHECK_THROWS_AS(
        cross_dephasing_variance(psd, psd, [](double) { return complexd{0.0, 1.0}; }, f_plus,
                                 f_minus, f_cross, pref),
        config_error);
}
