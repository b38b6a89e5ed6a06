#include <catch2/catch_amalgamated.hpp>

#include "sgnoise/quadratic_noise.hpp"

using namespace sgn;

namespace {

NoiseTrace constant_trace(double value, double duration, double dt) {
    NoiseTrace trace;
    trace.dt = dt;
    trace.psd_descriptor = Psd{BandLimitedWhite{0.0, 1.0}};
    trace.samples.assign(static_cast<std::size_t>(std::llround(duration / dt)) + 1, value);
    return trace;
}

}  // namespace

// =============================================================================
// Perturbative Pinney solutions
// =============================================================================

TEST_CASE("unperturbed Pinney solutions are cos and sin", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const auto trace = constant_trace(0.0, p.period(), p.period() / 512.0);
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        const auto [y1, y2] = pinney_perturbative(p, trace, frac * p.period());
        CHECK(y1 == Catch::Approx(std::cos(p.omega0 * frac * p.period())).margin(1e-12));
        CHECK(y2 == Catch::Approx(std::sin(p.omega0 * frac * p.period())).margin(1e-12));
    }
}

TEST_CASE("constant detuning matches the exact shifted-frequency solution", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 5e-3;  // dw2 in units of w0^2
    const double dt = p.period() / 2048.0;
    const auto trace = constant_trace(eps, p.period(), dt);
    const double w_exact = std::sqrt(p.omega0 * p.omega0 + eps);
    for (double frac : {0.3, 0.6, 1.0}) {
        const double t = frac * p.period();
        const auto [y1, y2] = pinney_perturbative(p, trace, t);
        // error budget O(eps^2 t)
        CHECK(y1 == Catch::Approx(std::cos(w_exact * t)).margin(20.0 * eps * eps * t));
    }
}

TEST_CASE("Wronskian of the perturbative pair stays w0", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    // the Wronskian is conserved at first order; keep the amplitude small
    // enough that second-order terms sit below the 1e-6 budget
    const Psd psd{LorentzianPair{1e-8, 1.0, 0.2}};
    const double dt = p.period() / 2048.0;
    const auto trace = synthesize(psd, p.period(), dt, 5);
    const double h = dt;
    // five-point stencil keeps the differentiation error below the 1e-6 budget
    auto derivative = [h](double m2, double m1, double p1, double p2) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    };
    for (double frac : {0.31, 0.55, 0.7, 0.92}) {
        const double t = frac * p.period();
        const auto [y1_m2, y2_m2] = pinney_perturbative(p, trace, t - 2.0 * h);
        const auto [y1_m1, y2_m1] = pinney_perturbative(p, trace, t - h);
        const auto [y1, y2] = pinney_perturbative(p, trace, t);
        const auto [y1_p1, y2_p1] = pinney_perturbative(p, trace, t + h);
        const auto [y1_p2, y2_p2] = pinney_perturbative(p, trace, t + 2.0 * h);
        const double y1_dot = derivative(y1_m2, y1_m1, y1_p1, y1_p2);
        const double y2_dot = derivative(y2_m2, y2_m1, y2_p1, y2_p2);
        CHECK(y1 * y2_dot - y2 * y1_dot == Catch::Approx(p.omega0).epsilon(1e-6));
    }
}

// =============================================================================
// Perturbative scale factor
// =============================================================================

TEST_CASE("scale-factor correction for constant detuning", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 1e-3;
    const double dt = p.period() / 2048.0;
    const auto trace = constant_trace(eps, p.period(), dt);
    for (double frac : {0.2, 0.5, 0.9}) {
        const double t = frac * p.period();
        const auto sq = ermakov_rho_perturbative(p, trace, t);
        const double expected =
            -eps / (4.0 * p.omega0 * p.omega0) * (1.0 - std::cos(2.0 * p.omega0 * t));
        CHECK(sq.delta_rho == Catch::Approx(expected).margin(1e-9));
    }
    const auto zero = ermakov_rho_perturbative(p, constant_trace(0.0, p.period(), dt), 0.5);
    CHECK(zero.delta_rho == 0.0);
    CHECK(zero.delta_rho_dot == 0.0);
}

// =============================================================================
// Ermakov ODE oracle
// =============================================================================

TEST_CASE("zero detuning is a fixed point of the Ermakov flow", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 512.0;
    const auto oracle =
        ermakov_ode_oracle(p, constant_trace(0.0, 2.0 * p.period(), dt), 2.0 * p.period(), dt);
    for (std::size_t k = 0; k < oracle.rho.size(); k += 64) {
        CHECK(std::abs(oracle.rho[k] - 1.0) < 1e-10);
        CHECK(std::abs(oracle.rho_dot[k]) < 1e-10);
    }
}

TEST_CASE("constant detuning: time-averaged rho matches the shifted equilibrium",
          "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 2e-3;
    const double dt = p.period() / 1024.0;
    const double t_f = 10.0 * p.period();
    const auto oracle = ermakov_ode_oracle(p, constant_trace(eps, t_f, dt), t_f, dt);
    double mean_rho = 0.0;
    for (double r : oracle.rho) mean_rho += r;
    mean_rho /= double(oracle.rho.size());
    const double equilibrium = std::pow(1.0 + eps / (p.omega0 * p.omega0), -0.25);
    CHECK(std::abs(mean_rho - equilibrium) < 5.0 * eps * eps);
}

TEST_CASE("oracle Wronskian and residual stay within integrator tolerance", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const Psd psd{LorentzianPair{2e-3, 1.0, 0.2}};
    const double dt = p.period() / 1024.0;
    SynthesisOptions opt;
    // keep the band well below Nyquist so the finite-difference residual
    // reconstruction stays meaningful
    opt.tail_fraction = 2.5e-2;
    const auto trace = synthesize(psd, 2.0 * p.period(), dt, 9, opt);
    const auto oracle = ermakov_ode_oracle(p, trace, 2.0 * p.period(), dt);

    // Wronskian y1 y2' - y2 y1' = w0 from the integrated derivatives
    for (std::size_t k = 0; k < oracle.times.size(); k += 128)
        CHECK(oracle.wronskian(k) == Catch::Approx(p.omega0).epsilon(1e-8));
    CHECK(oracle.max_residual < 1e-4);  // residual uses a central-difference rho''
}

TEST_CASE("halving dt shrinks the oracle error ~16x", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 0.05;
    auto run = [&](std::size_t steps_per_period) {
        const double dt = p.period() / double(steps_per_period);
        const auto trace = constant_trace(eps, p.period(), dt);
        return ermakov_ode_oracle(p, trace, p.period(), dt);
    };
    // Richardson reference from a much finer grid; compare the maximum error
    // over shared grid points (the endpoint alone can cancel accidentally)
    const auto fine = run(4096);
    auto max_err = [&fine](const ErmakovSolution& sol, std::size_t stride) {
        double worst = 0.0;
        for (std::size_t k = 0; k < sol.rho.size(); ++k)
            worst = std::max(worst, std::abs(sol.rho[k] - fine.rho[k * stride]));
        return worst;
    };
    const double coarse = max_err(run(32), 128);
    const double mid = max_err(run(64), 64);
    CHECK(coarse / mid > 12.0);
    CHECK(coarse / mid < 20.0);
}

TEST_CASE("singularity guard rejects collapsing scale factors", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    // a hugely stiffened trap squeezes rho below the 0.1 guard
    const double dt = p.period() / 4096.0;
    const auto trace = constant_trace(120.0, p.period(), dt);
    CHECK_THROWS_AS(ermakov_ode_oracle(p, trace, p.period(), dt), numeric_error);
}

// =============================================================================
// Quadratic displacement response and contrast
// =============================================================================

TEST_CASE("quadratic displacement response: trivial and linearity cases", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 256.0;
    const double t_f = p.default_final_time();
    const auto arms = ideal_trajectories(p, t_f, dt);

    const auto zero = constant_trace(0.0, t_f, dt);
    CHECK(std::abs(delta_alpha_quadratic(p, zero, arms.first, arms.second, t_f)) == 0.0);

    // closed identical arms: no separation, no decoherence channel
    const auto noise = synthesize(Psd{LorentzianPair{1e-3, 1.0, 0.2}}, t_f, dt, 3);
    CHECK(std::abs(delta_alpha_quadratic(p, noise, arms.first, arms.first, t_f)) == 0.0);

    const complexd base = delta_alpha_quadratic(p, noise, arms.first, arms.second, t_f);
    const complexd scaled = delta_alpha_quadratic(p, scale(noise, 3.0), arms.first, arms.second, t_f);
    CHECK(std::abs(scaled - 3.0 * base) <= 1e-12 * std::abs(base));
}

TEST_CASE("contrast transfer function is proportional to the dephasing filter",
          "[quadratic]") {
    PhysParams p = PhysParams::natural(2);
    const auto arms = ideal_trajectories(p, p.default_final_time(), p.period() / 256.0);
    const auto sampled =
        quadratic_transfer_from_trajectories(p, arms.first, arms.second, 4.0);

    // ratio against the analytic form must be constant across the grid
    double ratio_min = 1e300, ratio_max = 0.0;
    for (std::size_t j = 0; j < sampled.omegas.size(); ++j) {
        const double w = sampled.omegas[j];
        if (w < 0.05) continue;
        const double analytic = quadratic_contrast_transfer(p, w);
        if (analytic < 1e-9) continue;
        const double ratio = sampled.values[j] / analytic;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
    }
    CHECK(ratio_max - ratio_min < 1e-3 * ratio_max);
    CHECK(ratio_max == Catch::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("quadratic contrast: zero PSD, closed-form substitution, MC vs quadrature",
          "[quadratic][stat]") {
    PhysParams p = PhysParams::natural(1);
    CHECK(quadratic_contrast(p, Psd{BandLimitedWhite{0.0, 3.0}}, ContrastMode::quadrature)
              .quadrature_value == 0.0);

    // closed form at S(w0) = 1, N = 1, dA = 2 in natural units: pi^2 N^2 dA^2
    const Psd psd{LorentzianPair{2.0, 1.0, 0.05}};
    const auto rep = quadratic_contrast(p, psd, ContrastMode::closed_form);
    const double da = p.delta_amplitude();
    CHECK(*rep.closed_form_value ==
          Catch::Approx(pi * pi * da * da * evaluate_psd(psd, 1.0)).epsilon(1e-12));

    // Monte Carlo agrees with the quadrature ground truth
    QuadraticMonteCarloOptions mc;
    mc.n_trials = 3000;
    mc.master_seed = 0x77aaULL;
    mc.dt = p.period() / 128.0;
    mc.synthesis.oversample = 120.0;
    mc.synthesis.tail_fraction = 2.5e-3;
    const auto mc_rep = quadratic_contrast(p, psd, ContrastMode::monte_carlo, mc);
    const auto& est = *mc_rep.monte_carlo;
    CHECK(std::abs(est.value - mc_rep.quadrature_value) <=
          3.0 * est.standard_error + 0.01 * mc_rep.quadrature_value);
}

// =============================================================================
// Squeeze unitarity
// =============================================================================

TEST_CASE("squeeze/shear map leaves Gaussian overlaps invariant", "[quadratic]") {
    PhysParams p = PhysParams::natural(1);
    SqueezeParams zero;
    GaussianArmState a{complexd{0.9, 0.1}, 0.0};
    GaussianArmState b{complexd{-0.4, 0.6}, 0.0};
    CHECK(squeeze_unitarity_check(p, zero, a, b) == 0.0);

    SqueezeParams sq;
    sq.delta_rho = 0.013;
    sq.delta_rho_dot = -0.008;
    CHECK(squeeze_unitarity_check(p, sq, a, a) < 1e-10);
    CHECK(squeeze_unitarity_check(p, sq, a, b) < 1e-8);
}
