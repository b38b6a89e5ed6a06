#include <catch2/catch_amalgamated.hpp>

#include "sgnoise/phase.hpp"
#include "sgnoise/trajectory.hpp"

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
// Ideal trajectories
// =============================================================================

TEST_CASE("ideal arms: endpoints and closure", "[dynamics]") {
    PhysParams p = PhysParams::natural(2);
    const double dt = p.period() / 128.0;
    const auto [plus, minus] = ideal_trajectories(p, p.default_final_time(), dt);

    CHECK(plus.x.front() == 0.0);
    CHECK(plus.v.front() == 0.0);

    // half period: x = 2 A
    const std::size_t half = 64;
    CHECK(plus.x[half] == Catch::Approx(2.0 * p.amplitude_plus()).epsilon(1e-12));
    CHECK(minus.x[half] == Catch::Approx(2.0 * p.amplitude_minus()).epsilon(1e-12));

    // arms close after N whole periods
    CHECK(std::abs(plus.x.back()) < 1e-12 * std::abs(p.amplitude_plus()));
    CHECK(std::abs(plus.v.back()) < 1e-12 * p.omega0 * std::abs(p.amplitude_plus()));
    CHECK(std::abs(minus.x.back()) < 1e-12 * std::abs(p.amplitude_plus()));
}

TEST_CASE("alpha is consistent with (x, v) at every sample", "[dynamics]") {
    PhysParams p;
    p.mass = 2.0;
    p.omega0 = 3.0;
    p.hbar = 0.5;
    const auto [plus, minus] = ideal_trajectories(p, p.default_final_time(), p.period() / 200.0);
    const double c = p.alpha_per_position();
    for (std::size_t k = 0; k < plus.size(); ++k) {
        const complexd expected = c * complexd{plus.x[k], plus.v[k] / p.omega0};
        CHECK(std::abs(plus.alpha[k] - expected) <=
              1e-12 * std::max(1.0, std::abs(expected)));
    }
}

// =============================================================================
// RK4 integrator
// =============================================================================

TEST_CASE("zero drive and zero initial conditions stay at rest", "[dynamics]") {
    PhysParams p = PhysParams::natural(1);
    const std::size_t n = 257;
    const auto traj = integrate_trajectory(p, std::vector<double>(n, 0.0), p.period() / 256.0,
                                           nullptr, 0.0, 0.0);
    for (double x : traj.x) CHECK(x == 0.0);
}

TEST_CASE("constant-gradient drive reproduces the closed form", "[dynamics]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 200.0;
    const std::size_t n = 201;
    const auto drive = constant_gradient_drive(p, p.amplitude_plus(), n);
    const auto numeric = integrate_trajectory(p, drive, dt, nullptr, 0.0, 0.0);
    const auto ideal = ideal_trajectories(p, p.period(), dt).first;
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(numeric.x[k] - ideal.x[k]));
    CHECK(worst < 1e-8 * std::abs(p.amplitude_plus()));
}

TEST_CASE("constant extra acceleration superposes the (1 - cos) response", "[dynamics]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 0.37;
    const double dt = p.period() / 400.0;
    const std::size_t n = 401;
    auto drive = constant_gradient_drive(p, p.amplitude_plus(), n);
    for (auto& a : drive) a += eps;
    const auto traj = integrate_trajectory(p, drive, dt, nullptr, 0.0, 0.0);
    const auto ideal = ideal_trajectories(p, p.period(), dt).first;
    // the extra term contributes (eps/w0^2)(1 - cos w0 t), which closes too
    CHECK(traj.x.back() == Catch::Approx(ideal.x.back()).margin(1e-9));
    const std::size_t half = 200;
    CHECK(traj.x[half] ==
          Catch::Approx(ideal.x[half] + 2.0 * eps / (p.omega0 * p.omega0)).margin(1e-9));
}

TEST_CASE("halving dt shrinks the error ~16x (RK4 order)", "[dynamics]") {
    PhysParams p = PhysParams::natural(1);
    auto worst_error = [&p](std::size_t steps) {
        const double dt = p.period() / double(steps);
        const auto drive = constant_gradient_drive(p, p.amplitude_plus(), steps + 1);
        const auto numeric = integrate_trajectory(p, drive, dt, nullptr, 0.0, 0.0);
        const auto ideal = ideal_trajectories(p, p.period(), dt).first;
        double worst = 0.0;
        for (std::size_t k = 0; k <= steps; ++k)
            worst = std::max(worst, std::abs(numeric.x[k] - ideal.x[k]));
        return worst;
    };
    const double coarse = worst_error(64);
    const double fine = worst_error(128);
    CHECK(coarse / fine > 12.0);
    CHECK(coarse / fine < 20.0);
}

TEST_CASE("grid mismatch between drive and noise is rejected", "[dynamics]") {
    PhysParams p = PhysParams::natural(1);
    const auto noise = constant_trace(0.1, 1.0, 0.01);
    CHECK_THROWS_AS(
        integrate_trajectory(p, std::vector<double>(50, 0.0), 0.01, &noise, 0.0, 0.0),
        grid_mismatch_error);
}

// =============================================================================
// Phase fluctuation
// =============================================================================

TEST_CASE("zero noise gives zero phase shift", "[dynamics][phase]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 128.0;
    const auto [plus, minus] = ideal_trajectories(p, p.default_final_time(), dt);
    const auto noise = constant_trace(0.0, p.default_final_time(), dt);
    CHECK(delta_phi(p, noise, plus, minus) == 0.0);
    CHECK(std::abs(delta_alpha(p, noise, p.default_final_time())) == 0.0);
}

TEST_CASE("constant noise over one period: closed-form phase shift", "[dynamics][phase]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 0.05;
    const double dt = p.period() / 2048.0;
    const auto [plus, minus] = ideal_trajectories(p, p.period(), dt);
    const auto noise = constant_trace(eps, p.period(), dt);
    // (m/hbar) eps dA Int (1 - cos) dt = (m/hbar) eps dA 2 pi / w0
    const double expected =
        p.mass / p.hbar * eps * p.delta_amplitude() * 2.0 * pi / p.omega0;
    CHECK(delta_phi(p, noise, plus, minus) == Catch::Approx(expected).epsilon(1e-8));
}

TEST_CASE("constant noise displacement response at half and full period",
          "[dynamics][phase]") {
    PhysParams p = PhysParams::natural(1);
    const double eps = 0.2;
    const double dt = p.period() / 4096.0;
    const auto noise = constant_trace(eps, p.period(), dt);

    // full-period closure: Int_0^{T0} e^{i w0 t} dt = 0
    CHECK(std::abs(delta_alpha(p, noise, p.period())) < 1e-7);

    // half period: |e^{i pi} - 1| = 2 in the antiderivative
    const double expected = std::sqrt(p.mass / (2.0 * p.hbar * p.omega0)) * 2.0 * eps / p.omega0;
    CHECK(std::abs(delta_alpha(p, noise, 0.5 * p.period())) ==
          Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("linearity and superposition of the responses", "[dynamics][phase]") {
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{0.5, 3.0}};
    const double t_f = p.default_final_time();
    const double dt = p.period() / 256.0;
    const auto [plus, minus] = ideal_trajectories(p, t_f, dt);
    const auto n1 = synthesize(psd, t_f, dt, 11);
    const auto n2 = synthesize(psd, t_f, dt, 12);

    const double phi1 = delta_phi(p, n1, plus, minus);
    const double phi2 = delta_phi(p, n2, plus, minus);
    const double c = -2.7;
    CHECK(delta_phi(p, scale(n1, c), plus, minus) == Catch::Approx(c * phi1).epsilon(1e-12));
    CHECK(delta_phi(p, combine(n1, 1.0, n2, 1.0), plus, minus) ==
          Catch::Approx(phi1 + phi2).epsilon(1e-12));

    const complexd a1 = delta_alpha(p, n1, t_f);
    const complexd a_scaled = delta_alpha(p, scale(n1, c), t_f);
    CHECK(std::abs(a_scaled - c * a1) <= 1e-12 * std::abs(a1));
}

TEST_CASE("common-mode scenario with unbiased arms dephases to zero",
          "[dynamics][phase]") {
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{0.5, 3.0}};
    const double t_f = p.default_final_time();
    const double dt = p.period() / 256.0;
    const auto [plus, minus] = ideal_trajectories(p, t_f, dt);
    const auto noise = synthesize(psd, t_f, dt, 21);

    // x_plus + x_minus = 0 exactly, so the sum-weighted integral vanishes
    const double plus_phase = phase_fluctuation_single(p, noise, plus);
    const double minus_phase = phase_fluctuation_single(p, noise, minus);
    CHECK(plus_phase + minus_phase == 0.0);
}

// =============================================================================
// Total-derivative identity
// =============================================================================

TEST_CASE("identical trajectories give a vanishing channel", "[dynamics][identity]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 128.0;
    const auto ideal = ideal_trajectories(p, p.period(), dt).first;
    const auto check = total_derivative_check(p, ideal, ideal, ideal.drive);
    CHECK(check.channel_integral == 0.0);
    CHECK(check.boundary_term == 0.0);
}

TEST_CASE("channel equals boundary for a noisy trajectory", "[dynamics][identity]") {
    PhysParams p = PhysParams::natural(1);
    const Psd psd{BandLimitedWhite{0.1, 3.0}};
    const double dt = p.period() / 4096.0;
    const std::size_t n = 4097;
    const auto noise = synthesize(psd, p.period(), dt, 31);
    const auto drive = constant_gradient_drive(p, p.amplitude_plus(), n);
    const auto ideal = ideal_trajectories(p, p.period(), dt).first;
    const auto perturbed = integrate_trajectory(p, drive, dt, &noise, 0.0, 0.0);
    const auto check = total_derivative_check(p, ideal, perturbed, drive);
    CHECK(std::abs(check.channel_integral - check.boundary_term) <=
          1e-6 * check.dominant_scale);
}

TEST_CASE("closed ideal arm with pinned start has no boundary term",
          "[dynamics][identity]") {
    PhysParams p = PhysParams::natural(1);
    const double dt = p.period() / 512.0;
    const std::size_t n = 513;
    const auto noise = synthesize(Psd{BandLimitedWhite{0.05, 3.0}}, p.period(), dt, 41);
    const auto drive = constant_gradient_drive(p, p.amplitude_plus(), n);
    const auto ideal = ideal_trajectories(p, p.period(), dt).first;
    auto perturbed = integrate_trajectory(p, drive, dt, &noise, 0.0, 0.0);
    // force delta_x(t_f) irrelevant: v_ideal vanishes at closure, delta_x(0) = 0
    const auto check = total_derivative_check(p, ideal, perturbed, drive);
    CHECK(std::abs(check.boundary_term) <=
          1e-10 * std::max(1.0, std::abs(check.channel_integral)));
}
