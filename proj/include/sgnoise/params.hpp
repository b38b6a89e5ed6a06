#pragma once

#include <string>

#include "sgnoise/core.hpp"

namespace sgn {

/// Physical parameters of the interferometer. Defaults are the natural-unit
/// configuration m = omega0 = hbar = 1 used for desk-scale verification.
struct PhysParams {
    double mass = 1.0;        ///< kg
    double omega0 = 1.0;      ///< trap frequency, rad/s
    double hbar = 1.0;        ///< J s
    double g_nv = 1.0;        ///< Lande g-factor (dimensionless)
    double mu_b = 1.0;        ///< Bohr magneton, J/T
    double eta = 1.0;         ///< magnetic field gradient, T/m
    int n_periods = 1;        ///< trajectory periods per run

    void validate() const {
        if (!(mass > 0.0)) throw config_error("params: mass must be positive");
        if (!(omega0 > 0.0)) throw config_error("params: omega0 must be positive");
        if (!(hbar > 0.0)) throw config_error("params: hbar must be positive");
        if (!(g_nv > 0.0)) throw config_error("params: g_nv must be positive");
        if (!(mu_b > 0.0)) throw config_error("params: mu_b must be positive");
        if (!(eta > 0.0)) throw config_error("params: eta must be positive");
        if (n_periods < 1) throw config_error("params: n_periods must be >= 1");
    }

    /// Arm amplitude A+ = g mu eta / (m omega0^2); the minus arm is -A+ for an
    /// unbiased constant gradient.
    double amplitude_plus() const { return g_nv * mu_b * eta / (mass * omega0 * omega0); }
    double amplitude_minus() const { return -amplitude_plus(); }
    double delta_amplitude() const { return amplitude_plus() - amplitude_minus(); }

    double period() const { return 2.0 * pi / omega0; }
    /// Default run time: n_periods full trap periods (arms closed at t_f).
    double default_final_time() const { return n_periods * period(); }

    /// sqrt(m omega0 / 2 hbar): converts position to the real part of alpha.
    double alpha_per_position() const { return std::sqrt(mass * omega0 / (2.0 * hbar)); }
    /// Ground-state position width sqrt(hbar / 2 m omega0).
    double ground_state_width() const { return std::sqrt(hbar / (2.0 * mass * omega0)); }

    static PhysParams natural(int n_periods = 1) {
        PhysParams p;
        p.n_periods = n_periods;
        return p;
    }
};

}  // namespace sgn
