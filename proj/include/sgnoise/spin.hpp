#pragma once

#include <Eigen/Dense>

#include "sgnoise/core.hpp"

namespace sgn {

/// 3x3 spin-1 density matrix in the basis (|1>, |0>, |-1>).
struct SpinDensityMatrix {
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();

    void validate() const {
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw numeric_error("SpinDensityMatrix: not Hermitian within 1e-12");
        if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
            throw numeric_error("SpinDensityMatrix: trace deviates from 1");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(rho);
        if (solver.eigenvalues().minCoeff() < -1e-12)
            throw numeric_error("SpinDensityMatrix: negative eigenvalue");
    }
};

/// Rabi evolution of the spin-1 triplet under the microwave coupling
/// H = hbar Omega (|1><0| + |-1><0| + h.c.), for pulse duration t.
inline Eigen::Matrix3cd rabi_evolution(double omega_p, double t) {
    const double s2 = std::sqrt(2.0);
    const double th = s2 * omega_p * t;
    Eigen::Matrix3cd u;
    const complexd off = -iunit / s2 * std::sin(th);
    const double c2 = std::cos(th / 2.0);
    const double s2h = std::sin(th / 2.0);
    u << complexd{c2 * c2, 0.0}, off, complexd{-s2h * s2h, 0.0},
         off, complexd{std::cos(th), 0.0}, off,
         complexd{-s2h * s2h, 0.0}, off, complexd{c2 * c2, 0.0};
    return u;
}

/// The pi/2 pulse used by the Ramsey sequence: Rabi evolution at
/// t = pi / (2 sqrt(2) Omega).
inline Eigen::Matrix3cd ramsey_pulse() {
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix3cd u;
    u << complexd{0.5, 0.0}, -iunit / s2, complexd{-0.5, 0.0},
         -iunit / s2, complexd{0.0, 0.0}, -iunit / s2,
         complexd{-0.5, 0.0}, -iunit / s2, complexd{0.5, 0.0};
    return u;
}

/// Ramsey witness W = U_{pi/2}^dagger |0><0| U_{pi/2}: the population of
/// |S_z = 0> after the pulse. A rank-1 projector with 1/2 corner entries.
inline Eigen::Matrix3cd ramsey_witness() {
    Eigen::Matrix3cd w = Eigen::Matrix3cd::Zero();
    w(0, 0) = w(0, 2) = w(2, 0) = w(2, 2) = complexd{0.5, 0.0};
    return w;
}

/// Spin density matrix after ensemble averaging: corner coherences carry the
/// contrast and the Gaussian dephasing factor,
/// rho(0,2) = (C/2) e^{-sigma^2/2} e^{-i phi_diff}, diagonal (1/2, 0, 1/2).
inline SpinDensityMatrix spin_density(double phi_diff, double dephasing_sigma_sq,
                                      double contrast) {
    if (!(contrast >= 0.0 && contrast <= 1.0))
        throw config_error("spin_density: contrast must lie in [0, 1]");
    if (dephasing_sigma_sq < 0.0)
        throw config_error("spin_density: dephasing_sigma_sq must be >= 0");
    SpinDensityMatrix out;
    const double decay = contrast * std::exp(-0.5 * dephasing_sigma_sq);
    const complexd corner = 0.5 * decay * complexd{std::cos(phi_diff), -std::sin(phi_diff)};
    out.rho(0, 0) = out.rho(2, 2) = complexd{0.5, 0.0};
    out.rho(0, 2) = corner;
    out.rho(2, 0) = std::conj(corner);
    return out;
}

/// Tr[rho W], clipped to [0, 1] at 1e-12 tolerance.
inline double witness_value(const SpinDensityMatrix& rho) {
    rho.validate();
    const double w = (rho.rho * ramsey_witness()).trace().real();
    if (w < -1e-12 || w > 1.0 + 1e-12)
        throw numeric_error("witness_value: Tr[rho W] outside [0, 1]");
    return std::min(1.0, std::max(0.0, w));
}

struct WitnessLoss {
    double exact = 0.0;       ///< (e^{-sa^2 - sp^2/2} - 1)/2 cos(phi)
    double linearized = 0.0;  ///< -(sa^2 + sp^2/2)/2 cos(phi), first order of the exact form
};

/// Witness loss from dephasing and contrast-loss variances. For pure
/// acceleration (common-mode) noise pass sigma_alpha_sq = 0: the displacement
/// cancels between the arms and only dephasing survives.
inline WitnessLoss witness_loss(double phi_diff, double sigma_phi_sq, double sigma_alpha_sq) {
    if (sigma_phi_sq < 0.0 || sigma_alpha_sq < 0.0)
        throw config_error("witness_loss: variances must be >= 0");
    WitnessLoss out;
    const double c = std::cos(phi_diff);
    out.exact = 0.5 * (std::exp(-sigma_alpha_sq - 0.5 * sigma_phi_sq) - 1.0) * c;
    out.linearized = -0.5 * (sigma_alpha_sq + 0.5 * sigma_phi_sq) * c;
    return out;
}

/// Contrast of two Gaussian arms differing by a phase-space displacement:
/// exp(-|dalpha_plus - dalpha_minus|^2 / 2). Identical (common-mode)
/// fluctuations give exactly 1.
inline double contrast_gaussian(complexd delta_alpha_plus, complexd delta_alpha_minus) {
    return std::exp(-0.5 * std::norm(delta_alpha_plus - delta_alpha_minus));
}

/// Purity and von Neumann entropy of a spin density matrix.
inline std::pair<double, double> purity_and_entropy(const SpinDensityMatrix& rho) {
    if ((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw config_error("purity_and_entropy: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(rho.rho);
    double purity = 0.0;
    double entropy = 0.0;
    for (long i = 0; i < 3; ++i) {
        const double v = solver.eigenvalues()[i];
        purity += v * v;
        if (v > 1e-14) entropy -= v * std::log(v);
    }
    return {purity, entropy};
}

}  // namespace sgn
