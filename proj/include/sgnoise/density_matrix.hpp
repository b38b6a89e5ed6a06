#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sgnoise/core.hpp"
#include "sgnoise/params.hpp"
#include "sgnoise/psd.hpp"

namespace sgn {

/// Spatial density matrix rho(x1, x2) on a uniform position grid.
struct PositionDensityMatrix {
    std::vector<double> grid;  ///< m, uniform
    Eigen::MatrixXcd rho;

    double dx() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
    std::size_t size() const { return grid.size(); }

    double trace() const { return rho.diagonal().real().sum() * dx(); }
    double purity() const { return (rho * rho).diagonal().real().sum() * dx() * dx(); }

    double hermiticity_defect() const {
        return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    }

    void validate() const {
        if (grid.size() < 2 || rho.rows() != long(grid.size()) || rho.cols() != long(grid.size()))
            throw config_error("PositionDensityMatrix: grid and matrix sizes differ");
        if (hermiticity_defect() > 1e-10)
            throw numeric_error("PositionDensityMatrix: not Hermitian within 1e-10");
        if (std::abs(trace() - 1.0) > 1e-8)
            throw numeric_error("PositionDensityMatrix: trace deviates from 1 beyond 1e-8");
        const double p = purity();
        if (!(p > 0.0) || p > 1.0 + 1e-8)
            throw numeric_error("PositionDensityMatrix: purity outside (0, 1]");
    }
};

/// Uniform grid of n points spanning [-half_width, half_width].
inline std::vector<double> make_position_grid(double half_width, std::size_t n) {
    std::vector<double> g(n);
    const double dx = 2.0 * half_width / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = -half_width + dx * double(i);
    return g;
}

/// rho = |alpha><alpha| for a coherent state with phase-space coordinate
/// alpha, sampled on the grid.
inline PositionDensityMatrix coherent_density(const PhysParams& p, complexd alpha,
                                              std::vector<double> grid) {
    // <x> = sqrt(2 hbar / m w0) Re alpha, <p> = sqrt(2 m hbar w0) Im alpha
    const double x0 = std::sqrt(2.0 * p.hbar / (p.mass * p.omega0)) * alpha.real();
    const double p0 = std::sqrt(2.0 * p.mass * p.hbar * p.omega0) * alpha.imag();

    const std::size_t n = grid.size();
    Eigen::VectorXcd psi(n);
    const double norm = std::pow(p.mass * p.omega0 / (pi * p.hbar), 0.25);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid[i];
        const double gauss = std::exp(-p.mass * p.omega0 / (2.0 * p.hbar) * (x - x0) * (x - x0));
        const double phase = p0 * x / p.hbar;
        psi[long(i)] = norm * gauss * complexd{std::cos(phase), std::sin(phase)};
    }
    PositionDensityMatrix out;
    out.grid = std::move(grid);
    out.rho = psi * psi.adjoint();
    // normalise the grid quadrature exactly so trace checks stay tight
    out.rho /= out.trace();
    return out;
}

struct MasterEvolveOptions {
    bool include_hamiltonian = true;  ///< false = pure-dephasing test mode (H = 0)
    std::size_t snapshot_stride = 0;  ///< 0 = no snapshots
    std::function<void(double, const PositionDensityMatrix&)> observer;
};

namespace detail {

/// Cayley-form Crank-Nicolson propagator for the static oscillator
/// Hamiltonian on the grid; exactly unitary, so it commutes with H and
/// preserves trace, purity and energy expectation to roundoff.
class CrankNicolsonOscillator {
public:
    CrankNicolsonOscillator(const PhysParams& p, const std::vector<double>& grid, double dt) {
        const std::size_t n = grid.size();
        const double dx = grid[1] - grid[0];
        const double kin = p.hbar * p.hbar / (2.0 * p.mass * dx * dx);
        diag_.resize(n);
        off_ = -kin;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = 0.5 * p.mass * p.omega0 * p.omega0 * grid[i] * grid[i];
            diag_[i] = 2.0 * kin + v;
        }
        lambda_ = complexd{0.0, dt / (2.0 * p.hbar)};
        n_ = n;
    }

    /// One unitary step on a state vector (Thomas solve of the tridiagonal CN system).
    void step(Eigen::VectorXcd& v) const {
        const std::size_t n = n_;
        // rhs = (I - lambda H) v
        rhs_.resize(long(n));
        for (std::size_t i = 0; i < n; ++i) {
            complexd acc = (1.0 - lambda_ * diag_[i]) * v[long(i)];
            if (i > 0) acc -= lambda_ * off_ * v[long(i - 1)];
            if (i + 1 < n) acc -= lambda_ * off_ * v[long(i + 1)];
            rhs_[long(i)] = acc;
        }
        // solve (I + lambda H) out = rhs
        c_prime_.resize(long(n));
        const complexd b0 = 1.0 + lambda_ * diag_[0];
        c_prime_[0] = lambda_ * off_ / b0;
        rhs_[0] /= b0;
        for (std::size_t i = 1; i < n; ++i) {
            const complexd a = lambda_ * off_;
            const complexd b = 1.0 + lambda_ * diag_[i];
            const complexd denom = b - a * c_prime_[long(i - 1)];
            c_prime_[long(i)] = (i + 1 < n) ? lambda_ * off_ / denom : complexd{0.0, 0.0};
            rhs_[long(i)] = (rhs_[long(i)] - a * rhs_[long(i - 1)]) / denom;
        }
        v[long(n - 1)] = rhs_[long(n - 1)];
        for (std::size_t i = n - 1; i-- > 0;) v[long(i)] = rhs_[long(i)] - c_prime_[long(i)] * v[long(i + 1)];
    }

private:
    std::vector<double> diag_;
    double off_ = 0.0;
    complexd lambda_;
    std::size_t n_ = 0;
    mutable Eigen::VectorXcd rhs_;
    mutable Eigen::VectorXcd c_prime_;
};

}  // namespace detail

/// Integrates d rho / dt = (1/i hbar)[H, rho] - Lambda [x, [x, rho]] with
/// Lambda = pi m^2 S(w0) / hbar^2. Operator splitting per step: a unitary
/// Crank-Nicolson step on both indices, then the exact multiplicative
/// decoherence step rho(x1,x2) *= exp(-Lambda (x1-x2)^2 dt). The dissipator is
/// diagonal in position, so its step is exact; Cayley form keeps the unitary
/// step trace- and purity-preserving to solver roundoff.
inline PositionDensityMatrix master_evolve(const PhysParams& p, const PositionDensityMatrix& rho0,
                                           const Psd& psd, double t_final, double dt,
                                           const MasterEvolveOptions& opt = {}) {
    p.validate();
    if (rho0.grid.size() < 2) throw config_error("master_evolve: empty grid");
    const double dx = rho0.dx();
    if (dx > p.ground_state_width() / 8.0)
        throw config_error("master_evolve: grid too coarse, need >= 8 points per ground-state width");
    if (dt > 0.01 / p.omega0)
        throw config_error("master_evolve: dt too large, need dt <= 0.01 / omega0");

    const double lambda = pi * p.mass * p.mass * evaluate_psd(psd, p.omega0) / (p.hbar * p.hbar);
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_final / dt));
    const std::size_t n = rho0.grid.size();

    // exact decoherence factors for one step
    Eigen::MatrixXd decay(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = rho0.grid[i] - rho0.grid[j];
            decay(long(i), long(j)) = std::exp(-lambda * d * d * dt);
        }

    detail::CrankNicolsonOscillator cn(p, rho0.grid, dt);
    PositionDensityMatrix state = rho0;

    Eigen::VectorXcd col;
    for (std::size_t s = 0; s < n_steps; ++s) {
        if (opt.include_hamiltonian) {
            // rho <- U rho U^dagger, one Thomas solve per column of rho and rho^dagger
            for (std::size_t c = 0; c < n; ++c) {
                col = state.rho.col(long(c));
                cn.step(col);
                state.rho.col(long(c)) = col;
            }
            state.rho = state.rho.adjoint().eval();
            for (std::size_t c = 0; c < n; ++c) {
                col = state.rho.col(long(c));
                cn.step(col);
                state.rho.col(long(c)) = col;
            }
            state.rho = state.rho.adjoint().eval();
        }
        if (lambda > 0.0) state.rho = state.rho.cwiseProduct(decay.cast<complexd>());
        if (opt.snapshot_stride > 0 && opt.observer && (s + 1) % opt.snapshot_stride == 0)
            opt.observer(dt * double(s + 1), state);
    }
    return state;
}

/// Purity Tr[rho^2] and von Neumann entropy -sum lambda ln lambda of a spatial
/// density matrix (eigenvalues of rho dx above the 1e-14 floor).
inline std::pair<double, double> purity_and_entropy(const PositionDensityMatrix& rho) {
    if (rho.hermiticity_defect() > 1e-10)
        throw config_error("purity_and_entropy: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho.rho + rho.rho.adjoint()));
    const auto& lam = solver.eigenvalues();
    double purity = 0.0;
    double entropy = 0.0;
    for (long i = 0; i < lam.size(); ++i) {
        const double v = lam[i] * rho.dx();
        purity += v * v;
        if (v > 1e-14) entropy -= v * std::log(v);
    }
    return {purity, entropy};
}

}  // namespace sgn
