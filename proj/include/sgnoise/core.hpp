#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>

namespace sgn {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr complexd iunit{0.0, 1.0};

/// Thrown when two sampled series do not live on the same time grid.
struct grid_mismatch_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown on invalid physical or configuration input.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot deliver its contract
/// (divergent integral, singular Ermakov scale factor, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics (Nyquist margin, PSD truncation, ...) are routed
/// through a replaceable sink so tests can capture them.
inline std::function<void(const std::string&)>& warning_sink() {
    static std::function<void(const std::string&)> sink =
        [](const std::string& msg) { std::cerr << "[sgnoise] warning: " << msg << "\n"; };
    return sink;
}

inline void warn(const std::string& msg) { warning_sink()(msg); }

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

}  // namespace sgn
