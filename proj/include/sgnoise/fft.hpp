#pragma once

#include <vector>

#include "sgnoise/core.hpp"

namespace sgn {

namespace detail {

// iterative radix-2 Cooley-Tukey, sign = +1 for exp(+i 2 pi j k / n)
inline void fft_radix2(std::vector<complexd>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / double(len);
        const complexd wlen{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            complexd w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const complexd u = a[i + k];
                const complexd t = a[i + k + len / 2] * w;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace detail

/// Finite-time Fourier transform x(w) = Integral_0^{t_f} x(t) e^{+i w t} dt of a
/// uniformly sampled series, evaluated by zero-padded FFT with trapezoid
/// endpoint weights. Returns the transform on the FFT bin grid
/// w_j = 2 pi j / (M dt), j = 0 .. M/2.
struct FiniteTimeTransform {
    std::vector<double> omegas;
    std::vector<complexd> values;
};

inline FiniteTimeTransform finite_time_transform(const std::vector<double>& x, double dt,
                                                 std::size_t pad_factor = 16) {
    if (x.size() < 2) throw config_error("finite_time_transform: need >= 2 samples");
    if (pad_factor < 8) throw config_error("finite_time_transform: pad factor must be >= 8");
    const std::size_t m = detail::next_pow2(x.size() * pad_factor);

    std::vector<complexd> buf(m, complexd{0.0, 0.0});
    for (std::size_t k = 0; k < x.size(); ++k) buf[k] = complexd{x[k], 0.0};
    detail::fft_radix2(buf, +1);

    const double t_f = dt * double(x.size() - 1);
    FiniteTimeTransform out;
    out.omegas.resize(m / 2 + 1);
    out.values.resize(m / 2 + 1);
    for (std::size_t j = 0; j <= m / 2; ++j) {
        const double w = 2.0 * pi * double(j) / (double(m) * dt);
        // rectangle sum -> trapezoid by correcting the two endpoints
        const complexd endpoint =
            0.5 * (complexd{x.front(), 0.0} +
                   complexd{x.back(), 0.0} * complexd{std::cos(w * t_f), std::sin(w * t_f)});
        out.omegas[j] = w;
        out.values[j] = dt * (buf[j] - endpoint);
    }
    return out;
}

/// Direct O(n) evaluation of the same transform at one frequency (any sign).
inline complexd finite_time_transform_at(const std::vector<double>& x, double dt, double omega) {
    if (x.size() < 2) throw config_error("finite_time_transform_at: need >= 2 samples");
    complexd acc{0.0, 0.0};
    for (std::size_t k = 1; k + 1 < x.size(); ++k) {
        const double t = dt * double(k);
        acc += x[k] * complexd{std::cos(omega * t), std::sin(omega * t)};
    }
    const double t_f = dt * double(x.size() - 1);
    acc += 0.5 * (complexd{x.front(), 0.0} +
                  complexd{x.back(), 0.0} * complexd{std::cos(omega * t_f), std::sin(omega * t_f)});
    return dt * acc;
}

}  // namespace sgn
