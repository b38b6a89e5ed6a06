#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sgnoise/core.hpp"

namespace sgn {

/// Result of an adaptive integration: value plus an internal error estimate.
struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

struct SimpsonWorker {
    const std::function<double(double)>& f;
    double abs_tol;
    double rel_tol;
    int max_depth;
    double value = 0.0;
    double error = 0.0;

    static double simpson(double fa, double fm, double fb, double h) {
        return (fa + 4.0 * fm + fb) * (h / 6.0);
    }

    void recurse(double a, double m, double b, double fa, double fm, double fb, double whole,
                 int depth) {
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(fa, flm, fm, m - a);
        const double right = simpson(fm, frm, fb, b - m);
        const double delta = left + right - whole;
        const double tol = std::max(abs_tol, rel_tol * std::abs(left + right));
        if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
            value += left + right + delta / 15.0;
            error += std::abs(delta) / 15.0;
            return;
        }
        recurse(a, lm, m, fa, flm, fm, left, depth + 1);
        recurse(m, rm, b, fm, frm, fb, right, depth + 1);
    }
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
///
/// `seeds` lists interior points the integrand is known to vary rapidly around
/// (resonances, PSD peaks); the interval is pre-split there so the recursion
/// starts on the right footing. Tolerances are per panel.
inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                           double b, std::vector<double> seeds = {},
                                           double abs_tol = 1e-12, double rel_tol = 1e-10,
                                           int max_depth = 48) {
    if (!(b > a)) return {0.0, 0.0};
    seeds.push_back(a);
    seeds.push_back(b);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    detail::SimpsonWorker worker{f, abs_tol, rel_tol, max_depth};
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i) {
        const double lo = seeds[i];
        const double hi = seeds[i + 1];
        if (lo < a - 1e-300 || hi > b + 1e-300 || !(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fmid = f(mid);
        const double fhi = f(hi);
        worker.recurse(lo, mid, hi, flo, fmid, fhi,
                       detail::SimpsonWorker::simpson(flo, fmid, fhi, hi - lo), 0);
    }
    return {worker.value, worker.error};
}

/// Trapezoid rule over uniformly sampled values with spacing dt.
template <typename T>
T trapezoid(const std::vector<T>& samples, double dt) {
    if (samples.size() < 2) return T{};
    T acc = T{};
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) acc += samples[k];
    acc += 0.5 * (samples.front() + samples.back());
    return acc * dt;
}

}  // namespace sgn
