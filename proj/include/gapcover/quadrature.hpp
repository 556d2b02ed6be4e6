#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "gapcover/errors.hpp"

namespace gapcover {

// ---------------------------------------------------------------------------
// 1-D adaptive quadrature
// ---------------------------------------------------------------------------

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline void adaptive_step(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth, QuadResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        return;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, out);
    adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, out);
}

} // namespace detail

/// Adaptive Simpson on [a, b] with a running error estimate.  The integrand
/// may have isolated kinks; the subdivision isolates them.
inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-12, int max_depth = 40) {
    if (!(b >= a)) throw ParameterError("integrate: bad interval");
    if (a == b) return {};
    QuadResult out;
    // seed with a few panels so symmetric features are not missed
    const int panels = 8;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        const double whole = detail::simpson(lo, hi, flo, fmid, fhi);
        detail::adaptive_step(f, lo, hi, flo, fmid, fhi, whole, tol / panels, max_depth, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid convolution on [0, L]
// ---------------------------------------------------------------------------

/// Uniform samples v[i] = f(i h), i = 0..m, h = L/m, ready for repeated
/// self-convolution.  Values beyond L are never needed: a convolution at
/// s <= L only reads both factors at arguments <= s.
struct GridFunction {
    double h = 0.0;
    std::vector<double> v;  // size m + 1

    std::size_t points() const { return v.size(); }
};

inline GridFunction sample_grid(const std::function<double(double)>& f, double length, std::size_t m) {
    if (m < 2) throw ParameterError("sample_grid: need at least 2 intervals");
    GridFunction g;
    g.h = length / static_cast<double>(m);
    g.v.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) g.v[i] = f(static_cast<double>(i) * g.h);
    return g;
}

/// Trapezoid-weighted convolution (a * b)(j h) = integral of a(u) b(jh - u) du.
inline GridFunction convolve(const GridFunction& a, const GridFunction& b) {
    GridFunction out;
    out.h = a.h;
    out.v.assign(a.v.size(), 0.0);
    const std::size_t n = a.v.size();
    for (std::size_t j = 1; j < n; ++j) {
        double s = 0.5 * (a.v[0] * b.v[j] + a.v[j] * b.v[0]);
        for (std::size_t i = 1; i < j; ++i) s += a.v[i] * b.v[j - i];
        out.v[j] = s * a.h;
    }
    return out;
}

/// k-fold convolution power by binary exponentiation.  k >= 1.
inline GridFunction convolution_power(const GridFunction& f, int k) {
    if (k < 1) throw ParameterError("convolution_power: k must be >= 1");
    GridFunction result;
    GridFunction base = f;
    bool have = false;
    int e = k;
    while (e > 0) {
        if (e & 1) {
            result = have ? convolve(result, base) : base;
            have = true;
        }
        e >>= 1;
        if (e > 0) base = convolve(base, base);
    }
    return result;
}

/// Trapezoid integral of the grid samples over [0, L].
inline double grid_integral(const GridFunction& f) {
    double s = 0.5 * (f.v.front() + f.v.back());
    for (std::size_t i = 1; i + 1 < f.v.size(); ++i) s += f.v[i];
    return s * f.h;
}

/// Trapezoid integral of f(s) w(s) over [0, L] for a weight given as a function.
inline double grid_integral_weighted(const GridFunction& f, const std::function<double(double)>& w) {
    const std::size_t n = f.v.size();
    double s = 0.5 * (f.v.front() * w(0.0) + f.v.back() * w(static_cast<double>(n - 1) * f.h));
    for (std::size_t i = 1; i + 1 < n; ++i) s += f.v[i] * w(static_cast<double>(i) * f.h);
    return s * f.h;
}

} // namespace gapcover
