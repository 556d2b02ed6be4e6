#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "gapcover/errors.hpp"

namespace gapcover {

// ---------------------------------------------------------------------------
// Piecewise-cubic functions
// ---------------------------------------------------------------------------

/// Piecewise cubic on [knots.front(), knots.back()], zero outside.
/// coef[i] = {a, b, c, d} for a + b u + c u^2 + d u^3 with u = t - knots[i].
/// Closed-form evaluation and differentiation; this is the representation
/// used for the cutoff functions F and G and the one that serializes.
struct PiecewisePoly {
    std::vector<double> knots;
    std::vector<std::array<double, 4>> coef;

    double support_end() const { return knots.empty() ? 0.0 : knots.back(); }

    double operator()(double t) const {
        if (knots.size() < 2 || t < knots.front() || t >= knots.back()) {
            // closed right endpoint: most of our shapes vanish there anyway
            if (!knots.empty() && t == knots.back()) return eval_piece(coef.size() - 1, t);
            return 0.0;
        }
        return eval_piece(piece_index(t), t);
    }

    double derivative(double t) const {
        if (knots.size() < 2 || t < knots.front() || t > knots.back()) return 0.0;
        const std::size_t i = (t == knots.back()) ? coef.size() - 1 : piece_index(t);
        const double u = t - knots[i];
        const auto& c = coef[i];
        return c[1] + u * (2.0 * c[2] + u * 3.0 * c[3]);
    }

    bool operator==(const PiecewisePoly&) const = default;

private:
    std::size_t piece_index(double t) const {
        auto it = std::upper_bound(knots.begin(), knots.end(), t);
        std::size_t i = static_cast<std::size_t>(it - knots.begin());
        if (i == 0) return 0;
        return std::min(i - 1, coef.size() - 1);
    }

    double eval_piece(std::size_t i, double t) const {
        const double u = t - knots[i];
        const auto& c = coef[i];
        return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
    }
};

/// The ramp 1 - t on [0, 1] as a one-piece polynomial.
inline PiecewisePoly linear_ramp() {
    PiecewisePoly p;
    p.knots = {0.0, 1.0};
    p.coef = {{1.0, -1.0, 0.0, 0.0}};
    return p;
}

/// Monotone cubic interpolation (Fritsch-Carlson) of samples of f on
/// [a, b] with n equal intervals.  Monotone inputs give a monotone
/// interpolant, which keeps our decreasing-to-zero shapes non-negative.
inline PiecewisePoly monotone_cubic_fit(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 1) throw ParameterError("monotone_cubic_fit: need at least one interval");
    const double h = (b - a) / n;
    std::vector<double> t(static_cast<std::size_t>(n) + 1), v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        t[static_cast<std::size_t>(i)] = a + h * i;
        v[static_cast<std::size_t>(i)] = f(t[static_cast<std::size_t>(i)]);
    }
    std::vector<double> slope(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) slope[static_cast<std::size_t>(i)] = (v[i + 1] - v[i]) / h;

    std::vector<double> deriv(static_cast<std::size_t>(n) + 1);
    deriv[0] = slope[0];
    deriv[static_cast<std::size_t>(n)] = slope[static_cast<std::size_t>(n) - 1];
    for (int i = 1; i < n; ++i) {
        const double s0 = slope[static_cast<std::size_t>(i) - 1], s1 = slope[static_cast<std::size_t>(i)];
        deriv[static_cast<std::size_t>(i)] = (s0 * s1 <= 0.0) ? 0.0 : 2.0 * s0 * s1 / (s0 + s1); // harmonic mean
    }
    // Fritsch-Carlson limiter
    for (int i = 0; i < n; ++i) {
        const double s = slope[static_cast<std::size_t>(i)];
        if (s == 0.0) {
            deriv[static_cast<std::size_t>(i)] = 0.0;
            deriv[static_cast<std::size_t>(i) + 1] = 0.0;
            continue;
        }
        const double alpha = deriv[static_cast<std::size_t>(i)] / s;
        const double beta = deriv[static_cast<std::size_t>(i) + 1] / s;
        const double r = alpha * alpha + beta * beta;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            deriv[static_cast<std::size_t>(i)] = tau * alpha * s;
            deriv[static_cast<std::size_t>(i) + 1] = tau * beta * s;
        }
    }

    PiecewisePoly p;
    p.knots = t;
    p.coef.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double y0 = v[static_cast<std::size_t>(i)], y1 = v[static_cast<std::size_t>(i) + 1];
        const double d0 = deriv[static_cast<std::size_t>(i)], d1 = deriv[static_cast<std::size_t>(i) + 1];
        // Hermite basis in u = t - t_i
        p.coef[static_cast<std::size_t>(i)] = {
            y0,
            d0,
            (3.0 * (y1 - y0) / h - 2.0 * d0 - d1) / h,
            (2.0 * (y0 - y1) / h + d0 + d1) / (h * h),
        };
    }
    return p;
}

// ---------------------------------------------------------------------------
// The explicit product-form shape
// ---------------------------------------------------------------------------

/// 1/(1 + A t) truncated at T.  The shape whose k-fold product (restricted
/// to the simplex) drives the large-k functional ratio.
struct TruncatedReciprocal {
    double a = 1.0;   // slope A
    double t_max = 1.0;

    double operator()(double t) const {
        if (t < 0.0 || t > t_max) return 0.0;
        return 1.0 / (1.0 + a * t);
    }

    /// Integral over [0, min(u, t_max)], closed form.
    double integral_to(double u) const {
        const double v = std::min(u, t_max);
        if (v <= 0.0) return 0.0;
        return std::log1p(a * v) / a;
    }
};

/// Slope A = log k - 2 log log k from the large-k analysis; below k = 4 the
/// expression is not meaningful and callers must pick their own slope.
inline double product_form_slope(int k) {
    if (k < 4) throw ParameterError("product_form_slope: requires k >= 4");
    const double lk = std::log(static_cast<double>(k));
    return lk - 2.0 * std::log(lk);
}

/// Truncation T = (e^A - 1)/A; the integral of g over [0, T] is then exactly 1.
inline double product_form_truncation(double a) {
    return std::expm1(a) / a;
}

/// Quintic cutoff: 1 on u <= 0, 0 on u >= 1, C^2 in between.
inline double quintic_cutoff(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

} // namespace gapcover
