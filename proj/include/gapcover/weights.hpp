#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gapcover/arith.hpp"
#include "gapcover/construction.hpp"
#include "gapcover/errors.hpp"
#include "gapcover/smooth_functions.hpp"

namespace gapcover {

// ---------------------------------------------------------------------------
// Weight specification
// ---------------------------------------------------------------------------

/// The data defining the sieve weights: the admissible shifts H, the cutoff
/// functions F (one per coordinate and tensor term) and G, and the tensor
/// coefficients c_j.  Each F_{l,j} is supported on [0, b_{l,j}] with
/// sum_l b_{l,j} <= 1/10, and G on [0, 1].
struct WeightSpec {
    int k = 1;
    int w = 2;
    std::vector<std::int64_t> h;                 // h_1 < ... < h_k
    std::vector<double> c;                       // per tensor term, positive
    std::vector<std::vector<PiecewisePoly>> f;   // f[l][j], l = 0..k-1, j = 0..J-1
    PiecewisePoly g;                             // supported on [0, 1]

    std::size_t terms() const { return c.size(); }
    bool operator==(const WeightSpec&) const = default;
};

/// Largest w whose primorial stays within the budget (w in {2, 3} at the
/// scales this library runs at).
inline int default_small_prime_threshold(std::int64_t primorial_budget = 6) {
    int w = 2;
    std::int64_t prod = 2;
    const PrimeTable table = sieve_primes(64);
    for (std::int64_t p : table.primes()) {
        if (p == 2) continue;
        if (prod > primorial_budget / p) break;
        prod *= p;
        w = static_cast<int>(p);
    }
    return w;
}

/// H = {h_j = p_{pi(k)+j} P_w}: the j-th prime beyond k scaled by the
/// primorial of w.  Admissible mod every prime: all h_j vanish mod p <= w,
/// and mod larger p the h_j avoid the zero class.
inline WeightSpec build_admissible_set(int k, int w, std::int64_t primorial_budget = 1'000'000) {
    if (k < 1) throw ParameterError("build_admissible_set: k must be >= 1");
    if (w < 2) throw ParameterError("build_admissible_set: w must be >= 2");
    BigInt pw = primorial(w);
    if (pw > primorial_budget)
        throw ResourceError("build_admissible_set: primorial of w exceeds budget");
    const auto pw64 = pw.convert_to<std::int64_t>();

    // enough primes for p_{pi(k)+k}
    std::int64_t limit = 64;
    PrimeTable table = sieve_primes(limit);
    for (;;) {
        const std::int64_t need = table.count_below(k) + k;
        if (static_cast<std::int64_t>(table.size()) >= need) break;
        limit *= 2;
        table = sieve_primes(limit);
    }

    WeightSpec spec;
    spec.k = k;
    spec.w = w;
    const std::int64_t base = table.count_below(k);
    for (int j = 1; j <= k; ++j)
        spec.h.push_back(table[static_cast<std::size_t>(base + j - 1)] * pw64);
    return spec;
}

namespace detail {

/// One decreasing cutoff shape on [0, b]: the reciprocal profile times a
/// quintic roll-off over the outer half, fitted as a monotone cubic spline.
inline PiecewisePoly cutoff_shape(double slope, double scale, double b, int knots = 24) {
    TruncatedReciprocal g{slope, product_form_truncation(slope)};
    auto target = [&](double t) {
        const double u = t / b;
        const double roll = (u <= 0.5) ? 1.0 : quintic_cutoff(2.0 * u - 1.0);
        return g(scale * t) * roll;
    };
    return monotone_cubic_fit(target, 0.0, b, knots);
}

/// Support-box families with sum 1/10 per term, closed under coordinate
/// permutation so the resulting F is symmetric.
inline std::vector<std::vector<double>> support_boxes(int k) {
    switch (k) {
        case 1:
            return {{0.1}};
        case 2:
            return {{0.05, 0.05}, {0.034, 0.066}, {0.066, 0.034}};
        case 3:
            return {{0.1 / 3, 0.1 / 3, 0.1 / 3},
                    {0.05, 0.025, 0.025},
                    {0.025, 0.05, 0.025},
                    {0.025, 0.025, 0.05}};
        default:
            throw ResourceError("default weight spec: tensor templates cover k <= 3 only");
    }
}

} // namespace detail

/// Default spec: admissible H plus the rescaled reciprocal product shape for
/// F and the 1 - t ramp for G.  For k below 4 the large-k slope formula is
/// meaningless, so a fixed slope of 1 is used there.
inline WeightSpec default_weight_spec(int k, int w) {
    WeightSpec spec = build_admissible_set(k, w);
    const double slope = (k >= 4) ? product_form_slope(k) : 1.0;
    const double scale = 10.0 * k;

    const auto boxes = detail::support_boxes(k);
    std::map<double, PiecewisePoly> cache;
    spec.c.assign(boxes.size(), 1.0);
    spec.f.resize(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
        for (const auto& box : boxes) {
            const double b = box[static_cast<std::size_t>(l)];
            auto it = cache.find(b);
            if (it == cache.end()) it = cache.emplace(b, detail::cutoff_shape(slope, scale, b)).first;
            spec.f[static_cast<std::size_t>(l)].push_back(it->second);
        }
    }
    spec.g = linear_ramp();
    return spec;
}

// ---------------------------------------------------------------------------
// The multiplicative functions omega and the singular series
// ---------------------------------------------------------------------------

/// omega_{m,q}(p): how many n in [1, p] satisfy n + h_i q == 0 or
/// m (n + h_i q) == 1 (mod p) for some i.  Extended totally multiplicatively
/// by omega(p^a) = omega(p)^a.
inline int omega_mq(std::int64_t p, std::int64_t m, std::int64_t q, const std::vector<std::int64_t>& h) {
    int count = 0;
    for (std::int64_t n = 1; n <= p; ++n) {
        bool hit = false;
        for (std::int64_t hi : h) {
            if ((n + hi * q) % p == 0 || (m * (n + hi * q) - 1) % p == 0) { hit = true; break; }
        }
        if (hit) ++count;
    }
    return count;
}

/// omega^{(2)}_{m,p0,h}(p): the count with n multiplying the shift
/// differences h_i - h instead.
inline int omega2_mph(std::int64_t p, std::int64_t m, std::int64_t p0, std::int64_t h,
                      const std::vector<std::int64_t>& shifts) {
    int count = 0;
    for (std::int64_t n = 1; n <= p; ++n) {
        bool hit = false;
        for (std::int64_t hi : shifts) {
            const std::int64_t v = p0 + (hi - h) * n;
            if (v % p == 0 || ((m * v - 1) % p + p) % p == 0) { hit = true; break; }
        }
        if (hit) ++count;
    }
    return count;
}

/// Result of an Euler product; degenerate marks a vanishing factor.
struct SeriesValue {
    double value = 0.0;
    bool degenerate = false;
};

namespace detail {

template <typename OmegaFn>
SeriesValue euler_product(OmegaFn&& omega_of, double y, int exponent, const PrimeTable& primes) {
    double log_acc = 0.0;
    for (std::int64_t p : primes.primes()) {
        if (static_cast<double>(p) > y) break;
        const int om = omega_of(p);
        if (om >= p) return {0.0, true};
        log_acc += std::log1p(-static_cast<double>(om) / static_cast<double>(p));
        log_acc -= exponent * std::log1p(-1.0 / static_cast<double>(p));
    }
    return {std::exp(log_acc), false};
}

} // namespace detail

/// S_{m,q} = prod_{p <= y} (1 - omega_{m,q}(p)/p) (1 - 1/p)^{-2k},
/// accumulated in log space.  A vanishing factor flags the series as
/// degenerate instead of throwing.
inline SeriesValue singular_series(std::int64_t m, std::int64_t q, const WeightSpec& spec, double y) {
    PrimeTable primes = sieve_primes(std::max<std::int64_t>(static_cast<std::int64_t>(y) + 1, 3));
    return detail::euler_product([&](std::int64_t p) { return omega_mq(p, m, q, spec.h); }, y, 2 * spec.k,
                                 primes);
}

/// S^{(2)}_{m,p0,h}: same shape with exponent 2k - 2 and omega^{(2)}; the
/// primes up to w contribute only the (1 - 1/p)^{-(2k-2)} factor.
inline SeriesValue singular_series_2(std::int64_t m, std::int64_t p0, std::int64_t h, const WeightSpec& spec,
                                     double y) {
    PrimeTable primes = sieve_primes(std::max<std::int64_t>(static_cast<std::int64_t>(y) + 1, 3));
    double log_acc = 0.0;
    for (std::int64_t p : primes.primes()) {
        if (static_cast<double>(p) > y) break;
        log_acc -= (2 * spec.k - 2) * std::log1p(-1.0 / static_cast<double>(p));
        if (p <= spec.w) continue;
        const int om = omega2_mph(p, m, p0, h, spec.h);
        if (om >= p) return {0.0, true};
        log_acc += std::log1p(-static_cast<double>(om) / static_cast<double>(p));
    }
    return {std::exp(log_acc), false};
}

/// The m-dependent constant block that multiplies S^{(2)} in the lower-bound
/// chain: 2^{-(2k-1)} prod_{2<p|m} (p-2)/(p-1) prod_{2<p<=w} (1-2/p)^{-1} (1-1/p)^{2k}.
inline double sigma_m_factor(std::int64_t m, const WeightSpec& spec) {
    double v = std::pow(2.0, -(2.0 * spec.k - 1.0));
    for (std::int64_t p : distinct_prime_factors(m))
        if (p > 2) v *= static_cast<double>(p - 2) / static_cast<double>(p - 1);
    const PrimeTable table = sieve_primes(std::max<std::int64_t>(spec.w, 3));
    for (std::int64_t p : table.primes()) {
        if (p <= 2 || p > spec.w) continue;
        v *= 1.0 / (1.0 - 2.0 / static_cast<double>(p));
        v *= std::pow(1.0 - 1.0 / static_cast<double>(p), 2.0 * spec.k);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Lambda coefficients
// ---------------------------------------------------------------------------

/// lambda_{d,e} = (prod mu(d_i) mu(e_i)) sum_j c_j prod_l F_{l,j}(log d_l / log x)
/// G(log e_l / log y).  Vanishes on non-squarefree tuples, outside the
/// 1/10 support of F, and for any e_l > y (G's support is [0, 1]).
inline double lambda_coeff(const std::vector<std::int64_t>& d, const std::vector<std::int64_t>& e,
                           const WeightSpec& spec, std::int64_t x, double y) {
    if (static_cast<int>(d.size()) != spec.k || static_cast<int>(e.size()) != spec.k)
        throw ParameterError("lambda_coeff: tuple length must equal k");
    const double log_x = std::log(static_cast<double>(x));
    const double log_y = std::log(y);

    int sign = 1;
    for (std::int64_t di : d) {
        const int mu = mobius(di);
        if (mu == 0) return 0.0;
        sign *= mu;
    }
    double g_part = 1.0;
    for (std::int64_t ei : e) {
        const int mu = mobius(ei);
        if (mu == 0) return 0.0;
        sign *= mu;
        g_part *= spec.g(std::log(static_cast<double>(ei)) / log_y);
    }
    if (g_part == 0.0) return 0.0;

    double sum = 0.0;
    for (std::size_t j = 0; j < spec.terms(); ++j) {
        double prod = spec.c[j];
        for (int l = 0; l < spec.k && prod != 0.0; ++l)
            prod *= spec.f[static_cast<std::size_t>(l)][j](std::log(static_cast<double>(d[static_cast<std::size_t>(l)])) / log_x);
        sum += prod;
    }
    return sign * g_part * sum;
}

// ---------------------------------------------------------------------------
// The probability measure
// ---------------------------------------------------------------------------

/// Probability measure on the residue classes mod q.  Uniform measures (the
/// degenerate fallback and the budget degradation) are stored implicitly so
/// a large modulus does not materialize a large vector.
struct Measure {
    std::int64_t m = 0;
    std::int64_t q = 0;
    bool uniform = false;
    std::vector<double> probabilities;   // indexed by residue, size q; empty if uniform
    double alpha = 0.0;                  // normalizing constant (1 / total weight)
    bool degenerate_fallback = false;    // all weights vanished; uniform used

    double probability_of(std::int64_t element) const {
        if (uniform) return 1.0 / static_cast<double>(q);
        return probabilities[static_cast<std::size_t>(element % q)];
    }
};

inline Measure uniform_measure(std::int64_t m, std::int64_t q, bool degenerate_flag = false) {
    Measure mu;
    mu.m = m;
    mu.q = q;
    mu.uniform = true;
    mu.degenerate_fallback = degenerate_flag;
    return mu;
}

namespace detail {

/// Distinct prime factors (from a fixed list) of each element of the
/// progression base + step * n for n in a block [lo, hi], by sieving the
/// progression.  factors[n - lo] lists indices into `primes`.
inline std::vector<std::vector<std::uint16_t>> sieve_progression_factors(
    std::int64_t base, std::int64_t step, std::int64_t lo, std::int64_t hi,
    const std::vector<std::int64_t>& primes) {
    std::vector<std::vector<std::uint16_t>> factors(static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t idx = 0; idx < primes.size(); ++idx) {
        const std::int64_t p = primes[idx];
        if (step % p == 0) {
            // p divides the step: either every element or none
            if ((base % p + p) % p == 0)
                for (std::int64_t n = lo; n <= hi; ++n)
                    factors[static_cast<std::size_t>(n - lo)].push_back(static_cast<std::uint16_t>(idx));
            continue;
        }
        // solve base + step n == 0 (mod p), then advance to the block
        const std::int64_t inv = egcd_inverse(((step % p) + p) % p, p);
        std::int64_t n0 = ((-(base % p) % p + p) % p) * inv % p;
        if (n0 < lo) n0 += ((lo - n0 + p - 1) / p) * p;
        for (std::int64_t n = n0; n <= hi; n += p)
            factors[static_cast<std::size_t>(n - lo)].push_back(static_cast<std::uint16_t>(idx));
    }
    return factors;
}

/// sum over squarefree d composed of the given primes of
/// mu(d) shape(log d / log_scale), for each shape in shapes.
/// Subset enumeration over the factor list; adds into out[j].
inline void signed_divisor_sums(const std::vector<std::uint16_t>& factor_idx,
                                const std::vector<double>& log_primes, double inv_log_scale,
                                const std::vector<const PiecewisePoly*>& shapes, double* out) {
    const std::size_t nf = factor_idx.size();
    const std::size_t subsets = std::size_t{1} << nf;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        double log_d = 0.0;
        int sign = 1;
        for (std::size_t b = 0; b < nf; ++b)
            if (mask & (std::size_t{1} << b)) {
                log_d += log_primes[factor_idx[b]];
                sign = -sign;
            }
        const double arg = log_d * inv_log_scale;
        for (std::size_t j = 0; j < shapes.size(); ++j) out[j] += sign * (*shapes[j])(arg);
    }
}

} // namespace detail

inline constexpr std::int64_t kMeasureEnumMax = 1'000'000;

/// mu_{m,q}: for each residue a mod q, the total squared lambda-sum over the
/// sieved progression n <= U/m, n == a (mod q), (n (m n - 1), P_w) = 1,
/// normalized to a probability vector.  Divisor sums come from sieved
/// factorizations of the sequences n + h_i q and m (n + h_i q) - 1; only
/// primes inside the support of F resp. G can contribute, so the sieving
/// prime lists are cut there.
inline Measure mu_measure(std::int64_t m, std::int64_t q, const WeightSpec& spec, const Params& params,
                          std::int64_t enum_budget = kMeasureEnumMax) {
    if (q < 2) throw ParameterError("mu_measure: q must be a prime >= 2");
    if (m < 1) throw ParameterError("mu_measure: m must be >= 1");
    const std::int64_t n_max = params.u / m;
    if (n_max > enum_budget)
        throw ResourceError("mu_measure: U/m = " + std::to_string(n_max) + " exceeds budget " +
                            std::to_string(enum_budget));
    if (n_max < 1) throw ParameterError("mu_measure: empty enumeration range");

    const double log_x = params.log_x();
    const double log_y = params.log_y();

    // biggest prime that can appear in a d with F != 0 (support <= 1/10)
    double b_max = 0.0;
    for (const auto& per_l : spec.f)
        for (const auto& shape : per_l) b_max = std::max(b_max, shape.support_end());
    const auto d_prime_cap = static_cast<std::int64_t>(std::floor(std::exp(b_max * log_x)));
    const auto e_prime_cap = static_cast<std::int64_t>(std::floor(params.y));

    const PrimeTable small = sieve_primes(std::max<std::int64_t>({d_prime_cap, e_prime_cap, spec.w, 2}));
    std::vector<std::int64_t> d_primes, e_primes, w_primes;
    std::vector<double> d_logs, e_logs;
    for (std::int64_t p : small.primes()) {
        if (p <= d_prime_cap) { d_primes.push_back(p); d_logs.push_back(std::log(static_cast<double>(p))); }
        if (p <= e_prime_cap) { e_primes.push_back(p); e_logs.push_back(std::log(static_cast<double>(p))); }
        if (p <= spec.w) w_primes.push_back(p);
    }

    std::vector<double> weight(static_cast<std::size_t>(q), 0.0);
    std::vector<const PiecewisePoly*> f_shapes(spec.terms());
    std::vector<double> sf(spec.terms());
    std::vector<double> per_term(spec.terms(), 0.0);
    const double inv_log_x = 1.0 / log_x;
    const double inv_log_y = 1.0 / log_y;
    const std::vector<const PiecewisePoly*> g_shape{&spec.g};

    // Blocked over n so the per-element factor lists stay small in memory.
    constexpr std::int64_t kBlock = 1 << 15;
    for (std::int64_t lo = 1; lo <= n_max; lo += kBlock) {
        const std::int64_t hi = std::min(lo + kBlock - 1, n_max);
        std::vector<std::vector<std::vector<std::uint16_t>>> a_factors, b_factors;
        for (int i = 0; i < spec.k; ++i) {
            const std::int64_t hq = spec.h[static_cast<std::size_t>(i)] * q;
            a_factors.push_back(detail::sieve_progression_factors(hq, 1, lo, hi, d_primes));
            b_factors.push_back(detail::sieve_progression_factors(m * hq - 1, m, lo, hi, e_primes));
        }

        for (std::int64_t n = lo; n <= hi; ++n) {
            bool sieved_out = false;
            for (std::int64_t p : w_primes) {
                if (n % p == 0 || ((m * n - 1) % p + p) % p == 0) { sieved_out = true; break; }
            }
            if (sieved_out) continue;

            double g_prod = 1.0;   // prod_l S_G(l)
            bool zero = false;
            for (int l = 0; l < spec.k && !zero; ++l) {
                for (std::size_t j = 0; j < spec.terms(); ++j) {
                    f_shapes[j] = &spec.f[static_cast<std::size_t>(l)][j];
                    sf[j] = 0.0;
                }
                detail::signed_divisor_sums(
                    a_factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(n - lo)], d_logs,
                    inv_log_x, f_shapes, sf.data());
                double sg = 0.0;
                detail::signed_divisor_sums(
                    b_factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(n - lo)], e_logs,
                    inv_log_y, g_shape, &sg);
                if (sg == 0.0) { zero = true; break; }
                g_prod *= sg;
                if (l == 0)
                    for (std::size_t j = 0; j < spec.terms(); ++j) per_term[j] = spec.c[j] * sf[j];
                else
                    for (std::size_t j = 0; j < spec.terms(); ++j) per_term[j] *= sf[j];
            }
            if (zero) continue;
            double term_sum = 0.0;   // sum_j c_j prod_l S_F(l, j)
            for (double t : per_term) term_sum += t;
            const double inner = term_sum * g_prod;
            weight[static_cast<std::size_t>(n % q)] += inner * inner;
        }
    }

    double total = 0.0;
    for (double v : weight) total += v;
    if (total <= 0.0) return uniform_measure(m, q, true);

    Measure mu;
    mu.m = m;
    mu.q = q;
    mu.alpha = 1.0 / total;
    mu.probabilities.resize(static_cast<std::size_t>(q));
    for (std::int64_t a = 0; a < q; ++a)
        mu.probabilities[static_cast<std::size_t>(a)] = weight[static_cast<std::size_t>(a)] * mu.alpha;
    return mu;
}

} // namespace gapcover
