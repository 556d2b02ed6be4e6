#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gapcover/arith.hpp"
#include "gapcover/errors.hpp"

namespace gapcover {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Derived construction parameters.
///   y = exp((1 - eps) log x log3 x / log2 x)
///   z = x / log2 x
///   U = floor(c_u x log y / log2 x)
/// y and z stay real; U is floored once (stage boundaries then use
/// p <= y and y < p <= z with the real cutoffs).
struct Params {
    std::int64_t x = 0;
    double eps = 0.0;
    double c_u = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::int64_t u = 0;

    double log_x() const { return std::log(static_cast<double>(x)); }
    double log2_x() const { return std::log(log_x()); }
    double log3_x() const { return std::log(log2_x()); }
    double log_y() const { return std::log(y); }

    /// Truncation index: only even m below this get a covering interval.
    std::int64_t m_cutoff() const {
        const double v = static_cast<double>(u) / (z * log2_x() * log2_x());
        return static_cast<std::int64_t>(std::floor(v));
    }

    bool operator==(const Params&) const = default;
};

inline Params derive_params(std::int64_t x, double eps, double c_u) {
    if (x < 100) throw ParameterError("derive_params: x must be >= 100, got " + std::to_string(x));
    if (!(eps > 0.0 && eps < 0.5)) throw ParameterError("derive_params: eps must lie in (0, 1/2)");
    if (!(c_u > 0.0)) throw ParameterError("derive_params: c_u must be positive");

    const long double lx = std::log(static_cast<long double>(x));
    const long double l2x = std::log(lx);
    const long double l3x = std::log(l2x);
    const long double y = std::exp((1.0L - static_cast<long double>(eps)) * lx * l3x / l2x);
    const long double z = static_cast<long double>(x) / l2x;
    const long double u = static_cast<long double>(c_u) * static_cast<long double>(x) * std::log(y) / l2x;
    if (!std::isfinite(static_cast<double>(y)) || !std::isfinite(static_cast<double>(z)) ||
        !std::isfinite(static_cast<double>(u)))
        throw ParameterError("derive_params: non-finite intermediate value");

    Params p;
    p.x = x;
    p.eps = eps;
    p.c_u = c_u;
    p.y = static_cast<double>(y);
    p.z = static_cast<double>(z);
    p.u = static_cast<std::int64_t>(std::floor(u));
    return p;
}

// ---------------------------------------------------------------------------
// Residue assignment
// ---------------------------------------------------------------------------

enum class Provenance { stage1_zero, stage1_one, measure_sampled, greedy, appended, padded };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::stage1_zero: return "stage1-zero";
        case Provenance::stage1_one: return "stage1-one";
        case Provenance::measure_sampled: return "measure-sampled";
        case Provenance::greedy: return "greedy";
        case Provenance::appended: return "appended";
        case Provenance::padded: return "padded";
    }
    return "?";
}

/// Partial or total map p -> a_p over primes p <= x, one class per prime.
class ResidueAssignment {
public:
    struct Entry {
        std::int64_t residue;
        Provenance tag;
        bool operator==(const Entry&) const = default;
    };

    void assign(std::int64_t p, std::int64_t residue, Provenance tag) {
        if (residue < 0 || residue >= p)
            throw ParameterError("ResidueAssignment: residue " + std::to_string(residue) +
                                 " out of range mod " + std::to_string(p));
        auto [it, inserted] = entries_.emplace(p, Entry{residue, tag});
        (void)it;
        if (!inserted)
            throw ParameterError("ResidueAssignment: prime " + std::to_string(p) + " assigned twice");
    }

    bool contains(std::int64_t p) const { return entries_.count(p) != 0; }

    std::optional<std::int64_t> residue(std::int64_t p) const {
        auto it = entries_.find(p);
        if (it == entries_.end()) return std::nullopt;
        return it->second.residue;
    }

    const std::map<std::int64_t, Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::vector<std::pair<std::int64_t, std::int64_t>> covering_classes() const {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        out.reserve(entries_.size());
        for (const auto& [p, e] : entries_) out.emplace_back(p, e.residue);
        return out;
    }

    bool operator==(const ResidueAssignment&) const = default;

private:
    std::map<std::int64_t, Entry> entries_;
};

/// CRT over a total assignment on the primes <= x: least N >= 1 with
/// N == -a_p (mod p) for every p.  Refuses partial assignments.
inline BigInt crt_combine(const ResidueAssignment& assignment, const PrimeTable& primes) {
    std::vector<std::int64_t> missing;
    for (std::int64_t p : primes.primes())
        if (!assignment.contains(p)) missing.push_back(p);
    if (!missing.empty()) {
        std::string msg = "crt_combine: assignment not total; missing primes:";
        for (std::size_t i = 0; i < missing.size() && i < 8; ++i) msg += " " + std::to_string(missing[i]);
        if (missing.size() > 8) msg += " ... (" + std::to_string(missing.size()) + " total)";
        throw ParameterError(msg);
    }
    return crt_combine(assignment.covering_classes());
}

// ---------------------------------------------------------------------------
// Stage one
// ---------------------------------------------------------------------------

/// First-stage classes: a_p = 1 for p <= y, a_p = 0 for y < p <= z.
/// Primes in (z, x] stay unassigned for the later covering stages.
inline ResidueAssignment stage_one_assign(const Params& params, const PrimeTable& primes) {
    if (primes.limit() < params.x)
        throw ParameterError("stage_one_assign: prime table limit below x");
    ResidueAssignment a;
    for (std::int64_t p : primes.primes()) {
        if (static_cast<double>(p) <= params.y)
            a.assign(p, 1 % p, Provenance::stage1_one);
        else if (static_cast<double>(p) <= params.z)
            a.assign(p, 0, Provenance::stage1_zero);
        else if (p > params.x)
            break;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Residual sets
// ---------------------------------------------------------------------------

/// Survivors of stage one inside [1, U], split into the smooth part R' and
/// the per-m prime families R_m (n = m p with p > z).
struct ResidualSets {
    std::vector<std::int64_t> r_prime;                       // sorted
    std::map<std::int64_t, std::vector<std::int64_t>> r_by_m; // even smooth m -> sorted primes
    std::int64_t m_cutoff = 0;

    std::int64_t total_rm_size() const {
        std::int64_t s = 0;
        for (const auto& [m, v] : r_by_m) s += static_cast<std::int64_t>(v.size());
        return s;
    }

    bool operator==(const ResidualSets&) const = default;
};

namespace detail {

/// y-smooth integers in [1, limit], ascending.
inline std::vector<std::int64_t> smooth_numbers(std::int64_t limit, double y, const PrimeTable& primes) {
    std::vector<std::int64_t> base;
    for (std::int64_t p : primes.primes()) {
        if (static_cast<double>(p) > y) break;
        base.push_back(p);
    }
    std::vector<std::int64_t> out;
    // depth-first over prime powers
    struct Frame { std::int64_t value; std::size_t next; };
    std::vector<Frame> stack{{1, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        out.push_back(f.value);
        for (std::size_t i = f.next; i < base.size(); ++i) {
            if (f.value > limit / base[i]) break;
            stack.push_back({f.value * base[i], i});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool coprime_to_small_primes(std::int64_t n, double bound, const PrimeTable& primes) {
    // gcd(n, P_bound) == 1 with the primorial never formed
    if (n == 0) return bound < 2.0;   // gcd(0, P) = P
    for (std::int64_t p : primes.primes()) {
        if (static_cast<double>(p) > bound) break;
        if (n % p == 0) return false;
    }
    return true;
}

} // namespace detail

/// Enumerate R' and every R_m.  R' holds the y-smooth m <= U with
/// (m-1, P_y) = 1; R_m holds the primes z < p <= U/m with (mp-1, P_y) = 1,
/// for even y-smooth m <= U/z.  Together with stage one these partition [1, U].
inline ResidualSets compute_residuals(const Params& params, const PrimeTable& primes,
                                      std::int64_t enum_budget = 10'000'000) {
    if (params.u > enum_budget)
        throw ResourceError("compute_residuals: U = " + std::to_string(params.u) +
                            " exceeds enumeration budget " + std::to_string(enum_budget));

    ResidualSets out;
    out.m_cutoff = params.m_cutoff();

    // the p in R_m run up to U/m <= U/2; extend the table if the caller's is short
    const std::int64_t need = std::max<std::int64_t>(params.u / 2, 2);
    PrimeTable extended;
    const PrimeTable& table = (primes.limit() >= need) ? primes : (extended = sieve_primes(need), extended);

    for (std::int64_t m : detail::smooth_numbers(params.u, params.y, primes)) {
        if (detail::coprime_to_small_primes(m - 1, params.y, primes))
            out.r_prime.push_back(m);
    }

    const auto m_max = static_cast<std::int64_t>(static_cast<double>(params.u) / params.z);
    for (std::int64_t m = 2; m <= m_max; m += 2) {
        if (!is_smooth(m, static_cast<std::int64_t>(params.y))) continue;
        std::vector<std::int64_t> rm;
        for (std::int64_t p : table.in_range(static_cast<std::int64_t>(params.z), params.u / m)) {
            if (static_cast<double>(p) <= params.z) continue;
            if (detail::coprime_to_small_primes(m * p - 1, params.y, primes)) rm.push_back(p);
        }
        if (!rm.empty()) out.r_by_m.emplace(m, std::move(rm));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Interval allocation
// ---------------------------------------------------------------------------

/// A closed integer interval [lo, hi] inside [x/2, x]; the main part is
/// [lo, main_hi], the appended completion part is (main_hi, hi].
struct Interval {
    std::int64_t lo = 0;
    std::int64_t main_hi = 0;
    std::int64_t hi = 0;
    std::int64_t length() const { return hi - lo + 1; }
    bool operator==(const Interval&) const = default;
};

struct IntervalAllocation {
    std::map<std::int64_t, Interval> by_m;
    double delta = 0.0;
    bool operator==(const IntervalAllocation&) const = default;
};

/// Greedy left-to-right packing of disjoint intervals inside [x/2, x], one
/// per even m < m_cutoff with R_m nonempty.  Main length ceil(delta |R_m| log x),
/// appended length ceil(2 eps |R_m| log x).  Reports the deficit when the
/// packing leaves [x/2, x] rather than shrinking delta.
inline IntervalAllocation allocate_intervals(const ResidualSets& residuals, const Params& params, double delta) {
    if (!(delta > 0.0)) throw ParameterError("allocate_intervals: delta must be positive");
    IntervalAllocation alloc;
    alloc.delta = delta;

    const double log_x = params.log_x();
    std::int64_t cursor = (params.x + 1) / 2;
    for (const auto& [m, rm] : residuals.r_by_m) {
        if (m >= residuals.m_cutoff || rm.empty()) continue;
        const auto size = static_cast<double>(rm.size());
        const auto main_len = static_cast<std::int64_t>(std::ceil(delta * size * log_x));
        const auto appendix = static_cast<std::int64_t>(std::ceil(2.0 * params.eps * size * log_x));
        Interval iv;
        iv.lo = cursor;
        iv.main_hi = cursor + main_len - 1;
        iv.hi = iv.main_hi + appendix;
        if (iv.hi > params.x)
            throw AllocationError("allocate_intervals: packing exceeds [x/2, x] at m = " + std::to_string(m) +
                                      "; deficit " + std::to_string(iv.hi - params.x),
                                  iv.hi - params.x);
        alloc.by_m.emplace(m, iv);
        cursor = iv.hi + 1;
    }
    return alloc;
}

} // namespace gapcover
