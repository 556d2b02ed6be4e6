#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "gapcover/arith.hpp"
#include "gapcover/construction.hpp"
#include "gapcover/errors.hpp"
#include "gapcover/merit.hpp"
#include "gapcover/rng.hpp"
#include "gapcover/weights.hpp"

namespace gapcover {

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draw one residue class mod q by inverse CDF over the measure.
/// Deterministic given the seed.
inline std::int64_t sample_class(const Measure& measure, std::uint64_t seed) {
    SplitMix64 rng(seed);
    if (measure.uniform) return static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(measure.q)));
    const double r = rng.uniform01();
    double acc = 0.0;
    std::int64_t last_positive = 0;
    for (std::int64_t a = 0; a < measure.q; ++a) {
        const double p = measure.probabilities[static_cast<std::size_t>(a)];
        if (p > 0.0) last_positive = a;
        acc += p;
        if (r < acc) return a;
    }
    return last_positive;   // rounding at the top of the CDF
}

// ---------------------------------------------------------------------------
// Randomized covering of one residual family
// ---------------------------------------------------------------------------

struct CoverOutcome {
    std::map<std::int64_t, std::int64_t> class_by_q;   // sampled residue per prime
    std::vector<std::int64_t> uncovered;               // elements hit by no class
    int trials_run = 0;
};

/// Sample one class per prime q (measure-weighted), several independent
/// trials, keep the trial with the fewest uncovered elements.  Stops early
/// once at most eps_cover * |elements| remain uncovered.  Streams are seeded
/// per (q, trial), so enlarging the measure list keeps earlier draws intact.
inline CoverOutcome cover_residual_set(const std::vector<std::int64_t>& elements,
                                       const std::vector<Measure>& measures, double eps_cover,
                                       int max_trials, std::uint64_t seed) {
    CoverOutcome best;
    if (elements.empty()) return best;   // nothing to cover, keep the primes free
    const auto target = static_cast<std::size_t>(std::floor(eps_cover * static_cast<double>(elements.size())));
    bool have_best = false;
    for (int trial = 0; trial < std::max(1, max_trials); ++trial) {
        std::map<std::int64_t, std::int64_t> classes;
        for (const auto& mu : measures)
            classes.emplace(mu.q,
                            sample_class(mu, derive_seed(seed, static_cast<std::uint64_t>(mu.q),
                                                         static_cast<std::uint64_t>(trial))));
        std::vector<std::int64_t> uncovered;
        for (std::int64_t p : elements) {
            bool hit = false;
            for (const auto& [q, a] : classes)
                if (p % q == a) { hit = true; break; }
            if (!hit) uncovered.push_back(p);
        }
        if (!have_best || uncovered.size() < best.uncovered.size()) {
            best.class_by_q = std::move(classes);
            best.uncovered = std::move(uncovered);
            have_best = true;
        }
        best.trials_run = trial + 1;
        if (best.uncovered.size() <= target) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Completion stages
// ---------------------------------------------------------------------------

struct AppendOutcome {
    std::map<std::int64_t, std::int64_t> class_by_q;
    std::int64_t deficit = 0;   // elements left unpaired for lack of primes
};

/// Pair each remaining element with a distinct unused prime, assigning the
/// class that contains the element.  Elements and primes are consumed in
/// ascending order; a shortage is reported, not fatal.
inline AppendOutcome append_stage(const std::vector<std::int64_t>& uncovered,
                                  const std::vector<std::int64_t>& appended_primes) {
    AppendOutcome out;
    std::vector<std::int64_t> elems(uncovered);
    std::vector<std::int64_t> primes(appended_primes);
    std::sort(elems.begin(), elems.end());
    std::sort(primes.begin(), primes.end());
    std::size_t i = 0;
    for (; i < elems.size() && i < primes.size(); ++i)
        out.class_by_q.emplace(primes[i], elems[i] % primes[i]);
    out.deficit = static_cast<std::int64_t>(elems.size()) - static_cast<std::int64_t>(i);
    return out;
}

enum class GreedyStrategy { max_coverage, one_element_per_prime };

struct GreedyOutcome {
    std::map<std::int64_t, std::int64_t> class_by_q;
    std::vector<std::int64_t> still_uncovered;
    std::int64_t primes_used = 0;
};

/// Give each free prime (largest first) the residue class that covers the
/// most remaining elements; ties break to the smallest residue.  The
/// one-element-per-prime baseline strategy is kept for comparison.
inline GreedyOutcome greedy_stage(std::vector<std::int64_t> remaining,
                                  const std::vector<std::int64_t>& free_primes,
                                  GreedyStrategy strategy = GreedyStrategy::max_coverage) {
    std::vector<std::int64_t> primes(free_primes);
    std::sort(primes.begin(), primes.end(), std::greater<>());
    std::sort(remaining.begin(), remaining.end());

    GreedyOutcome out;
    std::unordered_map<std::int64_t, std::int64_t> histogram;
    for (std::int64_t q : primes) {
        if (remaining.empty()) break;
        std::int64_t chosen;
        if (strategy == GreedyStrategy::one_element_per_prime) {
            chosen = remaining.front() % q;
        } else {
            histogram.clear();
            for (std::int64_t n : remaining) ++histogram[n % q];
            // max count, then smallest residue: independent of bucket order
            chosen = -1;
            std::int64_t best_count = 0;
            for (const auto& [residue, count] : histogram)
                if (count > best_count || (count == best_count && residue < chosen)) {
                    chosen = residue;
                    best_count = count;
                }
        }
        out.class_by_q.emplace(q, chosen);
        ++out.primes_used;
        std::erase_if(remaining, [&](std::int64_t n) { return n % q == chosen; });
    }
    out.still_uncovered = std::move(remaining);
    return out;
}

// ---------------------------------------------------------------------------
// Reports and certificates
// ---------------------------------------------------------------------------

struct CoverageReportPerM {
    std::int64_t m = 0;
    std::int64_t rm_size = 0;
    std::int64_t interval_length = 0;
    std::int64_t sampled_classes = 0;
    std::int64_t uncovered_after_sampling = 0;
    std::int64_t appended_classes = 0;
    bool measures_degraded = false;   // budget fallback to uniform measures
    bool operator==(const CoverageReportPerM&) const = default;
};

struct CoverageReport {
    std::vector<CoverageReportPerM> per_m;
    std::int64_t remaining_after_stages = 0;   // before greedy
    std::int64_t greedy_primes_used = 0;
    std::int64_t uncovered_remaining = 0;      // after greedy
    bool success = false;
    bool operator==(const CoverageReport&) const = default;
};

enum class VerifyMode { modular, primality };

inline const char* verify_mode_name(VerifyMode m) {
    return m == VerifyMode::modular ? "modular" : "primality";
}

struct GapCertificate {
    BigInt n;                    // [n+1, n+U] is the prime-free window
    std::int64_t u = 0;
    std::int64_t x = 0;
    VerifyMode mode = VerifyMode::modular;
    bool verified = false;
    std::uint64_t seed = 0;
    std::string assignment_digest;
    MeritRecord merit;
    bool operator==(const GapCertificate&) const = default;
};

/// FNV-1a over the (prime, residue) pairs; identifies an assignment in the
/// certificate without embedding the whole map.
inline std::string assignment_digest(const ResidueAssignment& assignment) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    };
    for (const auto& [p, e] : assignment.entries()) {
        mix(static_cast<std::uint64_t>(p));
        mix(static_cast<std::uint64_t>(e.residue));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace detail {

/// Straight coverage scan of [1, U]: for each n the smallest assigned prime
/// whose class contains n, or 0.  Independent of any covering bookkeeping.
inline std::vector<std::int64_t> coverage_witnesses(const ResidueAssignment& assignment, std::int64_t u) {
    std::vector<std::int64_t> witness(static_cast<std::size_t>(u) + 1, 0);
    for (const auto& [p, e] : assignment.entries()) {
        std::int64_t start = e.residue == 0 ? p : e.residue;
        for (std::int64_t n = start; n <= u; n += p)
            if (witness[static_cast<std::size_t>(n)] == 0) witness[static_cast<std::size_t>(n)] = p;
    }
    return witness;
}

template <typename Fn>
inline void parallel_ranges(std::int64_t lo, std::int64_t hi, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || hi - lo < 1024) {
        fn(lo, hi);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (hi - lo + threads) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t a = lo + t * chunk;
        const std::int64_t b = std::min(hi, a + chunk - 1);
        if (a > hi) break;
        pool.emplace_back([a, b, &fn] { fn(a, b); });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Assemble the final certificate: pad every unassigned prime <= x with the
/// zero class, re-verify coverage of [1, U] by a straight scan, fold the CRT,
/// and check divisibility (and compositeness, in primality mode) over the
/// whole window.  Refuses to certify when coverage fails.  The primality scan
/// runs only when x <= primality_threshold; beyond it the certificate records
/// the modular mode that actually ran.
inline GapCertificate assemble_and_certify(ResidueAssignment& assignment, const Params& params,
                                           const PrimeTable& primes, VerifyMode mode, std::uint64_t seed,
                                           const PrimalityPolicy& policy = {}, int threads = 1,
                                           std::int64_t primality_threshold = 2000) {
    for (std::int64_t p : primes.primes()) {
        if (p > params.x) break;
        if (!assignment.contains(p)) assignment.assign(p, 0, Provenance::padded);
    }

    const auto witness = detail::coverage_witnesses(assignment, params.u);
    std::vector<std::int64_t> uncovered;
    for (std::int64_t n = 1; n <= params.u; ++n)
        if (witness[static_cast<std::size_t>(n)] == 0) uncovered.push_back(n);
    if (!uncovered.empty())
        throw CoverageError("assemble_and_certify: " + std::to_string(uncovered.size()) +
                                " integers in [1, U] are uncovered (first witness n = " +
                                std::to_string(uncovered.front()) + ")",
                            uncovered);

    GapCertificate cert;
    cert.u = params.u;
    cert.x = params.x;
    cert.mode = (mode == VerifyMode::primality && params.x <= primality_threshold) ? VerifyMode::primality
                                                                                   : VerifyMode::modular;
    cert.seed = seed;
    cert.assignment_digest = assignment_digest(assignment);
    cert.n = crt_combine(assignment, primes);
    // ensure N + n is a proper multiple (divisor strictly smaller), so the
    // window really is prime-free
    if (cert.n <= params.x) {
        const BigInt px = primorial(params.x);
        while (cert.n <= params.x) cert.n += px;
    }

    // one big reduction per prime (parallel), then the scan over n is
    // machine arithmetic
    std::vector<std::pair<std::int64_t, std::int64_t>> entry_list;
    entry_list.reserve(assignment.size());
    for (const auto& [p, e] : assignment.entries()) entry_list.emplace_back(p, 0);
    detail::parallel_ranges(0, static_cast<std::int64_t>(entry_list.size()) - 1, threads,
                            [&](std::int64_t lo, std::int64_t hi) {
                                for (std::int64_t i = lo; i <= hi; ++i)
                                    entry_list[static_cast<std::size_t>(i)].second = static_cast<std::int64_t>(
                                        cert.n % entry_list[static_cast<std::size_t>(i)].first);
                            });
    std::unordered_map<std::int64_t, std::int64_t> n_mod(entry_list.begin(), entry_list.end());
    bool ok = true;
    for (std::int64_t n = 1; n <= params.u && ok; ++n) {
        const std::int64_t p = witness[static_cast<std::size_t>(n)];
        if ((n_mod[p] + n) % p != 0) ok = false;
    }
    if (ok && cert.mode == VerifyMode::primality) {
        std::vector<char> prime_found(static_cast<std::size_t>(params.u) + 1, 0);
        detail::parallel_ranges(1, params.u, threads, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t n = lo; n <= hi; ++n)
                if (is_prime(cert.n + n, policy)) prime_found[static_cast<std::size_t>(n)] = 1;
        });
        for (std::int64_t n = 1; n <= params.u; ++n)
            if (prime_found[static_cast<std::size_t>(n)]) ok = false;
    }
    cert.verified = ok;
    cert.merit = merit(static_cast<double>(params.u), log_bigint(cert.n));
    return cert;
}

// ---------------------------------------------------------------------------
// The probabilistic bound
// ---------------------------------------------------------------------------

/// Exact expected number of classes containing `element` under independent
/// sampling: sum_q mu_q(element).
inline double exact_hit_expectation(const std::vector<Measure>& measures, std::int64_t element) {
    double t = 0.0;
    for (const auto& mu : measures) t += mu.probability_of(element);
    return t;
}

/// Monte Carlo estimate of P(element in no sampled class).  The exact
/// expectation t = sum_q mu_q(element) is computed first and must reach
/// t_min; the e^{-t} bound is what the estimate is compared against.
inline double estimate_uncovered_bound(const std::vector<Measure>& measures, std::int64_t element,
                                       double t_min, int trials, std::uint64_t seed) {
    const double t = exact_hit_expectation(measures, element);
    if (t < t_min)
        throw ParameterError("estimate_uncovered_bound: exact expectation " + std::to_string(t) +
                             " below required t_min " + std::to_string(t_min));
    std::int64_t missed = 0;
    for (int trial = 0; trial < trials; ++trial) {
        bool hit = false;
        for (const auto& mu : measures) {
            const std::int64_t a = sample_class(mu, derive_seed(seed, static_cast<std::uint64_t>(mu.q),
                                                                static_cast<std::uint64_t>(trial)));
            if (element % mu.q == a) { hit = true; break; }
        }
        if (!hit) ++missed;
    }
    return static_cast<double>(missed) / static_cast<double>(trials);
}

} // namespace gapcover
