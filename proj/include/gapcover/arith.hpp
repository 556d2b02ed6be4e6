#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gapcover/errors.hpp"
#include "gapcover/rng.hpp"

namespace gapcover {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Prime generation
// ---------------------------------------------------------------------------

/// All primes up to a limit, with O(1) membership queries.
/// Immutable after construction; safe to share between threads.
class PrimeTable {
public:
    PrimeTable() : limit_(0) {}
    explicit PrimeTable(std::int64_t limit, std::vector<std::int64_t> primes)
        : limit_(limit), primes_(std::move(primes)), member_(static_cast<std::size_t>(limit) + 1, false) {
        for (std::int64_t p : primes_) member_[static_cast<std::size_t>(p)] = true;
    }

    std::int64_t limit() const { return limit_; }
    const std::vector<std::int64_t>& primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }
    std::int64_t operator[](std::size_t i) const { return primes_[i]; }

    bool is_prime(std::int64_t n) const {
        return n >= 2 && n <= limit_ && member_[static_cast<std::size_t>(n)];
    }

    /// Number of primes <= v (v must be <= limit).
    std::int64_t count_below(std::int64_t v) const {
        auto it = std::upper_bound(primes_.begin(), primes_.end(), v);
        return static_cast<std::int64_t>(it - primes_.begin());
    }

    /// Primes in the half-open range (lo, hi].
    std::vector<std::int64_t> in_range(std::int64_t lo, std::int64_t hi) const {
        auto a = std::upper_bound(primes_.begin(), primes_.end(), lo);
        auto b = std::upper_bound(primes_.begin(), primes_.end(), hi);
        return std::vector<std::int64_t>(a, b);
    }

private:
    std::int64_t limit_;
    std::vector<std::int64_t> primes_;
    std::vector<bool> member_;
};

inline constexpr std::int64_t kSieveLimitMax = 200'000'000;

/// Segmented sieve of Eratosthenes.  Memory during sieving is
/// O(sqrt(limit) + segment); the result stores the primes and a bitmap.
inline PrimeTable sieve_primes(std::int64_t limit, std::size_t segment_size = 1 << 16) {
    if (limit < 2 || limit > kSieveLimitMax)
        throw ParameterError("sieve_primes: limit must be in [2, " + std::to_string(kSieveLimitMax) + "], got " +
                             std::to_string(limit));

    const std::int64_t root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit))) + 1;
    std::vector<bool> small(static_cast<std::size_t>(root) + 1, true);
    std::vector<std::int64_t> base;
    for (std::int64_t i = 2; i <= root; ++i) {
        if (!small[static_cast<std::size_t>(i)]) continue;
        if (i <= limit) base.push_back(i);
        for (std::int64_t j = i * i; j <= root; j += i) small[static_cast<std::size_t>(j)] = false;
    }

    std::vector<std::int64_t> primes;
    primes.reserve(static_cast<std::size_t>(static_cast<double>(limit) / std::max(1.0, std::log(static_cast<double>(limit)) - 1.2)) + 16);
    std::vector<char> segment(segment_size);

    for (std::int64_t low = 2; low <= limit; low += static_cast<std::int64_t>(segment_size)) {
        const std::int64_t high = std::min(low + static_cast<std::int64_t>(segment_size) - 1, limit);
        std::fill(segment.begin(), segment.end(), 1);
        for (std::int64_t p : base) {
            if (p * p > high) break;
            std::int64_t start = std::max(p * p, ((low + p - 1) / p) * p);
            for (std::int64_t j = start; j <= high; j += p) segment[static_cast<std::size_t>(j - low)] = 0;
        }
        for (std::int64_t n = low; n <= high; ++n)
            if (segment[static_cast<std::size_t>(n - low)]) primes.push_back(n);
    }
    return PrimeTable(limit, std::move(primes));
}

// ---------------------------------------------------------------------------
// Primorials, smoothness
// ---------------------------------------------------------------------------

/// P_t: the product of all primes <= t (1 for t < 2).  Always exact.
inline BigInt primorial(std::int64_t t) {
    if (t < 0) throw ParameterError("primorial: t must be >= 0");
    BigInt result = 1;
    if (t < 2) return result;
    const PrimeTable table = sieve_primes(t);
    for (std::int64_t p : table.primes()) result *= p;
    return result;
}

/// True iff every prime factor of n is <= y.  n = 1 is vacuously smooth.
inline bool is_smooth(std::int64_t n, std::int64_t y) {
    if (n < 1) throw ParameterError("is_smooth: n must be >= 1");
    for (std::int64_t p = 2; p <= y && p * p <= n; ++p)
        while (n % p == 0) n /= p;
    return n == 1 || n <= y;
}

/// gcd(n, P_t) == 1, decided by dividing by each prime <= t rather than by
/// forming the primorial.
inline bool coprime_to_primorial(const BigInt& n, std::int64_t t) {
    if (n < 1) throw ParameterError("coprime_to_primorial: n must be >= 1");
    if (n == 1) return true;
    if (t < 2) return true;
    const PrimeTable table = sieve_primes(t);
    for (std::int64_t p : table.primes())
        if (n % p == 0) return false;
    return true;
}

inline bool coprime_to_primorial(std::int64_t n, std::int64_t t, const PrimeTable& primes) {
    if (n < 1) throw ParameterError("coprime_to_primorial: n must be >= 1");
    if (n == 1) return true;
    for (std::int64_t p : primes.primes()) {
        if (p > t) break;
        if (n % p == 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Chinese remaindering
// ---------------------------------------------------------------------------

inline std::int64_t egcd_inverse(std::int64_t a, std::int64_t m) {
    // inverse of a modulo m, m > 1, gcd(a, m) = 1
    std::int64_t old_r = a % m, r = m;
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t t = old_r - q * r; old_r = r; r = t;
        t = old_s - q * s; old_s = s; s = t;
    }
    return ((old_s % m) + m) % m;
}

/// Least N >= 1 with N == -a_p (mod p) for every pair (p, a_p).
/// Moduli must be distinct primes.  Folds congruences incrementally, so the
/// cost is one bignum multiply-add per prime.
inline BigInt crt_combine(const std::vector<std::pair<std::int64_t, std::int64_t>>& covering_classes) {
    BigInt n = 0;      // current solution, 0 <= n < modulus
    BigInt modulus = 1;
    for (const auto& [p, a] : covering_classes) {
        if (p < 2) throw ParameterError("crt_combine: modulus " + std::to_string(p) + " is not prime");
        if (a < 0 || a >= p) throw ParameterError("crt_combine: residue out of range for p = " + std::to_string(p));
        const std::int64_t target = (p - a % p) % p;                  // N == -a (mod p)
        const std::int64_t cur = static_cast<std::int64_t>(n % p);
        const std::int64_t m_mod_p = static_cast<std::int64_t>(modulus % p);
        if (m_mod_p == 0) throw ParameterError("crt_combine: repeated modulus " + std::to_string(p));
        std::int64_t k = ((target - cur) % p + p) % p;
        k = static_cast<std::int64_t>((static_cast<__int128>(k) * egcd_inverse(m_mod_p, p)) % p);
        n += modulus * k;
        modulus *= p;
    }
    if (n == 0) n = modulus;   // least positive representative
    return n;
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

struct PrimalityPolicy {
    int rounds = 40;                         // probabilistic rounds above the 64-bit threshold
    std::uint64_t witness_seed = 0x5DEECE66DULL;
};

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline bool miller_rabin_witness_u64(std::uint64_t n, std::uint64_t a) {
    // returns true if n passes the test for base a
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    std::uint64_t x = powmod_u64(a % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline bool miller_rabin_witness_big(const BigInt& n, const BigInt& a) {
    BigInt d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    BigInt x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

// Deterministic witness set for n < 2^64 (Sorenson-Webster verified set).
inline constexpr std::array<std::uint64_t, 12> kDeterministicWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

} // namespace detail

/// Miller-Rabin for machine integers; deterministic over the full 64-bit range.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    for (std::uint64_t a : detail::kDeterministicWitnesses)
        if (!detail::miller_rabin_witness_u64(n, a)) return false;
    return true;
}

/// Primality for arbitrary-precision n.  Deterministic below 2^64; above
/// that, Miller-Rabin with policy.rounds bases derived deterministically
/// from the policy seed and n, so results are reproducible.
/// Error probability above the threshold is at most 4^-rounds.
inline bool is_prime(const BigInt& n, const PrimalityPolicy& policy = {}) {
    if (n < 2) return false;
    if (n <= std::numeric_limits<std::uint64_t>::max())
        return is_prime_u64(static_cast<std::uint64_t>(n));

    static const std::array<std::int64_t, 16> small = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    for (std::int64_t p : small)
        if (n % p == 0) return false;

    static const BigInt fold_prime("18446744073709551557");
    SplitMix64 g(policy.witness_seed ^ static_cast<std::uint64_t>(n % fold_prime));
    const unsigned bits = boost::multiprecision::msb(n) + 1;
    for (int round = 0; round < policy.rounds; ++round) {
        BigInt a = 0;
        for (unsigned got = 0; got < bits + 64; got += 64) a = (a << 64) | g.next();
        a = 2 + a % (n - 3);
        if (!detail::miller_rabin_witness_big(n, a)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Small-integer factorization helpers (used by the sieve weights)
// ---------------------------------------------------------------------------

/// Distinct prime factors of n by trial division.
inline std::vector<std::int64_t> distinct_prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// Moebius function; 0 for non-squarefree n.
inline int mobius(std::int64_t n) {
    if (n < 1) throw ParameterError("mobius: n must be >= 1");
    int factors = 0;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        ++factors;
    }
    if (n > 1) ++factors;
    return (factors % 2 == 0) ? 1 : -1;
}

/// All squarefree divisors of the number whose distinct prime factors are given.
/// The list starts with 1; order follows the binary subset enumeration.
inline std::vector<std::int64_t> squarefree_divisors(const std::vector<std::int64_t>& prime_factors) {
    std::vector<std::int64_t> divs{1};
    divs.reserve(std::size_t{1} << std::min<std::size_t>(prime_factors.size(), 20));
    for (std::int64_t p : prime_factors) {
        const std::size_t n = divs.size();
        for (std::size_t i = 0; i < n; ++i) divs.push_back(divs[i] * p);
    }
    return divs;
}

/// Natural log of a positive big integer, accurate to double precision even
/// when the value overflows double range.
inline double log_bigint(const BigInt& n) {
    if (n <= 0) throw ParameterError("log_bigint: argument must be positive");
    const unsigned bits = boost::multiprecision::msb(n);
    if (bits <= 900) return std::log(n.convert_to<double>());
    const BigInt top = n >> (bits - 52);
    return std::log(top.convert_to<double>()) + (bits - 52) * std::log(2.0);
}

} // namespace gapcover
