#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gapcover/arith.hpp"
#include "oracles.hpp"

using gapcover::BigInt;

TEST_CASE("sieve_primes basic values") {
    CHECK(gapcover::sieve_primes(10).primes() == std::vector<std::int64_t>{2, 3, 5, 7});
    CHECK(gapcover::sieve_primes(2).primes() == std::vector<std::int64_t>{2});
    CHECK_THROWS_AS(gapcover::sieve_primes(1), gapcover::ParameterError);
    CHECK_THROWS_AS(gapcover::sieve_primes(gapcover::kSieveLimitMax + 1), gapcover::ParameterError);
}

TEST_CASE("sieve_primes counts match the trial-division oracle") {
    const auto table = gapcover::sieve_primes(1'000'000);
    CHECK(table.size() == 78498);   // oracle-verified below on the prefix
    const auto small = oracle::primes_by_trial_division(20'000);
    REQUIRE(small.size() <= table.size());
    for (std::size_t i = 0; i < small.size(); ++i) REQUIRE(table[i] == small[i]);
    // membership predicate agrees with the list
    CHECK(table.is_prime(999983));
    CHECK_FALSE(table.is_prime(999981));
    CHECK(table.count_below(10) == 4);
}

TEST_CASE("sieve results are segment-size independent") {
    const auto a = gapcover::sieve_primes(100'000, 1 << 16);
    const auto b = gapcover::sieve_primes(100'000, 333);
    CHECK(a.primes() == b.primes());
}

TEST_CASE("primorial basics and oracle") {
    CHECK(gapcover::primorial(1) == 1);
    CHECK(gapcover::primorial(0) == 1);
    CHECK(gapcover::primorial(10) == 210);
    const BigInt p100 = gapcover::primorial(100);
    CHECK(p100 == oracle::primorial_by_product(100));
    CHECK(p100 == BigInt("2305567963945518424753102147331756070"));
}

TEST_CASE("primorial equals the incremental product over the sieve") {
    BigInt incremental = 1;
    const auto table = gapcover::sieve_primes(10'000);
    std::size_t idx = 0;
    for (std::int64_t t : {2, 3, 10, 100, 1000, 9999, 10000}) {
        while (idx < table.size() && table[idx] <= t) incremental *= table[idx++];
        CHECK(gapcover::primorial(t) == incremental);
    }
}

TEST_CASE("is_smooth examples") {
    CHECK(gapcover::is_smooth(1, 2));
    CHECK(gapcover::is_smooth(18, 3));
    CHECK_FALSE(gapcover::is_smooth(14, 3));
}

TEST_CASE("is_smooth agrees with full factorization") {
    for (std::int64_t y : {2, 3, 5, 7, 100}) {
        for (std::int64_t n = 1; n <= 100'000; ++n) {
            if (gapcover::is_smooth(n, y) != oracle::smooth_by_factorization(n, y)) {
                CAPTURE(n, y);
                REQUIRE(false);
            }
        }
    }
    SUCCEED();
}

TEST_CASE("coprime_to_primorial examples") {
    CHECK(gapcover::coprime_to_primorial(BigInt(35), 4));
    CHECK_FALSE(gapcover::coprime_to_primorial(BigInt(9), 4));
    CHECK(gapcover::coprime_to_primorial(BigInt(1), 100));
}

TEST_CASE("crt_combine small examples") {
    using Classes = std::vector<std::pair<std::int64_t, std::int64_t>>;
    CHECK(gapcover::crt_combine(Classes{{2, 1}, {3, 2}}) == 1);
    CHECK(gapcover::crt_combine(Classes{{2, 0}}) == 2);
}

TEST_CASE("crt_combine matches the exhaustive scan at x = 13") {
    // covering classes for [1, 13]: evens, 1 mod 3, and one class per big prime
    const std::vector<std::pair<std::int64_t, std::int64_t>> classes{
        {2, 0}, {3, 1}, {5, 3}, {7, 5}, {11, 9}, {13, 11}};
    const BigInt n = gapcover::crt_combine(classes);
    const BigInt expected = oracle::crt_by_scan(classes, 30030);
    REQUIRE(expected != 0);
    CHECK(n == expected);
    CHECK(n < 30030);
}

TEST_CASE("crt_combine output hits every covered class") {
    const std::vector<std::pair<std::int64_t, std::int64_t>> classes{{2, 1}, {3, 0}, {5, 2}, {7, 4}};
    const BigInt n = gapcover::crt_combine(classes);
    const BigInt p_x = gapcover::primorial(7);
    for (std::int64_t v = 1; v <= 50; ++v) {
        bool in_some_class = false;
        for (const auto& [p, a] : classes)
            if (v % p == a) in_some_class = true;
        if (!in_some_class) continue;
        CHECK(boost::multiprecision::gcd(n + v, p_x) > 1);
    }
}

TEST_CASE("crt_combine rejects bad inputs") {
    using Classes = std::vector<std::pair<std::int64_t, std::int64_t>>;
    CHECK_THROWS_AS(gapcover::crt_combine(Classes{{2, 2}}), gapcover::ParameterError);
    CHECK_THROWS_AS(gapcover::crt_combine(Classes{{2, 0}, {2, 1}}), gapcover::ParameterError);
}

TEST_CASE("is_prime examples") {
    CHECK(gapcover::is_prime(BigInt(97)));
    CHECK_FALSE(gapcover::is_prime(BigInt(561)));   // Carmichael; oracle: trial division
    CHECK_FALSE(oracle::is_prime_trial(561));
    const BigInt mersenne = (BigInt(1) << 61) - 1;
    CHECK(gapcover::is_prime(mersenne));
}

TEST_CASE("is_prime agrees with trial division up to 10^6") {
    for (std::int64_t n = 0; n <= 1'000'000; ++n) {
        if (gapcover::is_prime_u64(static_cast<std::uint64_t>(n)) != oracle::is_prime_trial(n)) {
            CAPTURE(n);
            REQUIRE(false);
        }
    }
    SUCCEED();
}

TEST_CASE("is_prime handles numbers above 64 bits") {
    // 2^89 - 1 is a Mersenne prime; its square is composite
    const BigInt m89 = (BigInt(1) << 89) - 1;
    CHECK(gapcover::is_prime(m89));
    CHECK_FALSE(gapcover::is_prime(m89 * m89));
    // determinism of the probabilistic path
    gapcover::PrimalityPolicy policy;
    CHECK(gapcover::is_prime(m89, policy) == gapcover::is_prime(m89, policy));
}

TEST_CASE("mobius and squarefree divisors") {
    CHECK(gapcover::mobius(1) == 1);
    CHECK(gapcover::mobius(2) == -1);
    CHECK(gapcover::mobius(6) == 1);
    CHECK(gapcover::mobius(12) == 0);
    const auto divs = gapcover::squarefree_divisors(gapcover::distinct_prime_factors(12));
    CHECK(std::set<std::int64_t>(divs.begin(), divs.end()) == std::set<std::int64_t>{1, 2, 3, 6});
}

TEST_CASE("PrimeTable range queries use half-open (lo, hi]") {
    const auto table = gapcover::sieve_primes(30);
    CHECK(table.in_range(7, 13) == std::vector<std::int64_t>{11, 13});
    CHECK(table.in_range(6, 7) == std::vector<std::int64_t>{7});
    CHECK(table.in_range(7, 7).empty());
    CHECK(table.in_range(23, 30) == std::vector<std::int64_t>{29});
}

TEST_CASE("log_bigint tracks huge integers") {
    const BigInt big = boost::multiprecision::pow(BigInt(10), 2000);
    CHECK(gapcover::log_bigint(big) == Catch::Approx(2000.0 * std::log(10.0)).epsilon(1e-12));
    CHECK(gapcover::log_bigint(BigInt(12345)) == Catch::Approx(std::log(12345.0)).epsilon(1e-12));
}
