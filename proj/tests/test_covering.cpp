#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gapcover/covering.hpp"
#include "oracles.hpp"

using gapcover::Measure;

namespace {

Measure point_mass(std::int64_t m, std::int64_t q, std::int64_t at) {
    Measure mu;
    mu.m = m;
    mu.q = q;
    mu.probabilities.assign(static_cast<std::size_t>(q), 0.0);
    mu.probabilities[static_cast<std::size_t>(at % q)] = 1.0;
    mu.alpha = 1.0;
    return mu;
}

gapcover::Params synthetic_params(std::int64_t x, std::int64_t u) {
    gapcover::Params p;
    p.x = x;
    p.eps = 0.1;
    p.c_u = 1.0;
    p.y = 2.5;
    p.z = static_cast<double>(x) - 0.5;
    p.u = u;
    return p;
}

} // namespace

TEST_CASE("sample_class on a point mass always returns the atom") {
    const auto mu = point_mass(2, 7, 3);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL, 12345ULL})
        CHECK(gapcover::sample_class(mu, seed) == 3);
}

TEST_CASE("sample_class matches uniform frequencies within 3 sigma") {
    const auto mu = gapcover::uniform_measure(2, 11);
    std::vector<int> counts(11, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(gapcover::sample_class(mu, gapcover::derive_seed(5, i)))];
    const double expect = draws / 11.0;
    const double sigma = std::sqrt(draws * (1.0 / 11.0) * (10.0 / 11.0));
    for (int c : counts) CHECK(std::abs(c - expect) <= 3.0 * sigma);
}

TEST_CASE("sample_class is deterministic in the seed") {
    Measure mu;
    mu.m = 2;
    mu.q = 13;
    mu.probabilities.assign(13, 1.0 / 13.0);
    for (std::uint64_t seed : {7ULL, 8ULL, 1000ULL})
        CHECK(gapcover::sample_class(mu, seed) == gapcover::sample_class(mu, seed));
}

TEST_CASE("cover_residual_set trivial cases") {
    SECTION("no elements, no assignments") {
        const auto out = gapcover::cover_residual_set({}, {gapcover::uniform_measure(2, 5)}, 0.0, 4, 1);
        CHECK(out.class_by_q.empty());
        CHECK(out.uncovered.empty());
    }
    SECTION("a concentrated measure covers its element") {
        const std::int64_t p0 = 101;
        const auto out = gapcover::cover_residual_set({p0}, {point_mass(2, 7, p0)}, 0.0, 1, 1);
        CHECK(out.uncovered.empty());
        CHECK(out.class_by_q.at(7) == p0 % 7);
    }
}

TEST_CASE("cover_residual_set uncovered rate tracks the product of misses") {
    // single element, uniform measures: P(uncovered) = prod (1 - 1/q)
    const std::vector<std::int64_t> qs{5, 7, 11};
    std::vector<Measure> measures;
    for (std::int64_t q : qs) measures.push_back(gapcover::uniform_measure(2, q));
    double predicted = 1.0;
    for (std::int64_t q : qs) predicted *= 1.0 - 1.0 / static_cast<double>(q);

    const int runs = 4000;
    int misses = 0;
    for (int r = 0; r < runs; ++r) {
        const auto out = gapcover::cover_residual_set({9973}, measures, 0.0, 1,
                                                      gapcover::derive_seed(99, r));
        misses += out.uncovered.empty() ? 0 : 1;
    }
    const double freq = static_cast<double>(misses) / runs;
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / runs);
    CHECK(std::abs(freq - predicted) <= 4.0 * sigma);
}

TEST_CASE("cover_residual_set keeps the best of several trials") {
    std::vector<Measure> measures{gapcover::uniform_measure(2, 23)};
    const std::vector<std::int64_t> elements{100, 123, 146};
    const auto one = gapcover::cover_residual_set(elements, measures, 0.0, 1, 3);
    const auto many = gapcover::cover_residual_set(elements, measures, 0.0, 16, 3);
    CHECK(many.uncovered.size() <= one.uncovered.size());
    CHECK(many.trials_run >= one.trials_run);
}

TEST_CASE("enlarging the measure list never hurts (paired seeds)") {
    for (int instance = 0; instance < 20; ++instance) {
        const std::uint64_t seed = gapcover::derive_seed(1234, instance);
        std::vector<std::int64_t> elements;
        gapcover::SplitMix64 rng(seed);
        for (int i = 0; i < 12; ++i) elements.push_back(1000 + static_cast<std::int64_t>(rng.below(400)));
        std::vector<Measure> base;
        for (std::int64_t q : {29, 31, 37}) base.push_back(gapcover::uniform_measure(2, q));
        std::vector<Measure> larger = base;
        for (std::int64_t q : {41, 43}) larger.push_back(gapcover::uniform_measure(2, q));
        const auto small = gapcover::cover_residual_set(elements, base, 0.0, 8, seed);
        const auto big = gapcover::cover_residual_set(elements, larger, 0.0, 8, seed);
        CHECK(big.uncovered.size() <= small.uncovered.size());
    }
}

TEST_CASE("append_stage pairs elements with primes") {
    SECTION("empty") {
        const auto out = gapcover::append_stage({}, {211, 223});
        CHECK(out.class_by_q.empty());
        CHECK(out.deficit == 0);
    }
    SECTION("direct pairing") {
        const auto out = gapcover::append_stage({101, 103}, {211, 223});
        CHECK(out.class_by_q.at(211) == 101);
        CHECK(out.class_by_q.at(223) == 103);
        CHECK(out.deficit == 0);
    }
    SECTION("shortage is reported") {
        const auto out = gapcover::append_stage({5, 11, 17}, {101, 103});
        CHECK(out.class_by_q.size() == 2);
        CHECK(out.deficit == 1);
    }
}

TEST_CASE("greedy_stage examples") {
    SECTION("one class can cover several elements") {
        const auto out = gapcover::greedy_stage({6, 12, 18}, {3});
        CHECK(out.class_by_q.at(3) == 0);
        CHECK(out.still_uncovered.empty());
        CHECK(out.primes_used == 1);
    }
    SECTION("singleton") {
        const auto out = gapcover::greedy_stage({5}, {7});
        CHECK(out.class_by_q.at(7) == 5);
        CHECK(out.still_uncovered.empty());
    }
    SECTION("exhaustion leaves the rest uncovered") {
        const auto out = gapcover::greedy_stage({1, 2, 3, 4, 5}, {});
        CHECK(out.still_uncovered.size() == 5);
    }
}

TEST_CASE("max-coverage greedy never loses to one-element-per-prime") {
    gapcover::SplitMix64 rng(77);
    for (int instance = 0; instance < 25; ++instance) {
        std::vector<std::int64_t> remaining;
        for (int i = 0; i < 30; ++i) remaining.push_back(1 + static_cast<std::int64_t>(rng.below(500)));
        std::vector<std::int64_t> primes;
        for (std::int64_t p : {53, 59, 61, 67, 71, 73, 79, 83})
            primes.push_back(p);
        const auto greedy = gapcover::greedy_stage(remaining, primes, gapcover::GreedyStrategy::max_coverage);
        const auto baseline =
            gapcover::greedy_stage(remaining, primes, gapcover::GreedyStrategy::one_element_per_prime);
        CHECK(greedy.still_uncovered.size() <= baseline.still_uncovered.size());
    }
}

TEST_CASE("exp inequality from the probabilistic argument holds numerically") {
    gapcover::SplitMix64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Measure> measures;
        for (std::int64_t q : {5, 7, 11, 13}) {
            Measure mu;
            mu.m = 2;
            mu.q = q;
            mu.probabilities.assign(static_cast<std::size_t>(q), 0.0);
            double total = 0.0;
            for (std::int64_t a = 0; a < q; ++a) {
                mu.probabilities[static_cast<std::size_t>(a)] = rng.uniform01();
                total += mu.probabilities[static_cast<std::size_t>(a)];
            }
            for (std::int64_t a = 0; a < q; ++a) mu.probabilities[static_cast<std::size_t>(a)] /= total;
            measures.push_back(std::move(mu));
        }
        const std::int64_t p = 100 + static_cast<std::int64_t>(rng.below(1000));
        double product = 1.0, expectation = 0.0;
        for (const auto& mu : measures) {
            product *= 1.0 - mu.probability_of(p);
            expectation += mu.probability_of(p);
        }
        CHECK(product <= std::exp(-expectation) + 1e-15);
    }
}

TEST_CASE("estimate_uncovered_bound examples") {
    SECTION("point masses at the element give zero misses") {
        std::vector<Measure> measures{point_mass(2, 7, 3), point_mass(2, 11, 3)};
        const double freq = gapcover::estimate_uncovered_bound(measures, 3, 1.5, 2000, 5);
        CHECK(freq == 0.0);
    }
    SECTION("single half-mass measure misses about half the time") {
        Measure mu;
        mu.m = 2;
        mu.q = 5;
        mu.probabilities = {0.5, 0.125, 0.125, 0.125, 0.125};
        const double freq = gapcover::estimate_uncovered_bound({mu}, 5, 0.4, 10'000, 17);
        const double sigma = std::sqrt(0.25 / 10'000.0);
        CHECK(std::abs(freq - 0.5) <= 4.0 * sigma);
    }
    SECTION("precondition failure") {
        std::vector<Measure> measures{gapcover::uniform_measure(2, 101)};
        CHECK_THROWS_AS(gapcover::estimate_uncovered_bound(measures, 7, 2.0, 10, 1),
                        gapcover::ParameterError);
    }
}

TEST_CASE("assemble_and_certify x = 13 hand cover") {
    const auto primes = gapcover::sieve_primes(13);
    gapcover::ResidueAssignment a;
    a.assign(2, 0, gapcover::Provenance::stage1_zero);
    a.assign(3, 1, gapcover::Provenance::stage1_one);
    a.assign(5, 3, gapcover::Provenance::greedy);
    a.assign(7, 5, gapcover::Provenance::greedy);
    a.assign(11, 9, gapcover::Provenance::greedy);
    a.assign(13, 11, gapcover::Provenance::greedy);
    auto params = synthetic_params(13, 13);
    const auto cert =
        gapcover::assemble_and_certify(a, params, primes, gapcover::VerifyMode::modular, 1);
    CHECK(cert.verified);
    CHECK(cert.n > 13);   // shifted above x so every N + n is composite
    // CRT core agrees with the exhaustive scan before the shift
    const auto least = gapcover::crt_combine(a.covering_classes());
    CHECK(least == oracle::crt_by_scan(a.covering_classes(), 30030));
    CHECK((cert.n - least) % gapcover::primorial(13) == 0);
}

TEST_CASE("assemble_and_certify refuses an incomplete cover") {
    const auto primes = gapcover::sieve_primes(13);
    gapcover::ResidueAssignment a;
    a.assign(2, 0, gapcover::Provenance::stage1_zero);
    auto params = synthetic_params(13, 13);
    try {
        gapcover::assemble_and_certify(a, params, primes, gapcover::VerifyMode::modular, 1);
        FAIL("expected CoverageError");
    } catch (const gapcover::CoverageError& e) {
        REQUIRE_FALSE(e.witnesses.empty());
        CHECK(e.witnesses.front() == 1);   // 1 is odd and in no zero class
    }
}

TEST_CASE("certificates are deterministic given the seed") {
    const auto primes = gapcover::sieve_primes(13);
    auto params = synthetic_params(13, 13);
    auto make = [&] {
        gapcover::ResidueAssignment a;
        a.assign(2, 0, gapcover::Provenance::stage1_zero);
        a.assign(3, 1, gapcover::Provenance::stage1_one);
        a.assign(5, 3, gapcover::Provenance::greedy);
        a.assign(7, 5, gapcover::Provenance::greedy);
        a.assign(11, 9, gapcover::Provenance::greedy);
        a.assign(13, 11, gapcover::Provenance::greedy);
        return gapcover::assemble_and_certify(a, params, primes, gapcover::VerifyMode::modular, 42);
    };
    CHECK(make() == make());
}
