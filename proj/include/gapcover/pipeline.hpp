#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gapcover/analysis.hpp"
#include "gapcover/construction.hpp"
#include "gapcover/covering.hpp"
#include "gapcover/serialize.hpp"
#include "gapcover/weights.hpp"

namespace gapcover {

/// Everything a run needs, with defaults that complete in well under a
/// second at x = 100.
struct RunConfig {
    std::int64_t x = 100;
    double eps = 0.2;
    double c_u = 1.2;
    double delta = 0.05;
    int k = 1;
    int w = 0;                    // 0: pick the largest w whose primorial fits the default budget
    std::uint64_t seed = 1;
    int trials = 8;
    VerifyMode mode = VerifyMode::modular;
    int threads = 1;
    std::int64_t enum_budget = 10'000'000;
    std::int64_t measure_budget = 200'000;     // per-measure enumeration above this degrades to uniform
    std::int64_t primality_threshold = 2000;   // primality scans only for x <= this
    std::size_t grid_points = std::size_t{1} << 12;
    int mr_rounds = 40;
    std::string out_dir = ".";

    // diagnose grids
    std::vector<std::int64_t> grid_x;
    std::vector<int> grid_k;

    int resolved_w() const { return w > 0 ? w : default_small_prime_threshold(); }
};

struct ConstructArtifacts {
    Params params;
    ResidualSets residuals;
    CoverageReport report;
    ResidueAssignment assignment;
    GapCertificate certificate;
    std::vector<std::string> notes;   // fallback/degradation events, for the diagnostic stream
};

/// The full pipeline on explicit parameters: fix the stage-one classes, find
/// the residual sets, cover the interval-allocated families by
/// measure-weighted sampling plus the appended pairing, sweep everything left
/// through the greedy stage, then assemble and verify a certificate.
/// Throws CoverageError when [1, U] cannot be completed.
inline ConstructArtifacts run_construct(const RunConfig& cfg, const Params& given_params) {
    ConstructArtifacts art;
    art.params = given_params;
    const Params& params = art.params;

    const PrimeTable primes = sieve_primes(std::max<std::int64_t>(params.x, std::max<std::int64_t>(params.u / 2, 2)));
    art.assignment = stage_one_assign(params, primes);
    art.residuals = compute_residuals(params, primes, cfg.enum_budget);

    // interval-allocated families: even m below the cutoff
    IntervalAllocation allocation;
    bool any_allocated = false;
    for (const auto& [m, rm] : art.residuals.r_by_m)
        if (m < art.residuals.m_cutoff && !rm.empty()) any_allocated = true;
    if (any_allocated) allocation = allocate_intervals(art.residuals, params, cfg.delta);

    const int w = cfg.resolved_w();
    WeightSpec spec;
    bool spec_ready = false;

    for (const auto& [m, rm] : art.residuals.r_by_m) {
        CoverageReportPerM rec;
        rec.m = m;
        rec.rm_size = static_cast<std::int64_t>(rm.size());
        auto it = allocation.by_m.find(m);
        if (it == allocation.by_m.end()) {
            art.report.per_m.push_back(rec);   // routed to the greedy stage
            continue;
        }
        const Interval& iv = it->second;
        rec.interval_length = iv.length();

        // measures exist for the free primes in the main part; the appended
        // part is reserved for the pairing stage
        const auto main_primes = primes.in_range(std::max<std::int64_t>(iv.lo - 1, static_cast<std::int64_t>(params.z)),
                                                 iv.main_hi);
        const auto appended_primes = primes.in_range(std::max<std::int64_t>(iv.main_hi, static_cast<std::int64_t>(params.z)),
                                                     iv.hi);

        std::vector<Measure> measures;
        measures.reserve(main_primes.size());
        for (std::int64_t q : main_primes) {
            if (params.u / m > cfg.measure_budget) {
                rec.measures_degraded = true;
                measures.push_back(uniform_measure(m, q));
                continue;
            }
            if (!spec_ready) {
                spec = default_weight_spec(cfg.k, w);
                spec_ready = true;
            }
            Measure mu = mu_measure(m, q, spec, params, cfg.measure_budget);
            if (mu.degenerate_fallback) art.notes.push_back("degenerate measure at m=" + std::to_string(m) +
                                                            " q=" + std::to_string(q) + "; uniform used");
            measures.push_back(std::move(mu));
        }
        if (rec.measures_degraded)
            art.notes.push_back("measure budget exceeded at m=" + std::to_string(m) +
                                "; uniform sampling used for " + std::to_string(measures.size()) + " primes");

        const CoverOutcome outcome =
            cover_residual_set(rm, measures, params.eps, cfg.trials, derive_seed(cfg.seed, static_cast<std::uint64_t>(m)));
        rec.sampled_classes = static_cast<std::int64_t>(outcome.class_by_q.size());
        rec.uncovered_after_sampling = static_cast<std::int64_t>(outcome.uncovered.size());
        // classes were drawn for the primes p in R_m; the integers to cover
        // are m p, so the integer-side class is m a mod q
        for (const auto& [q, a] : outcome.class_by_q)
            art.assignment.assign(q, (m % q) * a % q, Provenance::measure_sampled);

        const AppendOutcome app = append_stage(outcome.uncovered, appended_primes);
        rec.appended_classes = static_cast<std::int64_t>(app.class_by_q.size());
        for (const auto& [q, a] : app.class_by_q)
            art.assignment.assign(q, (m % q) * a % q, Provenance::appended);

        art.report.per_m.push_back(rec);
    }

    // straight rescan: everything still uncovered goes to the greedy stage
    const auto witness = detail::coverage_witnesses(art.assignment, params.u);
    std::vector<std::int64_t> remaining;
    for (std::int64_t n = 1; n <= params.u; ++n)
        if (witness[static_cast<std::size_t>(n)] == 0) remaining.push_back(n);
    art.report.remaining_after_stages = static_cast<std::int64_t>(remaining.size());

    std::vector<std::int64_t> free_primes;
    for (std::int64_t p : primes.primes()) {
        if (p > params.x) break;
        if (!art.assignment.contains(p)) free_primes.push_back(p);
    }
    const GreedyOutcome greedy = greedy_stage(remaining, free_primes);
    for (const auto& [q, a] : greedy.class_by_q) art.assignment.assign(q, a, Provenance::greedy);
    art.report.greedy_primes_used = greedy.primes_used;
    art.report.uncovered_remaining = static_cast<std::int64_t>(greedy.still_uncovered.size());
    art.report.success = greedy.still_uncovered.empty();

    if (!art.report.success)
        throw CoverageError("construct: covering failed; " +
                                std::to_string(greedy.still_uncovered.size()) +
                                " integers uncovered (first witness n = " +
                                std::to_string(greedy.still_uncovered.front()) + ")",
                            greedy.still_uncovered);

    PrimalityPolicy policy;
    policy.rounds = cfg.mr_rounds;
    art.certificate = assemble_and_certify(art.assignment, params, primes, cfg.mode, cfg.seed, policy,
                                           cfg.threads, cfg.primality_threshold);
    return art;
}

/// The usual entry point: parameters derived from (x, eps, C_U).
inline ConstructArtifacts run_construct(const RunConfig& cfg) {
    return run_construct(cfg, derive_params(cfg.x, cfg.eps, cfg.c_u));
}

/// Write the four construct artifacts under out_dir.
inline void write_construct_artifacts(const ConstructArtifacts& art, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    write_file(path("params.json"), to_json(art.params).dump(2) + "\n");
    write_file(path("residuals.json"), to_json(art.residuals).dump(2) + "\n");
    write_file(path("coverage_report.json"), to_json(art.report).dump(2) + "\n");
    write_file(path("certificate.json"), to_json(art.certificate).dump(2) + "\n");
}

/// Independent re-verification of a certificate file.  The modular scan
/// needs nothing but N, U, x: every N + n must have a prime factor <= x.
/// Returns the first failing n, or 0 on success.
inline std::int64_t verify_certificate(const GapCertificate& cert, VerifyMode mode,
                                       std::int64_t primality_threshold = 2000, int threads = 1) {
    const PrimeTable primes = sieve_primes(cert.x);
    std::vector<std::int64_t> residue_of;
    residue_of.reserve(primes.size());
    for (std::int64_t p : primes.primes()) residue_of.push_back(static_cast<std::int64_t>(cert.n % p));

    std::vector<char> covered(static_cast<std::size_t>(cert.u) + 1, 0);
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::int64_t p = primes[i];
        // N + n == 0 (mod p): n == -N mod p
        std::int64_t n0 = (p - residue_of[i]) % p;
        if (n0 == 0) n0 = p;
        for (std::int64_t n = n0; n <= cert.u; n += p) covered[static_cast<std::size_t>(n)] = 1;
    }
    for (std::int64_t n = 1; n <= cert.u; ++n)
        if (!covered[static_cast<std::size_t>(n)]) return n;

    if (mode == VerifyMode::primality && cert.x <= primality_threshold) {
        std::vector<char> prime_found(static_cast<std::size_t>(cert.u) + 1, 0);
        detail::parallel_ranges(1, cert.u, threads, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t n = lo; n <= hi; ++n)
                if (is_prime(cert.n + n)) prime_found[static_cast<std::size_t>(n)] = 1;
        });
        for (std::int64_t n = 1; n <= cert.u; ++n)
            if (prime_found[static_cast<std::size_t>(n)]) return n;
    }
    return 0;
}

} // namespace gapcover
