// gapcover: residue-class coverings of [1, U] by the primes up to x, CRT
// assembly of the resulting prime-free window, and the numerical diagnostics
// behind the construction.
//
// Subcommands: construct | diagnose | verify | weights.  Exit codes:
// 0 success, 1 verification/covering failure, 2 usage or config error,
// 3 resource budget exceeded.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapcover/analysis.hpp"
#include "gapcover/pipeline.hpp"
#include "gapcover/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct CliOptions {
    gapcover::RunConfig cfg;
    std::string mode = "modular";
    bool seed_given = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--x", opt.cfg.x, "construction size parameter x (>= 100)");
    cmd->add_option("--eps", opt.cfg.eps, "epsilon in (0, 1/2)");
    cmd->add_option("--cu", opt.cfg.c_u, "the constant C_U scaling the covered window U");
    cmd->add_option("--delta", opt.cfg.delta, "interval-length constant delta");
    cmd->add_option("--w", opt.cfg.w, "small-prime threshold w (0 = auto)");
    cmd->add_option("--seed", opt.cfg.seed, "master seed for all randomized stages")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    cmd->add_option("--trials", opt.cfg.trials, "sampling trials per family, best kept");
    cmd->add_option("--mode", opt.mode, "verification mode: modular | primality");
    cmd->add_option("--threads", opt.cfg.threads, "worker threads for verification scans");
    cmd->add_option("--out-dir", opt.cfg.out_dir, "artifact output directory");
    cmd->add_option("--enum-budget", opt.cfg.enum_budget, "residual enumeration budget");
    cmd->add_option("--measure-budget", opt.cfg.measure_budget,
                    "per-measure enumeration budget before uniform degradation");
    cmd->add_option("--quad-grid", opt.cfg.grid_points, "grid points for the simplex quadrature");
}

gapcover::VerifyMode parse_mode(const std::string& mode) {
    if (mode == "modular") return gapcover::VerifyMode::modular;
    if (mode == "primality") return gapcover::VerifyMode::primality;
    throw gapcover::ParameterError("unknown mode '" + mode + "' (expected modular or primality)");
}

int cmd_construct(CliOptions& opt) {
    opt.cfg.mode = parse_mode(opt.mode);
    if (!opt.seed_given)
        std::cerr << "construct: using default seed " << opt.cfg.seed << "\n";
    const auto t0 = std::chrono::steady_clock::now();

    // early stages written immediately so a later failure retains them
    std::filesystem::create_directories(opt.cfg.out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(opt.cfg.out_dir) / name).string();
    };
    const auto params = gapcover::derive_params(opt.cfg.x, opt.cfg.eps, opt.cfg.c_u);
    gapcover::write_file(path("params.json"), gapcover::to_json(params).dump(2) + "\n");
    {
        const auto primes = gapcover::sieve_primes(std::max<std::int64_t>(params.x, params.u / 2));
        const auto residuals = gapcover::compute_residuals(params, primes, opt.cfg.enum_budget);
        gapcover::write_file(path("residuals.json"), gapcover::to_json(residuals).dump(2) + "\n");
    }

    gapcover::ConstructArtifacts art;
    try {
        art = gapcover::run_construct(opt.cfg);
    } catch (const gapcover::AllocationError& e) {
        std::cerr << "construct: interval allocation failed: " << e.what() << "\n";
        return kExitVerifyFailure;
    } catch (const gapcover::CoverageError& e) {
        std::cerr << "construct: covering stage failed: " << e.what() << "\n";
        return kExitVerifyFailure;
    }
    for (const auto& note : art.notes) std::cerr << "construct: " << note << "\n";
    gapcover::write_construct_artifacts(art, opt.cfg.out_dir);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "construct: x = " << art.params.x << ", U = " << art.params.u << ", N has "
              << art.certificate.n.str().size() << " digits, verified = "
              << (art.certificate.verified ? "yes" : "no") << " (" << elapsed << " s)\n";
    return art.certificate.verified ? kExitOk : kExitVerifyFailure;
}

int cmd_diagnose(CliOptions& opt) {
    if (opt.cfg.grid_x.empty() && opt.cfg.grid_k.empty()) {
        std::cerr << "diagnose: need --grid (x values) and/or --k (k values)\n";
        return kExitUsage;
    }
    std::vector<gapcover::LemmaDiagnostic> rows;
    for (std::int64_t x : opt.cfg.grid_x) {
        const auto params = gapcover::derive_params(x, opt.cfg.eps, opt.cfg.c_u);
        const auto primes = gapcover::sieve_primes(std::max<std::int64_t>(params.x, params.u / 2));
        const auto residuals = gapcover::compute_residuals(params, primes, opt.cfg.enum_budget);
        rows.push_back(gapcover::check_r_prime(residuals, params));
        if (residuals.r_by_m.count(2)) {
            rows.push_back(gapcover::LemmaDiagnostic::make(
                "rm_size_m2", gapcover::predict_rm_size(2, params),
                static_cast<double>(residuals.r_by_m.at(2).size()), params.x));
        }
        for (double m_window : {2.0, 10.0, 100.0})
            for (auto& d : gapcover::check_rm_sums(residuals, params, m_window)) rows.push_back(d);
        // normalizing-constant consistency, when the enumeration is affordable
        if (params.u / 2 <= opt.cfg.measure_budget) {
            const auto in_window = primes.in_range(params.x / 2, params.x);
            if (!in_window.empty()) {
                const auto spec = gapcover::default_weight_spec(1, opt.cfg.resolved_w());
                rows.push_back(gapcover::alpha_consistency(2, in_window.front(), spec, params,
                                                           opt.cfg.measure_budget));
            }
        }
    }

    gapcover::Json functional_reports = gapcover::Json::array();
    bool bands_ok = true;
    if (!opt.cfg.grid_k.empty()) {
        const auto reports = gapcover::ratio_curve(opt.cfg.grid_k, opt.cfg.grid_points);
        double last_ratio = 0.0;
        for (const auto& r : reports) {
            functional_reports.push_back(gapcover::to_json(r));
            const double scaled = r.ratio / std::log(static_cast<double>(r.k));
            // regression band pinned from reference runs of the same shapes
            if (!(scaled > 0.005 && scaled < 10.0)) bands_ok = false;
            if (r.ratio <= last_ratio) bands_ok = false;
            last_ratio = r.ratio;
        }
    }

    std::filesystem::create_directories(opt.cfg.out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(opt.cfg.out_dir) / name).string();
    };
    gapcover::write_file(path("diagnostics.csv"), gapcover::diagnostics_csv(rows));
    gapcover::Json summary{{"rows", rows.size()},
                           {"functionalReports", functional_reports},
                           {"bandsOk", bands_ok}};
    gapcover::write_file(path("diagnostics_summary.json"), summary.dump(2) + "\n");
    std::cerr << "diagnose: wrote " << rows.size() << " diagnostic rows, "
              << functional_reports.size() << " functional reports\n";
    return bands_ok ? kExitOk : kExitVerifyFailure;
}

int cmd_verify(const std::string& certificate_path, const std::string& mode_name, int threads) {
    const auto mode = parse_mode(mode_name);
    gapcover::GapCertificate cert;
    try {
        cert = gapcover::certificate_from_json(gapcover::parse_json_file(certificate_path));
    } catch (const gapcover::ParseError& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "verify: malformed certificate: " << e.what() << "\n";
        return kExitUsage;
    }
    const std::int64_t witness = gapcover::verify_certificate(cert, mode, 2000, threads);
    if (witness != 0) {
        std::cerr << "verify: FAILED at witness n = " << witness << " (N + " << witness
                  << " breaks the claim)\n";
        return kExitVerifyFailure;
    }
    std::cerr << "verify: certificate holds (x = " << cert.x << ", U = " << cert.u << ", mode = "
              << mode_name << ")\n";
    return kExitOk;
}

int cmd_weights(CliOptions& opt, std::int64_t m, std::int64_t q, int k) {
    opt.cfg.k = k;
    const auto params = gapcover::derive_params(opt.cfg.x, opt.cfg.eps, opt.cfg.c_u);
    const auto spec = gapcover::default_weight_spec(opt.cfg.k, opt.cfg.resolved_w());
    const auto mu = gapcover::mu_measure(m, q, spec, params, opt.cfg.measure_budget);
    std::filesystem::create_directories(opt.cfg.out_dir);
    const auto base = std::filesystem::path(opt.cfg.out_dir);
    const std::string csv_name = "measure_m" + std::to_string(m) + "_q" + std::to_string(q) + ".csv";
    gapcover::write_file((base / csv_name).string(), gapcover::measure_csv(mu));
    gapcover::write_file((base / "weight_spec.json").string(), gapcover::to_json(spec).dump(2) + "\n");
    if (mu.degenerate_fallback)
        std::cerr << "weights: all residues carried zero weight; uniform fallback recorded\n";
    std::cerr << "weights: wrote " << csv_name << " and weight_spec.json\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"residue-class covering constructions for prime-free windows"};
    app.require_subcommand(1);
    // optional config-file overlay; explicit flags take precedence
    app.set_config("--config", "", "read defaults from an INI/TOML file (flags win)");

    CliOptions opt;

    auto* construct = app.add_subcommand("construct", "run the full pipeline and certify the window");
    add_common_flags(construct, opt);
    construct->add_option("--k", opt.cfg.k, "tuple size k for the sieve weights");

    auto* diagnose = app.add_subcommand("diagnose", "lemma-level diagnostics over an x- or k-grid");
    add_common_flags(diagnose, opt);
    diagnose->add_option("--grid", opt.cfg.grid_x, "comma-separated x grid")->delimiter(',');
    diagnose->add_option("--k", opt.cfg.grid_k, "comma-separated k grid")->delimiter(',');

    std::string certificate_path;
    std::string verify_mode = "modular";
    int verify_threads = 1;
    auto* verify = app.add_subcommand("verify", "independently re-verify a certificate file");
    verify->add_option("certificate", certificate_path, "path to certificate.json")->required();
    verify->add_option("--mode", verify_mode, "modular | primality");
    verify->add_option("--threads", verify_threads, "worker threads");

    std::int64_t weights_m = 2, weights_q = 7;
    int weights_k = 1;
    auto* weights = app.add_subcommand("weights", "dump the measure for one (m, q) as CSV");
    add_common_flags(weights, opt);
    weights->add_option("m", weights_m, "even m indexing the residual family")->required();
    weights->add_option("q", weights_q, "prime modulus q")->required();
    weights->add_option("--k", weights_k, "tuple size k");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (construct->parsed()) return cmd_construct(opt);
        if (diagnose->parsed()) return cmd_diagnose(opt);
        if (verify->parsed()) return cmd_verify(certificate_path, verify_mode, verify_threads);
        if (weights->parsed()) return cmd_weights(opt, weights_m, weights_q, weights_k);
    } catch (const gapcover::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gapcover::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gapcover::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const gapcover::AllocationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
