#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapcover/analysis.hpp"
#include "gapcover/construction.hpp"
#include "gapcover/covering.hpp"
#include "gapcover/errors.hpp"
#include "gapcover/weights.hpp"

namespace gapcover {

// Artifacts use ordered JSON so key order (and therefore the emitted bytes)
// is stable run to run.
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Params
// ---------------------------------------------------------------------------

inline Json to_json(const Params& p) {
    return Json{{"x", p.x}, {"eps", p.eps}, {"cU", p.c_u}, {"y", p.y}, {"z", p.z}, {"U", p.u}};
}

inline Params params_from_json(const Json& j) {
    Params p;
    p.x = j.at("x").get<std::int64_t>();
    p.eps = j.at("eps").get<double>();
    p.c_u = j.at("cU").get<double>();
    p.y = j.at("y").get<double>();
    p.z = j.at("z").get<double>();
    p.u = j.at("U").get<std::int64_t>();
    return p;
}

// ---------------------------------------------------------------------------
// Residual sets
// ---------------------------------------------------------------------------

inline Json to_json(const ResidualSets& r) {
    Json by_m = Json::object();
    for (const auto& [m, v] : r.r_by_m) by_m[std::to_string(m)] = v;
    return Json{{"mCutoff", r.m_cutoff}, {"rPrime", r.r_prime}, {"rByM", by_m}};
}

inline ResidualSets residuals_from_json(const Json& j) {
    ResidualSets r;
    r.m_cutoff = j.at("mCutoff").get<std::int64_t>();
    r.r_prime = j.at("rPrime").get<std::vector<std::int64_t>>();
    for (const auto& [key, value] : j.at("rByM").items())
        r.r_by_m.emplace(std::stoll(key), value.get<std::vector<std::int64_t>>());
    return r;
}

// ---------------------------------------------------------------------------
// Coverage report
// ---------------------------------------------------------------------------

inline Json to_json(const CoverageReport& rep) {
    Json per_m = Json::array();
    for (const auto& r : rep.per_m)
        per_m.push_back(Json{{"m", r.m},
                             {"rmSize", r.rm_size},
                             {"intervalLength", r.interval_length},
                             {"sampledClasses", r.sampled_classes},
                             {"uncoveredAfterSampling", r.uncovered_after_sampling},
                             {"appendedClasses", r.appended_classes},
                             {"measuresDegraded", r.measures_degraded}});
    return Json{{"perM", per_m},
                {"remainingAfterStages", rep.remaining_after_stages},
                {"greedyPrimesUsed", rep.greedy_primes_used},
                {"uncoveredRemaining", rep.uncovered_remaining},
                {"success", rep.success}};
}

inline CoverageReport coverage_report_from_json(const Json& j) {
    CoverageReport rep;
    for (const auto& e : j.at("perM")) {
        CoverageReportPerM r;
        r.m = e.at("m").get<std::int64_t>();
        r.rm_size = e.at("rmSize").get<std::int64_t>();
        r.interval_length = e.at("intervalLength").get<std::int64_t>();
        r.sampled_classes = e.at("sampledClasses").get<std::int64_t>();
        r.uncovered_after_sampling = e.at("uncoveredAfterSampling").get<std::int64_t>();
        r.appended_classes = e.at("appendedClasses").get<std::int64_t>();
        r.measures_degraded = e.at("measuresDegraded").get<bool>();
        rep.per_m.push_back(r);
    }
    rep.remaining_after_stages = j.at("remainingAfterStages").get<std::int64_t>();
    rep.greedy_primes_used = j.at("greedyPrimesUsed").get<std::int64_t>();
    rep.uncovered_remaining = j.at("uncoveredRemaining").get<std::int64_t>();
    rep.success = j.at("success").get<bool>();
    return rep;
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

inline Json to_json(const GapCertificate& cert) {
    Json merit_json{{"simple", cert.merit.simple}};
    if (cert.merit.rankin)
        merit_json["rankin"] = *cert.merit.rankin;
    else
        merit_json["rankin"] = nullptr;
    return Json{{"x", cert.x},
                {"U", cert.u},
                {"mode", verify_mode_name(cert.mode)},
                {"seed", cert.seed},
                {"N", cert.n.str()},
                {"assignmentDigest", cert.assignment_digest},
                {"verified", cert.verified},
                {"merit", merit_json}};
}

inline GapCertificate certificate_from_json(const Json& j) {
    GapCertificate cert;
    cert.x = j.at("x").get<std::int64_t>();
    cert.u = j.at("U").get<std::int64_t>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "modular")
        cert.mode = VerifyMode::modular;
    else if (mode == "primality")
        cert.mode = VerifyMode::primality;
    else
        throw ParseError("certificate: unknown mode '" + mode + "'");
    cert.seed = j.at("seed").get<std::uint64_t>();
    cert.n = BigInt(j.at("N").get<std::string>());
    cert.assignment_digest = j.at("assignmentDigest").get<std::string>();
    cert.verified = j.at("verified").get<bool>();
    cert.merit.simple = j.at("merit").at("simple").get<double>();
    if (!j.at("merit").at("rankin").is_null()) cert.merit.rankin = j.at("merit").at("rankin").get<double>();
    return cert;
}

// ---------------------------------------------------------------------------
// Weight spec
// ---------------------------------------------------------------------------

inline Json to_json(const PiecewisePoly& p) {
    Json coef = Json::array();
    for (const auto& c : p.coef) coef.push_back(Json::array({c[0], c[1], c[2], c[3]}));
    return Json{{"knots", p.knots}, {"coef", coef}};
}

inline PiecewisePoly poly_from_json(const Json& j) {
    PiecewisePoly p;
    p.knots = j.at("knots").get<std::vector<double>>();
    for (const auto& c : j.at("coef"))
        p.coef.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(),
                          c.at(3).get<double>()});
    return p;
}

inline Json to_json(const WeightSpec& spec) {
    Json f = Json::array();
    for (const auto& per_l : spec.f) {
        Json row = Json::array();
        for (const auto& shape : per_l) row.push_back(to_json(shape));
        f.push_back(row);
    }
    return Json{{"k", spec.k}, {"w", spec.w}, {"H", spec.h}, {"c", spec.c}, {"F", f}, {"G", to_json(spec.g)}};
}

inline WeightSpec weight_spec_from_json(const Json& j) {
    WeightSpec spec;
    spec.k = j.at("k").get<int>();
    spec.w = j.at("w").get<int>();
    spec.h = j.at("H").get<std::vector<std::int64_t>>();
    spec.c = j.at("c").get<std::vector<double>>();
    for (const auto& row : j.at("F")) {
        std::vector<PiecewisePoly> per_l;
        for (const auto& shape : row) per_l.push_back(poly_from_json(shape));
        spec.f.push_back(std::move(per_l));
    }
    spec.g = poly_from_json(j.at("G"));
    return spec;
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180: CRLF line ends, no quoting needed for these fields)
// ---------------------------------------------------------------------------

inline std::string measure_csv(const Measure& mu) {
    std::ostringstream out;
    out << "residue,probability\r\n";
    for (std::int64_t a = 0; a < mu.q; ++a) {
        out << a << ',';
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", mu.probability_of(a));
        out << buf << "\r\n";
    }
    return out.str();
}

inline std::string diagnostics_csv(const std::vector<LemmaDiagnostic>& rows) {
    std::ostringstream out;
    out << "name,scale,predicted,observed,ratio\r\n";
    char buf[40];
    for (const auto& d : rows) {
        out << d.name << ',' << d.scale << ',';
        std::snprintf(buf, sizeof buf, "%.17g", d.predicted);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", d.observed);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", d.ratio);
        out << buf << "\r\n";
    }
    return out.str();
}

inline Json to_json(const FunctionalReport& r) {
    return Json{{"k", r.k},           {"I1", r.i1},   {"I2", r.i2},
                {"J1", r.j1},         {"J2", r.j2},   {"ratio", r.ratio},
                {"errorEstimate", r.error_estimate}};
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("write_file: cannot open " + path);
    out << contents;
    if (!out) throw ResourceError("write_file: short write to " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("read_file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Json parse_json_file(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
}

} // namespace gapcover
