#include "ellhyp/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ellhyp {

IdentityReport make_report(const std::string& id, cd lhs, cd rhs, double tol,
                           uint64_t seed, double scale, int nodes,
                           long long evaluations) {
    IdentityReport r;
    r.identity_id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_err = std::abs(lhs - rhs);
    double denom = scale >= 0.0 ? scale : std::abs(rhs);
    r.rel_err = denom > 1e-10 ? r.abs_err / denom : r.abs_err;
    r.tol = tol;
    r.pass = r.rel_err <= tol;
    r.nodes = nodes;
    r.evaluations = evaluations;
    r.seed = seed;
    return r;
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::ordered_json to_json(const IdentityReport& r) {
    nlohmann::ordered_json j;
    j["identity_id"] = r.identity_id;
    j["lhs"] = {r.lhs.real(), r.lhs.imag()};
    j["rhs"] = {r.rhs.real(), r.rhs.imag()};
    j["abs_err"] = r.abs_err;
    j["rel_err"] = r.rel_err;
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    j["nodes"] = r.nodes;
    j["evaluations"] = r.evaluations;
    j["seed"] = r.seed;
    j["runtime_ms"] = r.runtime_ms;
    return j;
}

}  // namespace

void emit_report(const std::vector<IdentityReport>& reports, ReportFormat fmt,
                 std::ostream& os) {
    if (fmt == ReportFormat::json) {
        nlohmann::ordered_json doc;
        doc["schema"] = "ellhyp-report/1";
        doc["reports"] = nlohmann::ordered_json::array();
        for (const auto& r : reports) doc["reports"].push_back(to_json(r));
        os << doc.dump(2) << "\n";
        return;
    }
    if (fmt == ReportFormat::csv) {
        os << "identity_id,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tol,pass,"
              "nodes,evaluations,seed,runtime_ms\n";
        for (const auto& r : reports) {
            os << r.identity_id << ',' << fmt_double(r.lhs.real()) << ','
               << fmt_double(r.lhs.imag()) << ',' << fmt_double(r.rhs.real()) << ','
               << fmt_double(r.rhs.imag()) << ',' << fmt_double(r.abs_err) << ','
               << fmt_double(r.rel_err) << ',' << fmt_double(r.tol) << ','
               << (r.pass ? 1 : 0) << ',' << r.nodes << ',' << r.evaluations << ','
               << r.seed << ',' << r.runtime_ms << '\n';
        }
        return;
    }
    for (const auto& r : reports) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.identity_id
           << "  lhs=" << fmt_double(r.lhs.real()) << (r.lhs.imag() < 0 ? "" : "+")
           << fmt_double(r.lhs.imag()) << "i"
           << "  rhs=" << fmt_double(r.rhs.real()) << (r.rhs.imag() < 0 ? "" : "+")
           << fmt_double(r.rhs.imag()) << "i"
           << "  rel_err=" << fmt_double(r.rel_err) << "  tol=" << fmt_double(r.tol)
           << "  nodes=" << r.nodes << "  seed=" << r.seed << "\n";
    }
}

void emit_report_file(const std::vector<IdentityReport>& reports, ReportFormat fmt,
                      const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit_report_file: cannot write " + path);
    emit_report(reports, fmt, os);
}

std::vector<IdentityReport> parse_report_json(const std::string& text) {
    auto doc = nlohmann::json::parse(text);
    if (doc.at("schema").get<std::string>() != "ellhyp-report/1")
        throw std::runtime_error("parse_report_json: unknown schema");
    std::vector<IdentityReport> out;
    for (const auto& j : doc.at("reports")) {
        IdentityReport r;
        r.identity_id = j.at("identity_id").get<std::string>();
        r.lhs = cd(j.at("lhs")[0].get<double>(), j.at("lhs")[1].get<double>());
        r.rhs = cd(j.at("rhs")[0].get<double>(), j.at("rhs")[1].get<double>());
        r.abs_err = j.at("abs_err").get<double>();
        r.rel_err = j.at("rel_err").get<double>();
        r.tol = j.at("tol").get<double>();
        r.pass = j.at("pass").get<bool>();
        r.nodes = j.at("nodes").get<int>();
        r.evaluations = j.at("evaluations").get<long long>();
        r.seed = j.at("seed").get<uint64_t>();
        r.runtime_ms = j.at("runtime_ms").get<int64_t>();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ellhyp
