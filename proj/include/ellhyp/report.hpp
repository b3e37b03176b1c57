#ifndef ELLHYP_REPORT_HPP
#define ELLHYP_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ellhyp/types.hpp"

namespace ellhyp {

// One verification outcome. pass <=> rel_err <= tol, where rel_err is the
// absolute error divided by the comparison scale (|rhs|, or an explicit
// residual scale; plain absolute error when the scale is below 1e-10).
struct IdentityReport {
    std::string identity_id;
    cd lhs{0.0, 0.0};
    cd rhs{0.0, 0.0};
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
    int nodes = 0;
    long long evaluations = 0;
    uint64_t seed = 0;
    int64_t runtime_ms = 0;
};

IdentityReport make_report(const std::string& id, cd lhs, cd rhs, double tol,
                           uint64_t seed, double scale = -1.0, int nodes = 0,
                           long long evaluations = 0);

struct RunConfig {
    cd p{0.3, 0.0};
    cd q{0.35, 0.0};
    double tol = -1.0;  // <0: per-identity class default
    int max_nodes = -1; // <0: per-dimension default
    uint64_t seed = 1;
    int draws = 0;      // 0: per-identity default
    std::string output_path;
    bool quick = false;
};

enum class ReportFormat { json, csv, text };

// Stable field order; JSON schema "ellhyp-report/1"; complex numbers as
// [re, im] pairs. Reports are emitted in the given order.
void emit_report(const std::vector<IdentityReport>& reports, ReportFormat fmt,
                 std::ostream& os);
void emit_report_file(const std::vector<IdentityReport>& reports, ReportFormat fmt,
                      const std::string& path);

std::vector<IdentityReport> parse_report_json(const std::string& text);

}  // namespace ellhyp

#endif
