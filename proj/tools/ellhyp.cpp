// Command-line verifier and evaluator for elliptic hypergeometric identities.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellhyp/gamma.hpp"
#include "ellhyp/identities.hpp"
#include "ellhyp/report.hpp"
#include "ellhyp/sci.hpp"
#include "ellhyp/series.hpp"
#include "ellhyp/special.hpp"
#include "ellhyp/verifier.hpp"

using namespace ellhyp;

namespace {

bool parse_double_strict(const std::string& s, double& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

// complex literals like 0.3+0.1i, -0.2-0.3i, 0.5, 1i
bool parse_complex(const std::string& s, cd& out) {
    if (s.empty()) return false;
    std::string body = s;
    if (body.back() == 'i') {
        body.pop_back();
        // split at the last +/- that is not an exponent sign or leading sign
        size_t split = std::string::npos;
        for (size_t i = body.size(); i-- > 1;) {
            char c = body[i];
            if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        double re = 0.0, im = 0.0;
        if (split == std::string::npos) {
            if (body.empty() || body == "+") {
                im = 1.0;
            } else if (body == "-") {
                im = -1.0;
            } else if (!parse_double_strict(body, im)) {
                return false;
            }
        } else {
            if (!parse_double_strict(body.substr(0, split), re)) return false;
            std::string imtok = body.substr(split);
            if (imtok == "+") {
                im = 1.0;
            } else if (imtok == "-") {
                im = -1.0;
            } else if (!parse_double_strict(imtok, im)) {
                return false;
            }
        }
        out = cd(re, im);
        return true;
    }
    double re = 0.0;
    if (!parse_double_strict(body, re)) return false;
    out = cd(re, 0.0);
    return true;
}

cd need_complex(const std::string& s, const char* what) {
    cd v;
    if (!parse_complex(s, v))
        throw CLI::ValidationError(std::string(what) + ": malformed complex literal '" +
                                   s + "' (expected re+imi)");
    return v;
}

std::string fmt(cd v) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", v.real(), v.imag());
    return buf;
}

void write_value_json(const std::string& path, const std::string& what, cd value,
                      int nodes, double trunc_eps) {
    nlohmann::ordered_json j;
    j["schema"] = "ellhyp-eval/1";
    j["function"] = what;
    j["value"] = {value.real(), value.imag()};
    j["nodes"] = nodes;
    j["trunc_eps"] = trunc_eps;
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elliptic hypergeometric function verifier"};
    app.require_subcommand(1);

    std::string p_str = "0.3", q_str = "0.35";
    double tol = -1.0;
    int max_nodes = -1;
    uint64_t seed = 1;
    int draws = 0;
    std::string json_path, csv_path;
    bool quick = false;

    app.add_option("--p", p_str, "base p (complex literal re+imi)")->capture_default_str();
    app.add_option("--q", q_str, "base q")->capture_default_str();
    app.add_option("--tol", tol, "tolerance override (default: per identity class)");
    app.add_option("--max-nodes", max_nodes, "quadrature node cap per dimension");
    app.add_option("--seed", seed, "64-bit seed for parameter draws")->capture_default_str();
    app.add_option("--draws", draws, "number of seeded draws per identity");
    app.add_option("--json", json_path, "write a JSON report to this path");
    app.add_option("--csv", csv_path, "write a CSV report to this path");
    app.add_flag("--quick", quick, "restrict suites to one-dimensional checks");

    auto* verify = app.add_subcommand("verify", "verify an identity or a suite");
    verify->fallthrough();
    std::string identity;
    verify->add_option("identity", identity, "identity id, 'all', or 'quick'")->required();

    auto* eval = app.add_subcommand("eval", "evaluate a function");
    eval->fallthrough();
    std::string fn;
    std::vector<std::string> fn_args;
    std::string omega_str, theory_path, flavor_str, u1_str = "1";
    int vindex_n = 0;
    std::vector<std::string> eps_str;
    eval->add_option("function", fn, "theta|gamma|gammaG|V|12V11|Rn|Tn|index")->required();
    eval->add_option("args", fn_args, "positional complex arguments");
    eval->add_option("--omega", omega_str, "omega triple w1,w2,w3 (for gammaG)");
    eval->add_option("--n", vindex_n, "series/recurrence index (12V11 terms, Rn, Tn)");
    eval->add_option("--eps", eps_str, "eps_1 eps_2 eps_3 eps_6 eps_8 (for Rn/Tn)")
        ->expected(5);
    eval->add_option("--theory", theory_path, "theory spec file (for index)");
    eval->add_option("--flavor", flavor_str,
                     "flavor values per SU factor: 'a,b,..;c,d,..' (last entries renormalized)");
    eval->add_option("--u1", u1_str, "U(1) fugacity");

    std::string method = "product";
    eval->add_option("--method", method, "gammaG method: product|bernoulli");

    CLI11_PARSE(app, argc, argv);

    try {
        cd p = need_complex(p_str, "--p");
        cd q = need_complex(q_str, "--q");

        if (verify->parsed()) {
            RunConfig cfg;
            cfg.p = p;
            cfg.q = q;
            cfg.tol = tol;
            cfg.max_nodes = max_nodes;
            cfg.seed = seed;
            cfg.draws = draws;
            cfg.quick = quick;
            if (!known_identity(identity)) {
                std::cerr << "unknown identity '" << identity << "'; known ids:\n";
                for (const auto& r : identity_registry())
                    std::cerr << "  " << r.id << "  (" << r.description << ")\n";
                return 2;
            }
            auto reports = run_verify(identity, cfg);
            emit_report(reports, ReportFormat::text, std::cout);
            if (!json_path.empty()) emit_report_file(reports, ReportFormat::json, json_path);
            if (!csv_path.empty()) emit_report_file(reports, ReportFormat::csv, csv_path);
            bool all_pass = true;
            for (const auto& r : reports) all_pass = all_pass && r.pass;
            std::cout << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << " ("
                      << reports.size() << " reports)\n";
            return all_pass ? 0 : 1;
        }

        // eval
        BasePair pq(p, q);
        auto arg = [&](size_t i) -> cd {
            if (i >= fn_args.size())
                throw CLI::ValidationError("eval: missing argument #" + std::to_string(i + 1));
            return need_complex(fn_args[i], "arg");
        };
        cd value;
        int nodes = 0;
        if (fn == "theta") {
            value = theta(arg(0), p);
        } else if (fn == "gamma") {
            value = elliptic_gamma(arg(0), pq);
        } else if (fn == "gammaG") {
            std::istringstream os(omega_str);
            std::string tok;
            std::vector<cd> w;
            while (std::getline(os, tok, ',')) w.push_back(need_complex(tok, "--omega"));
            if (w.size() != 3)
                throw CLI::ValidationError("gammaG needs --omega w1,w2,w3");
            OmegaTriple omega(w[0], w[1], w[2]);
            value = modified_gamma_G(arg(0), omega,
                                     method == "bernoulli" ? GMethod::bernoulli_form
                                                           : GMethod::product_form);
        } else if (fn == "V") {
            if (fn_args.size() != 8)
                throw CLI::ValidationError("V needs 8 parameters t1..t8");
            std::vector<cd> t;
            for (size_t i = 0; i < 8; ++i) t.push_back(arg(i));
            cd bal(1.0, 0.0);
            for (cd v : t) bal *= v;
            cd target = pq.pq() * pq.pq();
            if (std::abs(bal / target - 1.0) > 1e-8)
                throw CLI::ValidationError("V: balancing prod t = (pq)^2 violated");
            QuadratureResult info;
            value = v_value(t, pq, tol > 0 ? tol : 1e-11,
                            max_nodes > 0 ? max_nodes : 4096, &info);
            nodes = info.nodes_per_dim;
        } else if (fn == "12V11") {
            if (fn_args.size() != 8)
                throw CLI::ValidationError("12V11 needs t0 then t1..t7");
            VSeriesSpec spec;
            spec.t0 = arg(0);
            for (size_t i = 1; i < 8; ++i) spec.t.push_back(arg(i));
            spec.pq = pq;
            spec.N = vindex_n;
            value = sum_series_V(spec);
        } else if (fn == "Rn" || fn == "Tn") {
            if (fn_args.size() != 1 || eps_str.size() != 5)
                throw CLI::ValidationError(fn + " needs x plus --eps e1 e2 e3 e6 e8 and --n");
            auto par = EheqParams::for_index(
                need_complex(eps_str[0], "--eps"), need_complex(eps_str[1], "--eps"),
                need_complex(eps_str[2], "--eps"), need_complex(eps_str[3], "--eps"),
                need_complex(eps_str[4], "--eps"), vindex_n, pq);
            value = fn == "Rn" ? biorth_R(arg(0), vindex_n, par)
                               : biorth_T(arg(0), vindex_n, par);
        } else if (fn == "index") {
            if (theory_path.empty())
                throw CLI::ValidationError("index needs --theory <file>");
            std::ifstream in(theory_path);
            if (!in) throw CLI::ValidationError("cannot read " + theory_path);
            std::stringstream ss;
            ss << in.rdbuf();
            auto spec = parse_theory(ss.str());
            std::vector<std::vector<cd>> su;
            std::istringstream fs(flavor_str);
            std::string group;
            while (std::getline(fs, group, ';')) {
                std::vector<cd> vals;
                std::istringstream gs(group);
                std::string tok;
                while (std::getline(gs, tok, ',')) vals.push_back(need_complex(tok, "--flavor"));
                su.push_back(std::move(vals));
            }
            auto y = make_flavor_point(spec, su, need_complex(u1_str, "--u1"));
            auto res = compute_index(spec, pq, y, tol > 0 ? tol : 1e-10,
                                     max_nodes > 0 ? max_nodes : 4096);
            if (!res.converged && res.nodes_per_dim > 0)
                std::cerr << "warning: quadrature did not converge (err="
                          << res.err_estimate << ")\n";
            value = res.value;
            nodes = res.nodes_per_dim;
        } else {
            std::cerr << "unknown function '" << fn
                      << "' (theta|gamma|gammaG|V|12V11|Rn|Tn|index)\n";
            return 2;
        }
        std::cout << fn << " = " << fmt(value) << "\n";
        std::cout << "  nodes=" << nodes << " trunc_eps=" << pq.trunc_eps << "\n";
        if (!json_path.empty()) write_value_json(json_path, fn, value, nodes, pq.trunc_eps);
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
