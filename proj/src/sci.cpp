#include "ellhyp/sci.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ellhyp/gamma.hpp"

namespace ellhyp {

namespace {

cd ipow(cd b, long n) {
    if (n < 0) return cd(1.0, 0.0) / ipow(b, -n);
    cd r(1.0, 0.0);
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

cd frac_pow(cd base, const Frac& f) {
    return std::exp(cd(f.value(), 0.0) * std::log(base));
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

std::vector<std::vector<int>> rep_weights(RepKind kind, int K) {
    std::vector<std::vector<int>> w;
    auto unit = [K](int i, int sign) {
        std::vector<int> v(K, 0);
        v[i] = sign;
        return v;
    };
    switch (kind) {
        case RepKind::trivial:
            w.push_back(std::vector<int>(K, 0));
            break;
        case RepKind::fundamental:
            for (int i = 0; i < K; ++i) w.push_back(unit(i, 1));
            break;
        case RepKind::antifundamental:
            for (int i = 0; i < K; ++i) w.push_back(unit(i, -1));
            break;
        case RepKind::adjoint:
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < K; ++j)
                    if (i != j) {
                        auto v = unit(i, 1);
                        v[j] -= 1;
                        w.push_back(std::move(v));
                    }
            break;
        case RepKind::antisymmetric:
            for (int i = 0; i < K; ++i)
                for (int j = i + 1; j < K; ++j) {
                    auto v = unit(i, 1);
                    v[j] += 1;
                    w.push_back(std::move(v));
                }
            break;
    }
    return w;
}

namespace {

cd eval_weight(std::span<const cd> zs, const std::vector<int>& w) {
    cd r(1.0, 0.0);
    for (size_t i = 0; i < w.size(); ++i) r *= ipow(zs[i], w[i]);
    return r;
}

// character of the rep (adjoint includes its rank zero-weights)
cd character(RepKind kind, int K, std::span<const cd> zs) {
    cd s(0.0, 0.0);
    for (const auto& w : rep_weights(kind, K)) s += eval_weight(zs, w);
    if (kind == RepKind::adjoint) s += cd(double(K - 1), 0.0);
    return s;
}

// all flavor monomial values of a field at the point y (tensor over factors)
std::vector<cd> flavor_monomials(const TheorySpec& spec, const RepEntry& f,
                                 const FlavorPoint& y, bool conjugate) {
    std::vector<cd> vals = {cd(1.0, 0.0)};
    size_t su_idx = 0;
    for (const auto& fac : spec.flavors) {
        if (fac.is_u1) continue;
        RepKind kind = f.flavor_reps[su_idx];
        std::vector<cd> next;
        const auto& pt = y.su[su_idx];
        auto ws = rep_weights(kind, fac.K);
        for (cd v : vals) {
            if (kind == RepKind::trivial) {
                next.push_back(v);
                continue;
            }
            for (const auto& w : ws) {
                cd m(1.0, 0.0);
                for (int i = 0; i < fac.K; ++i) m *= ipow(pt[i], conjugate ? -w[i] : w[i]);
                next.push_back(v * m);
            }
        }
        vals = std::move(next);
        ++su_idx;
    }
    double c = f.u1_charge.value();
    cd u = std::exp(cd(conjugate ? -c : c, 0.0) * std::log(y.u1));
    for (cd& v : vals) v *= u;
    return vals;
}

}  // namespace

FlavorPoint make_flavor_point(const TheorySpec& spec, std::vector<std::vector<cd>> su,
                              cd u1) {
    FlavorPoint y;
    y.u1 = u1;
    size_t idx = 0;
    for (const auto& fac : spec.flavors) {
        if (fac.is_u1) continue;
        if (idx >= su.size() || static_cast<int>(su[idx].size()) != fac.K)
            throw domain_error("make_flavor_point: wrong number of flavor values");
        auto& v = su[idx];
        cd prod(1.0, 0.0);
        for (int i = 0; i < fac.K - 1; ++i) prod *= v[i];
        v[fac.K - 1] = cd(1.0, 0.0) / prod;
        y.su.push_back(v);
        ++idx;
    }
    return y;
}

cd single_letter_index(const TheorySpec& spec, cd p, cd q, std::span<const cd> z,
                       const FlavorPoint& y) {
    if (static_cast<int>(z.size()) != spec.gauge_N)
        throw domain_error("single_letter_index: need N gauge torus values");
    const cd den = (1.0 - p) * (1.0 - q);
    cd ind(0.0, 0.0);
    for (const auto& f : spec.fields) {
        if (f.is_vector) {
            cd chi = character(RepKind::adjoint, spec.gauge_N, z);
            ind += (2.0 * p * q - p - q) / den * chi;
            continue;
        }
        Frac r{f.r2.num, 2 * f.r2.den};
        cd chiG = character(f.gauge_rep, spec.gauge_N, z);
        std::vector<int> negw;
        cd chiGbar(0.0, 0.0);
        for (const auto& w : rep_weights(f.gauge_rep, spec.gauge_N)) {
            cd m(1.0, 0.0);
            for (int i = 0; i < spec.gauge_N; ++i) m *= ipow(z[i], -w[i]);
            chiGbar += m;
        }
        cd chiF(0.0, 0.0), chiFbar(0.0, 0.0);
        for (cd v : flavor_monomials(spec, f, y, false)) chiF += v;
        for (cd v : flavor_monomials(spec, f, y, true)) chiFbar += v;
        ind += (frac_pow(p * q, r) * chiF * chiG -
                frac_pow(p * q, r.one_minus()) * chiFbar * chiGbar) /
               den;
    }
    return ind;
}

cd sci_kernel_value(const TheorySpec& spec, const BasePair& pq, std::span<const cd> z,
                    const FlavorPoint& y) {
    cd v(1.0, 0.0);
    for (const auto& f : spec.fields) {
        if (f.is_vector) continue;
        Frac r{f.r2.num, 2 * f.r2.den};
        cd c0 = frac_pow(pq.pq(), r);
        for (cd fm : flavor_monomials(spec, f, y, false))
            for (const auto& w : rep_weights(f.gauge_rep, spec.gauge_N))
                v *= elliptic_gamma(c0 * fm * eval_weight(z, w), pq);
    }
    for (int a = 0; a < spec.gauge_N; ++a)
        for (int b = 0; b < spec.gauge_N; ++b)
            if (a != b) v /= elliptic_gamma(z[a] / z[b], pq);
    return v;
}

TorusKernel integrand_gamma_form(const TheorySpec& spec, const BasePair& pq,
                                 const FlavorPoint& y) {
    const int N = spec.gauge_N;
    const int rank = spec.rank();
    if (rank < 1 || rank > 3)
        throw domain_error("integrand_gamma_form: rank must be 1..3 for a kernel");

    // constants and effective exponent vectors over the rank free variables
    struct Factor {
        cd c;
        std::vector<int> v;  // length rank
    };
    std::vector<Factor> chirals;
    double cmin = 1.0;
    bool vector_seen = false;
    for (const auto& f : spec.fields) {
        if (f.is_vector) {
            vector_seen = true;
            continue;
        }
        Frac r{f.r2.num, 2 * f.r2.den};
        cd c0 = frac_pow(pq.pq(), r);
        for (cd fm : flavor_monomials(spec, f, y, false)) {
            for (const auto& w : rep_weights(f.gauge_rep, N)) {
                Factor fa;
                fa.c = c0 * fm;
                fa.v.resize(rank);
                for (int a = 0; a < rank; ++a) fa.v[a] = w[a] - w[N - 1];
                chirals.push_back(std::move(fa));
                cmin = std::min(cmin, std::abs(c0 * fm));
            }
        }
    }
    if (!vector_seen) throw domain_error("integrand_gamma_form: missing vector entry");

    std::vector<std::vector<int>> roots;  // ordered pairs a != b
    for (const auto& w : rep_weights(RepKind::adjoint, N)) {
        std::vector<int> v(rank);
        for (int a = 0; a < rank; ++a) v[a] = w[a] - w[N - 1];
        roots.push_back(std::move(v));
    }

    TorusKernel k;
    k.dim = rank;
    k.poles_inside = {cmin};
    k.poles_outside = {1.0 / cmin};
    k.bind = [chirals, roots, pq, rank](const Grid& g) {
        const int Ng = g.N;
        // group chiral factors by constant so each gets one table
        std::map<std::pair<double, double>, std::vector<const std::vector<int>*>> groups;
        for (const auto& f : chirals) groups[{f.c.real(), f.c.imag()}].push_back(&f.v);
        std::vector<std::pair<std::vector<cd>, std::vector<const std::vector<int>*>>> tabs;
        for (auto& [key, vecs] : groups) {
            std::vector<cd> tab(Ng);
            cd c(key.first, key.second);
            for (int m = 0; m < Ng; ++m) tab[m] = elliptic_gamma(c * g.nodes[m], pq);
            tabs.emplace_back(std::move(tab), vecs);
        }
        std::vector<cd> invg(Ng);
        invg[0] = cd(0.0, 0.0);
        for (int m = 1; m < Ng; ++m) invg[m] = cd(1.0, 0.0) / elliptic_gamma(g.nodes[m], pq);
        bool root_on_origin = false;  // rank-0 root can't occur for SU(N), N>1
        (void)root_on_origin;
        return [tabs = std::move(tabs), invg = std::move(invg), roots, rank,
                Ng](std::span<const int> idx) {
            cd v(1.0, 0.0);
            for (const auto& [tab, vecs] : tabs)
                for (const auto* w : vecs) {
                    long e = 0;
                    for (int a = 0; a < rank; ++a) e += static_cast<long>((*w)[a]) * idx[a];
                    v *= tab[((e % Ng) + Ng) % Ng];
                }
            for (const auto& w : roots) {
                long e = 0;
                for (int a = 0; a < rank; ++a) e += static_cast<long>(w[a]) * idx[a];
                v *= invg[((e % Ng) + Ng) % Ng];
            }
            return v;
        };
    };
    return k;
}

std::pair<cd, cd> plethystic_probe(const TheorySpec& spec, const BasePair& pq,
                                   std::span<const cd> z, const FlavorPoint& y,
                                   int nmax) {
    cd acc(0.0, 0.0);
    std::vector<cd> zn(z.begin(), z.end());
    FlavorPoint yn = y;
    cd pn = pq.p, qn = pq.q;
    for (int n = 1; n <= nmax; ++n) {
        if (n > 1) {
            for (size_t i = 0; i < zn.size(); ++i) zn[i] *= z[i];
            for (size_t f = 0; f < yn.su.size(); ++f)
                for (size_t i = 0; i < yn.su[f].size(); ++i) yn.su[f][i] *= y.su[f][i];
            yn.u1 *= y.u1;
            pn *= pq.p;
            qn *= pq.q;
        }
        cd term = single_letter_index(spec, pn, qn, zn, yn) / double(n);
        acc += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc)) && n > 8) break;
    }
    cd pleth = std::exp(acc);

    cd vdm(1.0, 0.0);
    for (int a = 0; a < spec.gauge_N; ++a)
        for (int b = a + 1; b < spec.gauge_N; ++b)
            vdm *= (z[a] - z[b]) * (1.0 / z[a] - 1.0 / z[b]);
    cd gamma_side = ipow(pq.pp_inf * pq.qq_inf, spec.rank()) *
                    sci_kernel_value(spec, pq, z, y);
    // sci_kernel_value already divides by prod Gamma(z_a/z_b); the remaining
    // measure piece is 1/(Delta Delta~)
    gamma_side /= vdm;
    return {pleth, gamma_side};
}

QuadratureResult compute_index(const TheorySpec& spec, const BasePair& pq,
                               const FlavorPoint& y, double tol, int max_nodes) {
    const int rank = spec.rank();
    if (rank == 0) {
        QuadratureResult res;
        std::vector<cd> z = {cd(1.0, 0.0)};
        res.value = sci_kernel_value(spec, pq, z, y);
        res.converged = true;
        return res;
    }
    if (rank > 2) throw domain_error("compute_index: rank must be <= 2");
    auto kern = integrand_gamma_form(spec, pq, y);
    if (pole_clearance(kern.poles_inside, kern.poles_outside) < kClearanceMargin)
        throw domain_error("compute_index: gamma pole too close to the torus");
    auto res = torus_integrate(kern, tol, max_nodes);
    res.value *= ipow(pq.pp_inf * pq.qq_inf, rank) / factorial(spec.gauge_N);
    return res;
}

std::pair<TheorySpec, TheorySpec> seiberg_pair(int N, int M) {
    if (!(M > N && N >= 1)) throw domain_error("seiberg_pair: need M > N >= 1");
    const int Nt = M - N;
    TheorySpec el, mag;
    el.name = "seiberg-electric";
    el.gauge_N = N;
    el.flavors = {{false, M}, {false, M}, {true, 0}};
    el.fields = {
        {"Q", RepKind::fundamental, {RepKind::fundamental, RepKind::trivial}, {1, 1},
         {Nt, M}, false},
        {"Qb", RepKind::antifundamental, {RepKind::trivial, RepKind::antifundamental},
         {-1, 1}, {Nt, M}, false},
        {"V", RepKind::adjoint, {RepKind::trivial, RepKind::trivial}, {0, 1}, {1, 1},
         true},
    };
    mag.name = "seiberg-magnetic";
    mag.gauge_N = Nt;
    mag.flavors = el.flavors;
    mag.fields = {
        {"q", RepKind::fundamental, {RepKind::antifundamental, RepKind::trivial},
         {N, Nt}, {N, M}, false},
        {"qb", RepKind::antifundamental, {RepKind::trivial, RepKind::fundamental},
         {-N, Nt}, {N, M}, false},
        {"Mes", RepKind::trivial, {RepKind::fundamental, RepKind::antifundamental},
         {0, 1}, {2 * Nt, M}, false},
        {"V", RepKind::adjoint, {RepKind::trivial, RepKind::trivial}, {0, 1}, {1, 1},
         true},
    };
    return {el, mag};
}

IdentityReport duality_check(int N, int M, const BasePair& pq, const FlavorPoint& y,
                             double tol, uint64_t seed, int max_nodes) {
    auto [el, mag] = seiberg_pair(N, M);
    if (el.rank() > 1 || mag.rank() > 1)
        throw domain_error("duality_check: rank must be <= 1 on both sides");
    auto a = compute_index(el, pq, y, std::min(tol * 1e-2, 1e-10), max_nodes);
    auto b = compute_index(mag, pq, y, std::min(tol * 1e-2, 1e-10), max_nodes);
    std::ostringstream id;
    id << "sci-" << N << "-" << M;
    return make_report(id.str(), a.value, b.value, tol, seed, -1.0,
                       std::max(a.nodes_per_dim, b.nodes_per_dim),
                       a.evaluations + b.evaluations);
}

// --- parser ---------------------------------------------------------------------

namespace {

bool parse_frac(const std::string& s, Frac& out) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            out.num = std::stoll(s);
            out.den = 1;
        } else {
            out.num = std::stoll(s.substr(0, slash));
            out.den = std::stoll(s.substr(slash + 1));
        }
    } catch (...) {
        return false;
    }
    return out.den != 0;
}

bool parse_rep(const std::string& s, RepKind& out) {
    if (s == "f") out = RepKind::fundamental;
    else if (s == "fbar") out = RepKind::antifundamental;
    else if (s == "adj") out = RepKind::adjoint;
    else if (s == "asym") out = RepKind::antisymmetric;
    else if (s == "1") out = RepKind::trivial;
    else return false;
    return true;
}

}  // namespace

TheorySpec parse_theory(const std::string& text) {
    TheorySpec spec;
    std::vector<std::string> errors;
    bool have_group = false;
    int vector_count = 0;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int su_flavors = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        auto err = [&](const std::string& msg) {
            errors.push_back("line " + std::to_string(lineno) + ": " + msg);
        };
        if (tok == "group") {
            std::string gtype;
            int n = 0;
            if (!(ls >> gtype >> n) || gtype != "SU" || n < 1) {
                err("expected 'group SU <N>'");
                continue;
            }
            if (have_group) {
                err("duplicate gauge group");
                continue;
            }
            have_group = true;
            spec.gauge_N = n;
        } else if (tok == "flavor") {
            std::string ftype;
            if (!(ls >> ftype)) {
                err("expected 'flavor SU <K>' or 'flavor U1'");
                continue;
            }
            if (ftype == "U1") {
                spec.flavors.push_back({true, 0});
            } else if (ftype == "SU") {
                int k = 0;
                if (!(ls >> k) || k < 1) {
                    err("expected 'flavor SU <K>'");
                    continue;
                }
                spec.flavors.push_back({false, k});
                ++su_flavors;
            } else {
                err("unknown flavor factor '" + ftype + "'");
            }
        } else if (tok == "field") {
            RepEntry f;
            bool ok = true;
            std::string kv;
            bool saw_gauge = false, saw_r2 = false;
            while (ls >> kv) {
                if (kv == "vector") {
                    f.is_vector = true;
                    continue;
                }
                auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    err("malformed token '" + kv + "'");
                    ok = false;
                    break;
                }
                std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "name") {
                    f.name = val;
                } else if (key == "gauge") {
                    if (!parse_rep(val, f.gauge_rep)) {
                        err("unknown gauge rep token '" + val + "'");
                        ok = false;
                    }
                    saw_gauge = true;
                } else if (key == "flavor") {
                    std::istringstream fs(val);
                    std::string r;
                    while (std::getline(fs, r, ',')) {
                        RepKind kind;
                        if (!parse_rep(r, kind)) {
                            err("unknown flavor rep token '" + r + "'");
                            ok = false;
                            break;
                        }
                        f.flavor_reps.push_back(kind);
                    }
                } else if (key == "u1") {
                    if (!parse_frac(val, f.u1_charge)) {
                        err("u1 charge is not a rational");
                        ok = false;
                    }
                } else if (key == "r2") {
                    if (!parse_frac(val, f.r2)) {
                        err("r2 charge is not a rational");
                        ok = false;
                    }
                    saw_r2 = true;
                } else {
                    err("unknown key '" + key + "'");
                    ok = false;
                }
            }
            if (!ok) continue;
            if (!saw_gauge) {
                err("field needs gauge=<rep>");
                continue;
            }
            if (!f.is_vector) {
                if (!saw_r2) {
                    err("field needs r2=<rational>");
                    continue;
                }
                double r2v = f.r2.value();
                if (!(r2v > 0.0 && r2v < 2.0)) {
                    err("r2 must lie in (0,2)");
                    continue;
                }
            } else {
                ++vector_count;
            }
            spec.fields.push_back(std::move(f));
        } else {
            err("unknown directive '" + tok + "'");
        }
    }
    if (!have_group) errors.push_back("missing gauge group");
    if (vector_count == 0 && have_group) errors.push_back("missing vector entry");
    if (vector_count > 1) errors.push_back("duplicate vector entry");
    for (const auto& f : spec.fields)
        if (static_cast<int>(f.flavor_reps.size()) != su_flavors && !f.is_vector)
            errors.push_back("field '" + f.name + "': need one flavor token per SU factor");
    if (!errors.empty()) {
        std::string all = "parse_theory:";
        for (const auto& e : errors) all += "\n  " + e;
        throw domain_error(all);
    }
    return spec;
}

}  // namespace ellhyp
