#include "ellhyp/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ellhyp/gamma.hpp"
#include "ellhyp/identities.hpp"
#include "ellhyp/sci.hpp"
#include "ellhyp/special.hpp"

namespace ellhyp {

namespace {

using Clock = std::chrono::steady_clock;

int64_t ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0)
        .count();
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

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

struct Draw {
    Rng rng;
    explicit Draw(uint64_t seed) : rng(seed) {}

    // k moduli in [rlo,rhi], phases in +-phase, product of all k forced to
    // `target` by deriving the last; retries until the derived modulus lands
    // in [dlo,dhi]
    std::vector<cd> balanced(int k, double rlo, double rhi, cd target, double dlo,
                             double dhi, double phase = kPi) {
        for (int attempt = 0; attempt < 20000; ++attempt) {
            std::vector<cd> t(k);
            cd prod(1.0, 0.0);
            for (int i = 0; i + 1 < k; ++i) {
                t[i] = rng.annulus(rlo, rhi, -phase, phase);
                prod *= t[i];
            }
            t[k - 1] = target / prod;
            double m = std::abs(t[k - 1]);
            if (m >= dlo && m <= dhi) return t;
        }
        throw domain_error("parameter sampler failed to satisfy the windows");
    }
};

IdentityReport timed(IdentityReport r, Clock::time_point t0) {
    r.runtime_ms = ms_since(t0);
    return r;
}

int draws_or(const RunConfig& cfg, int dflt) { return cfg.draws > 0 ? cfg.draws : dflt; }
double tol_or(const RunConfig& cfg, double dflt) { return cfg.tol > 0 ? cfg.tol : dflt; }
int nodes_or(const RunConfig& cfg, int dflt) {
    return cfg.max_nodes > 0 ? cfg.max_nodes : dflt;
}

// ----- runners -------------------------------------------------------------

std::vector<IdentityReport> run_ell_int(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("ell-int"));
    double tol = tol_or(cfg, 1e-9);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 20); ++i) {
        auto t0 = Clock::now();
        auto t = d.balanced(6, 0.55, 0.78, pq.pq(), 0.05, 0.78);
        BalancedParams bp{t, 1, pq};
        QuadratureResult info;
        cd lhs = beta_integral(Side::lhs, bp, std::min(tol * 1e-2, 1e-11), maxn, &info);
        cd rhs = beta_integral(Side::rhs, bp);
        out.push_back(timed(make_report("ell-int", lhs, rhs, tol, cfg.seed, -1.0,
                                        info.nodes_per_dim, info.evaluations),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_ft_sum(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("ft-sum"));
    double tol = tol_or(cfg, 1e-11);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 50); ++i) {
        auto t0 = Clock::now();
        IdentityReport rep;
        for (int attempt = 0;; ++attempt) {
            int N = static_cast<int>(d.rng.uniform(0.0, 6.999));
            std::array<cd, 5> t;
            for (int m = 0; m < 3; ++m) t[m] = d.rng.annulus(0.25, 0.8);
            t[4] = d.rng.annulus(0.25, 0.8);
            t[3] = ipow(pq.q, -N) / t[4];  // termination t_4 t_5 = q^{-N}
            double condition = 0.0;
            rep = frenkel_turaev_check(t, N, pq, tol, cfg.seed, &condition);
            if (condition < 3e2) break;  // keep cancellation within double range
            if (attempt > 20000) throw domain_error("ft-sum sampler failed");
        }
        out.push_back(timed(rep, t0));
    }
    return out;
}

std::vector<IdentityReport> run_res(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("res"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 5); ++i) {
        auto t0 = Clock::now();
        std::array<cd, 5> t;
        for (int attempt = 0;; ++attempt) {
            for (int m = 0; m < 4; ++m) t[m] = d.rng.annulus(0.35, 0.7);
            t[4] = d.rng.annulus(1.06, 1.15);
            cd A = t[0] * t[1] * t[2] * t[3] * t[4];
            if (std::abs(A) > std::abs(pq.pq()) * 1.45 && std::abs(A * t[4]) < 0.95 &&
                std::abs(A) < 0.9)
                break;
            if (attempt > 20000)
                throw domain_error("res sampler failed");
        }
        out.push_back(timed(residue_expansion(t, 8, pq, tol, cfg.seed, maxn), t0));
    }
    return out;
}

std::vector<cd> v8_sample(Draw& d, const BasePair& pq, double rlo, double rhi,
                          double dlo, double dhi, double phase = kPi) {
    return d.balanced(8, rlo, rhi, pq.pq() * pq.pq(), dlo, dhi, phase);
}

std::vector<IdentityReport> run_e7_1(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("e7-1"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 5); ++i) {
        auto t0 = Clock::now();
        BalancedParams bp;
        TransformResult tr;
        for (int attempt = 0;; ++attempt) {
            bp = BalancedParams{v8_sample(d, pq, 0.52, 0.72, 0.2, 0.72), 2, pq};
            try {
                tr = e7_apply(bp, E7Which::reflection_A);
                bool ok = true;
                for (cd s : tr.new_params.t) ok = ok && std::abs(s) < 0.8;
                if (ok) break;
            } catch (const domain_error&) {
            }
            if (attempt > 20000) throw domain_error("e7-1 sampler failed");
        }
        QuadratureResult ia, ib;
        cd lhs = v_eval(bp, std::min(tol * 1e-2, 1e-11), maxn, &ia);
        cd rhs = tr.prefactor * v_eval(tr.new_params, std::min(tol * 1e-2, 1e-11), maxn, &ib);
        out.push_back(timed(make_report("e7-1", lhs, rhs, tol, cfg.seed, -1.0,
                                        std::max(ia.nodes_per_dim, ib.nodes_per_dim),
                                        ia.evaluations + ib.evaluations),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_e7_2(const RunConfig& cfg) {
    // exact composition law, plus one numeric spot check at small phases
    BasePair pq(cfg.p, cfg.q);
    auto t0 = Clock::now();
    std::vector<IdentityReport> out;
    bool law = duality_composition_law_holds();
    out.push_back(timed(make_report("e7-2", cd(law ? 1.0 : 0.0), cd(1.0), 1e-15,
                                    cfg.seed),
                        t0));
    Draw d(cfg.seed ^ fnv1a("e7-2"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 4096);
    auto t1 = Clock::now();
    for (int attempt = 0;; ++attempt) {
        BalancedParams bp{v8_sample(d, pq, 0.58, 0.72, 0.3, 0.72, kPi / 16), 2, pq};
        try {
            auto tr = e7_apply(bp, E7Which::duality_B);
            bool ok = true;
            for (cd s : tr.new_params.t) ok = ok && std::abs(s) < 0.8;
            if (!ok) continue;
            QuadratureResult ia, ib;
            cd lhs = v_eval(bp, std::min(tol * 1e-2, 1e-11), maxn, &ia);
            cd rhs = tr.prefactor *
                     v_eval(tr.new_params, std::min(tol * 1e-2, 1e-11), maxn, &ib);
            out.push_back(timed(make_report("e7-2", lhs, rhs, tol, cfg.seed, -1.0,
                                            std::max(ia.nodes_per_dim, ib.nodes_per_dim),
                                            ia.evaluations + ib.evaluations),
                                t1));
            break;
        } catch (const domain_error&) {
        }
        if (attempt > 20000) throw domain_error("e7-2 sampler failed");
    }
    return out;
}

std::vector<IdentityReport> run_e7_3(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("e7-3"));
    double tol = tol_or(cfg, 1e-13);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 5); ++i) {
        auto t0 = Clock::now();
        double lo = std::sqrt(std::abs(pq.pq())) + 0.05;
        BalancedParams bp{v8_sample(d, pq, lo, 0.8, lo, 0.8), 2, pq};
        auto tr1 = e7_apply(bp, E7Which::inversion_C);
        auto tr2 = e7_apply(tr1.new_params, E7Which::inversion_C);
        double dev = 0.0;
        for (int j = 0; j < 8; ++j)
            dev = std::max(dev, std::abs(tr2.new_params.t[j] - bp.t[j]));
        cd cum = tr1.prefactor * tr2.prefactor;
        out.push_back(timed(make_report("e7-3", cum + dev, cd(1.0), tol, cfg.seed), t0));
    }
    return out;
}

std::vector<IdentityReport> run_con1(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("con-1"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 3); ++i) {
        auto t0 = Clock::now();
        BalancedParams bp;
        for (int attempt = 0;; ++attempt) {
            std::vector<cd> t(8);
            cd prod(1.0, 0.0);
            for (int j = 0; j < 7; ++j) {
                t[j] = d.rng.annulus(0.5, 0.72);
                prod *= t[j];
            }
            t[7] = pq.pq() * pq.pq() / prod;
            bp = BalancedParams{t, 2, pq};
            double a8 = std::abs(t[7]);
            double aq = std::abs(pq.q);
            if (a8 < 0.8 * aq && a8 > 0.02 &&
                std::abs(t[5]) * aq < 0.8 && std::abs(t[6]) * aq < 0.8)
                break;
            if (attempt > 20000) throw domain_error("con-1 sampler failed");
        }
        double scale = 0.0;
        cd resid = contiguous_residual(bp, std::min(tol * 1e-2, 1e-11), maxn, &scale);
        out.push_back(
            timed(make_report("con-1", resid, cd(0.0), tol, cfg.seed, scale), t0));
    }
    return out;
}

std::vector<IdentityReport> run_eheq_rn(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("eheq-rn"));
    double tol = tol_or(cfg, 1e-9);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 5); ++i) {
        auto t0 = Clock::now();
        cd e1 = d.rng.annulus(0.4, 0.9), e2 = d.rng.annulus(0.4, 0.9),
           e3 = d.rng.annulus(0.4, 0.9), e6 = d.rng.annulus(0.4, 0.9),
           e8 = d.rng.annulus(0.3, 0.8);
        int n = 1 + static_cast<int>(d.rng.uniform(0.0, 2.999));
        auto par = EheqParams::for_index(e1, e2, e3, e6, e8, n, pq);
        cd x = d.rng.unit_phase();
        auto f = [&](cd xx) { return biorth_R(xx, n, par); };
        cd Ax = par.potential(x), Axi = par.potential(1.0 / x);
        cd fx = f(x);
        cd term1 = Ax * (f(pq.q * x) - fx);
        cd term2 = Axi * (f(x / pq.q) - fx);
        cd term3 = par.nu() * fx;
        double scale =
            std::max({std::abs(term1), std::abs(term2), std::abs(term3), 1e-30});
        out.push_back(timed(
            make_report("eheq-rn", term1 + term2 + term3, cd(0.0), tol, cfg.seed, scale),
            t0));
    }
    return out;
}

std::vector<IdentityReport> run_eheq_sol1(const RunConfig& cfg) {
    // the sol1 windows need |p| < |q|^3; this runner fixes its own bases
    BasePair pq(cd(0.02, 0.0), cd(0.45, 0.0));
    Draw d(cfg.seed ^ fnv1a("eheq-sol1"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 2048);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 2); ++i) {
        auto t0 = Clock::now();
        cd c, x;
        std::array<cd, 8> eps;
        for (int attempt = 0;; ++attempt) {
            std::array<cd, 6> tt;  // t_1..t_5, t_8
            for (auto& v : tt) v = d.rng.annulus(0.26, 0.44, -kPi / 3, kPi / 3);
            cd prod(1.0, 0.0);
            for (auto& v : tt) prod *= v;
            cd c2 = pq.pq() * pq.pq() / prod;
            c = std::sqrt(c2);
            if (std::abs(c) < 0.25 || std::abs(c) > 0.35) {
                if (attempt > 40000) throw domain_error("eheq-sol1 sampler failed");
                continue;
            }
            x = d.rng.unit_phase();
            for (int k = 0; k < 5; ++k) eps[k] = pq.q / (c * tt[k]);
            eps[7] = c / tt[5];
            eps[6] = eps[7] / pq.q;
            eps[5] = c * c * ipow(pq.p, 4) / eps[7];
            break;
        }
        EheqParams par;
        par.pq = pq;
        par.eps = eps;
        auto f = [&](cd xx) {
            return eheq_sol1(xx, par, c, std::min(tol * 1e-3, 1e-11), maxn);
        };
        cd Ax = par.potential(x), Axi = par.potential(1.0 / x);
        cd fx = f(x);
        cd term1 = Ax * (f(pq.q * x) - fx);
        cd term2 = Axi * (f(x / pq.q) - fx);
        cd term3 = par.nu() * fx;
        double scale =
            std::max({std::abs(term1), std::abs(term2), std::abs(term3), 1e-30});
        out.push_back(timed(make_report("eheq-sol1", term1 + term2 + term3, cd(0.0), tol,
                                        cfg.seed, scale),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_ttr(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("ttr"));
    double tol = tol_or(cfg, 1e-11);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 3); ++i) {
        auto t0 = Clock::now();
        cd e1 = d.rng.annulus(0.4, 0.9), e2 = d.rng.annulus(0.4, 0.9),
           e3 = d.rng.annulus(0.4, 0.9), e6 = d.rng.annulus(0.4, 0.9),
           e8 = d.rng.annulus(0.3, 0.8);
        TTRConfig cfg1{d.rng.annulus(0.6, 1.4), d.rng.annulus(0.6, 1.4)};
        cd x = d.rng.unit_phase();
        auto base = EheqParams::for_index(e1, e2, e3, e6, e8, 0, pq);
        cd Rm = 0.0, Rc = 1.0;
        double worst = 0.0;
        for (int n = 0; n < 5; ++n) {
            cd Rn1 = ttr_step(Rm, Rc, n, x, base, cfg1);
            cd direct = biorth_R(x, n + 1, base.with_index(n + 1));
            worst = std::max(worst,
                             std::abs(Rn1 - direct) / std::max(1.0, std::abs(direct)));
            Rm = Rc;
            Rc = Rn1;
        }
        out.push_back(timed(make_report("ttr", cd(worst), cd(0.0), tol, cfg.seed, 1.0),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_biorth(const RunConfig& cfg) {
    // The k=l=0 contour conditions need every shifted pole ladder on the
    // correct side of T for n,m <= 3; that requires |p| well below |q|^5,
    // so this runner fixes its own bases.
    BasePair pq(cd(0.03, 0.0), cd(0.62, 0.0));
    Draw d(cfg.seed ^ fnv1a("biorth"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 2048);
    auto t0 = Clock::now();
    cd e1 = d.rng.annulus(0.88, 0.93), e2 = d.rng.annulus(0.88, 0.93),
       e3 = d.rng.annulus(0.88, 0.93), e6 = d.rng.annulus(0.88, 0.93),
       e8 = d.rng.annulus(0.15, 0.2);
    auto par = EheqParams::for_index(e1, e2, e3, e6, e8, 0, pq);
    auto gram = biorth_gram(par, 3, std::min(tol * 1e-2, 1e-10), maxn);
    double diag_scale = 0.0;
    for (int n = 0; n <= 3; ++n) diag_scale = std::max(diag_scale, std::abs(gram.G[n][n]));
    std::vector<IdentityReport> out;
    for (int n = 0; n <= 3; ++n)
        for (int m = 0; m <= 3; ++m) {
            std::string id = "biorth";
            if (n == m) {
                out.push_back(make_report(id, gram.G[n][m], gram.h[n], tol, cfg.seed,
                                          -1.0, gram.nodes));
            } else {
                out.push_back(make_report(id, gram.G[n][m], cd(0.0), tol, cfg.seed,
                                          diag_scale, gram.nodes));
            }
            out.back().runtime_ms = ms_since(t0);
        }
    return out;
}

std::vector<IdentityReport> run_cn1_n2(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("cn1-n2"));
    double tol = tol_or(cfg, 1e-7);
    int maxn = nodes_or(cfg, 512);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 2); ++i) {
        auto t0 = Clock::now();
        auto t = d.balanced(8, 0.68, 0.8, pq.pq(), 0.3, 0.8);
        QuadratureResult info;
        cd lhs = cn_type1(Side::lhs, t, 2, pq, std::min(tol * 1e-2, 1e-9), maxn, &info);
        cd rhs = cn_type1(Side::rhs, t, 2, pq);
        out.push_back(timed(make_report("cn1-n2", lhs, rhs, tol, cfg.seed, -1.0,
                                        info.nodes_per_dim, info.evaluations),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_cn2_selberg(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("cn2-selberg-n2"));
    double tol = tol_or(cfg, 1e-7);
    int maxn = nodes_or(cfg, 512);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 1); ++i) {
        auto t0 = Clock::now();
        cd t;
        std::vector<cd> t6;
        for (int attempt = 0;; ++attempt) {
            t = d.rng.annulus(0.68, 0.8);
            t6.assign(6, cd(0.0));
            cd prod = t * t;
            for (int j = 0; j < 5; ++j) {
                t6[j] = d.rng.annulus(0.72, 0.82);
                prod *= t6[j];
            }
            t6[5] = pq.pq() / prod;
            if (std::abs(t6[5]) > 0.25 && std::abs(t6[5]) < 0.6) break;
            if (attempt > 20000) throw domain_error("cn2 sampler failed");
        }
        QuadratureResult info;
        cd lhs = cn_type2_selberg(Side::lhs, t, t6, 2, pq, std::min(tol * 1e-2, 1e-9),
                                  maxn, &info);
        cd rhs = cn_type2_selberg(Side::rhs, t, t6, 2, pq);
        out.push_back(timed(make_report("cn2-selberg-n2", lhs, rhs, tol, cfg.seed, -1.0,
                                        info.nodes_per_dim, info.evaluations),
                            t0));
        // one-step dimensional recursion at the same parameters
        auto t1 = Clock::now();
        auto [rl, rr] = selberg_recursion_step(t, std::span<const cd>(t6.data(), 5), 2,
                                               pq, std::min(tol * 1e-2, 1e-9), maxn);
        out.push_back(timed(make_report("cn2-rec", rl, rr, tol, cfg.seed), t1));
    }
    return out;
}

std::vector<IdentityReport> run_an(const RunConfig& cfg, int n, const char* id) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a(id));
    double tol = tol_or(cfg, n == 1 ? 1e-8 : 1e-6);
    int maxn = nodes_or(cfg, n == 1 ? 4096 : 512);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, n == 1 ? 3 : 1); ++i) {
        auto t0 = Clock::now();
        cd t, s;
        std::array<cd, 3> tp, sp;
        for (int attempt = 0;; ++attempt) {
            t = d.rng.annulus(0.5, 0.7);
            s = d.rng.annulus(0.5, 0.7);
            cd prod = ipow(t * s, n - 1);
            double rlo = n == 1 ? 0.55 : 0.74, rhi = n == 1 ? 0.75 : 0.84;
            for (int j = 0; j < 3; ++j) {
                tp[j] = d.rng.annulus(rlo, rhi);
                prod *= tp[j];
            }
            sp[0] = d.rng.annulus(rlo, rhi);
            sp[1] = d.rng.annulus(rlo, rhi);
            prod *= sp[0] * sp[1];
            sp[2] = pq.pq() / prod;
            if (std::abs(sp[2]) > 0.4 && std::abs(sp[2]) < rhi + 0.01) break;
            if (attempt > 40000) throw domain_error("an sampler failed");
        }
        QuadratureResult info;
        cd lhs = an_beta(Side::lhs, tp, sp, t, s, n, pq, std::min(tol * 1e-2, 1e-9),
                         maxn, &info);
        cd rhs = an_beta(Side::rhs, tp, sp, t, s, n, pq);
        out.push_back(timed(make_report(id, lhs, rhs, tol, cfg.seed, -1.0,
                                        info.nodes_per_dim, info.evaluations),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_rains(const RunConfig& cfg, int n, const char* id) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a(id));
    double tol = tol_or(cfg, n == 1 ? 1e-12 : 1e-5);
    int maxn = nodes_or(cfg, n == 1 ? 2048 : 256);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 1); ++i) {
        auto t0 = Clock::now();
        cd t;
        std::array<cd, 8> t8;
        for (int attempt = 0;; ++attempt) {
            t = d.rng.annulus(0.3, 0.5);
            cd target = pq.pq() * pq.pq() * ipow(t, 2 - 2 * n);
            std::vector<cd> v;
            try {
                v = d.balanced(8, 0.6, 0.8, target, 0.35, 0.8);
            } catch (const domain_error&) {
                continue;
            }
            std::copy(v.begin(), v.end(), t8.begin());
            cd rho = std::sqrt(t8[0] * t8[1] * t8[2] * t8[3] / (pq.pq() * ipow(t, 1 - n)));
            bool ok = true;
            for (int j = 0; j < 4; ++j) ok = ok && std::abs(t8[j] / rho) < 0.85;
            for (int j = 4; j < 8; ++j) ok = ok && std::abs(t8[j] * rho) < 0.85;
            if (ok) break;
            if (attempt > 2000) throw domain_error("rains sampler failed");
        }
        auto rep = rains_transform(t8, t, n, pq, tol, cfg.seed, maxn);
        out.push_back(timed(rep, t0));
    }
    return out;
}

std::vector<IdentityReport> run_eft(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("eft-beta"));
    double tol = tol_or(cfg, 1e-9);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 3); ++i) {
        auto t0 = Clock::now();
        cd t, w, u3, u4, u5, u6;
        for (int attempt = 0;; ++attempt) {
            t = d.rng.annulus(0.55, 0.75);
            w = d.rng.unit_phase();
            u3 = d.rng.annulus(0.65, 0.8);
            u4 = d.rng.annulus(0.65, 0.8);
            u5 = d.rng.annulus(0.65, 0.8);
            u6 = pq.pq() / (t * t * u3 * u4 * u5);
            if (std::abs(u6) > 0.1 && std::abs(u6) < 0.8) break;
            if (attempt > 20000) throw domain_error("eft sampler failed");
        }
        auto alpha = [&](cd z) {
            return gamma_pm(u3, z, pq) * gamma_pm(u4, z, pq) * gamma_pm(u5, z, pq) *
                   gamma_pm(u6, z, pq);
        };
        QuadratureResult info;
        cd lhs = bailey_M(t, alpha, w, pq, std::min(tol * 1e-2, 1e-11), maxn, &info);
        std::array<cd, 6> u = {t * w, t / w, u3, u4, u5, u6};
        GammaProductSpec spec;
        spec.pq = pq;
        for (int j = 0; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) spec.numerator.push_back(u[j] * u[k]);
        spec.denominator.push_back(t * t);
        cd rhs = gamma_product(spec);
        out.push_back(timed(make_report("eft-beta", lhs, rhs, tol, cfg.seed, -1.0,
                                        info.nodes_per_dim, info.evaluations),
                            t0));
    }
    return out;
}

std::vector<IdentityReport> run_d_reflection(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("d-reflection"));
    double tol = tol_or(cfg, 1e-14);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 10); ++i) {
        auto t0 = Clock::now();
        cd t = d.rng.annulus(0.4, 0.9);
        cd y = d.rng.unit_phase();
        cd w = d.rng.unit_phase();
        cd prod = bailey_D(1.0 / t, y, w, pq) * bailey_D(t, y, w, pq);
        out.push_back(timed(make_report("d-reflection", prod, cd(1.0), tol, cfg.seed), t0));
    }
    return out;
}

std::vector<IdentityReport> run_str(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("str"));
    double tol = tol_or(cfg, 1e-7);
    int maxn = nodes_or(cfg, 256);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 2); ++i) {
        for (int which = 0; which < 2; ++which) {
            auto t0 = Clock::now();
            cd s = d.rng.annulus(0.62, 0.8);
            cd t = d.rng.annulus(0.62, 0.8);
            cd y = d.rng.unit_phase();
            cd w = d.rng.unit_phase();
            std::function<cd(cd)> f;
            if (which == 0)
                f = [](cd) { return cd(1.0, 0.0); };
            else
                f = [](cd z) { return z + 1.0 / z; };
            double scale = 0.0;
            cd resid = star_triangle_residual(s, t, y, f, w, pq,
                                              std::min(tol * 1e-2, 1e-10), maxn, &scale);
            out.push_back(timed(
                make_report("str", resid, cd(0.0), tol, cfg.seed, std::max(scale, 1e-30)),
                t0));
        }
    }
    return out;
}

std::vector<IdentityReport> run_rec_int(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("rec-int-m0"));
    double tol = tol_or(cfg, 1e-8);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 2); ++i) {
        auto t0 = Clock::now();
        std::array<cd, 8> t8;
        for (int attempt = 0;; ++attempt) {
            auto v = v8_sample(d, pq, 0.5, 0.7, 0.25, 0.75);
            std::copy(v.begin(), v.end(), t8.begin());
            cd rho = std::sqrt(t8[4] * t8[5] * t8[6] * t8[7] / pq.pq());
            bool ok = true;
            for (int j = 0; j < 4; ++j) ok = ok && std::abs(t8[j] * rho) < 0.8;
            for (int j = 4; j < 8; ++j) ok = ok && std::abs(t8[j] / rho) < 0.8;
            if (ok) break;
            if (attempt > 20000) throw domain_error("rec-int sampler failed");
        }
        auto rep = recursion_Im(0, t8, pq, tol, cfg.seed, maxn);
        out.push_back(timed(rep, t0));

        // consistency with the reflection transformation (two code paths)
        auto t1 = Clock::now();
        BalancedParams bp{std::vector<cd>(t8.begin(), t8.end()), 2, pq};
        auto tr = e7_apply(bp, E7Which::reflection_A);
        cd via_e7 = tr.prefactor * v_eval(tr.new_params, 1e-11, maxn);
        out.push_back(timed(
            make_report("rec-int-e7", rep.rhs, via_e7, tol_or(cfg, 1e-10), cfg.seed), t1));
    }
    return out;
}

FlavorPoint seiberg_point(Draw& d, const TheorySpec& spec, int M) {
    std::vector<cd> yl(M), yr(M);
    for (int i = 0; i < M; ++i) {
        yl[i] = d.rng.unit_phase();
        yr[i] = d.rng.unit_phase();
    }
    return make_flavor_point(spec, {yl, yr}, d.rng.unit_phase());
}

std::vector<IdentityReport> run_sci(const RunConfig& cfg, int N, int M, const char* id) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a(id));
    double tol = tol_or(cfg, N + M == 5 ? 1e-9 : 1e-8);
    int maxn = nodes_or(cfg, 4096);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 2); ++i) {
        auto t0 = Clock::now();
        auto [el, mag] = seiberg_pair(N, M);
        auto y = seiberg_point(d, el, M);
        auto rep = duality_check(N, M, pq, y, tol, cfg.seed, maxn);
        out.push_back(timed(rep, t0));
    }
    return out;
}

std::vector<IdentityReport> run_sci_pleth(const RunConfig& cfg) {
    BasePair pq(cfg.p, cfg.q);
    Draw d(cfg.seed ^ fnv1a("sci-pleth"));
    double tol = tol_or(cfg, 1e-9);
    std::vector<IdentityReport> out;
    auto [el, mag] = seiberg_pair(2, 3);
    for (int i = 0; i < draws_or(cfg, 10); ++i) {
        auto t0 = Clock::now();
        auto y = seiberg_point(d, el, 3);
        cd z1 = d.rng.unit_phase();
        std::vector<cd> z = {z1, 1.0 / z1};
        auto [pleth, gform] = plethystic_probe(el, pq, z, y, 400);
        out.push_back(timed(make_report("sci-pleth", pleth, gform, tol, cfg.seed), t0));
    }
    return out;
}

std::vector<IdentityReport> run_mod_gamma(const RunConfig& cfg) {
    Draw d(cfg.seed ^ fnv1a("mod-gamma"));
    double tol = tol_or(cfg, 1e-11);
    std::vector<IdentityReport> out;
    for (int i = 0; i < draws_or(cfg, 10); ++i) {
        auto t0 = Clock::now();
        for (int attempt = 0;; ++attempt) {
            cd w1(1.0, 0.0);
            cd w2(d.rng.uniform(1.2, 3.0), -d.rng.uniform(0.3, 1.5));
            cd w3(d.rng.uniform(-0.5, 2.0), d.rng.uniform(0.8, 3.0));
            try {
                OmegaTriple w(w1, w2, w3);
                double mx = std::max({std::abs(w.q), std::abs(w.p), std::abs(w.r),
                                      std::abs(w.qt), std::abs(w.pt), std::abs(w.rt)});
                if (mx > 0.8) {
                    if (attempt > 20000) throw domain_error("mod-gamma sampler failed");
                    continue;
                }
                cd u = d.rng.uniform(0.15, 0.7) * w1 + d.rng.uniform(0.15, 0.7) * w2 +
                       d.rng.uniform(0.15, 0.7) * w3;
                cd a = modified_gamma_G(u, w, GMethod::product_form);
                cd b = modified_gamma_G(u, w, GMethod::bernoulli_form);
                out.push_back(timed(make_report("mod-gamma", a, b, tol, cfg.seed), t0));
                break;
            } catch (const domain_error&) {
                if (attempt > 20000) throw;
            }
        }
    }
    return out;
}

std::vector<IdentityReport> run_mod_theta(const RunConfig& cfg) {
    Draw d(cfg.seed ^ fnv1a("mod-theta"));
    double tol = tol_or(cfg, 1e-11);
    std::vector<IdentityReport> out;
    const cd tp = 2.0 * kPi * kI;
    for (int i = 0; i < draws_or(cfg, 10); ++i) {
        auto t0 = Clock::now();
        for (int attempt = 0;; ++attempt) {
            cd w1(1.0, 0.0);
            cd w2(d.rng.uniform(1.2, 3.0), -d.rng.uniform(0.3, 1.5));
            cd w3(d.rng.uniform(-0.5, 2.0), d.rng.uniform(0.8, 3.0));
            try {
                OmegaTriple w(w1, w2, w3);
                if (std::max(std::abs(w.q), std::abs(w.qt)) > 0.8) {
                    if (attempt > 20000) throw domain_error("mod-theta sampler failed");
                    continue;
                }
                cd u = d.rng.uniform(0.1, 0.9) * w1 + d.rng.uniform(0.1, 0.9) * w2;
                cd lhs = theta(std::exp(-tp * u / w.w1), w.qt);
                cd b22 = bernoulli_poly(BernoulliKind::B22, u, w);
                cd rhs = std::exp(kPi * kI * b22) * theta(std::exp(tp * u / w.w2), w.q);
                double scale = std::max(std::abs(lhs), std::abs(rhs));
                out.push_back(
                    timed(make_report("mod-theta", lhs, rhs, tol, cfg.seed, scale), t0));
                break;
            } catch (const domain_error&) {
                if (attempt > 20000) throw;
            }
        }
    }
    return out;
}

}  // namespace

const std::vector<IdentityRunner>& identity_registry() {
    static const std::vector<IdentityRunner> reg = {
        {"ell-int", 1, "elliptic beta integral evaluation", run_ell_int},
        {"ft-sum", 0, "Frenkel-Turaev summation", run_ft_sum},
        {"res", 1, "residue expansion across the unit circle", run_res},
        {"e7-1", 1, "reflection transformation of the V-function", run_e7_1},
        {"e7-2", 1, "duality transformation: composition law + spot check", run_e7_2},
        {"e7-3", 0, "inversion transformation involution", run_e7_3},
        {"con-1", 1, "contiguous relation for V-functions", run_con1},
        {"eheq-rn", 0, "difference equation residual for R_n", run_eheq_rn},
        {"eheq-sol1", 1, "difference equation residual for the V-solution", run_eheq_sol1},
        {"ttr", 0, "three-term recurrence vs series evaluation", run_ttr},
        {"biorth", 1, "biorthogonality Gram matrix (k=l=0)", run_biorth},
        {"cn1-n2", 2, "C_2 type I integral", run_cn1_n2},
        {"cn2-selberg-n2", 2, "C_2 elliptic Selberg integral + recursion",
         run_cn2_selberg},
        {"an-odd-n1", 1, "A_1 beta integral (odd evaluation)",
         [](const RunConfig& c) { return run_an(c, 1, "an-odd-n1"); }},
        {"an-even-n2", 2, "A_2 beta integral (even evaluation)",
         [](const RunConfig& c) { return run_an(c, 2, "an-even-n2"); }},
        {"rains-n1", 1, "Rains transformation at n=1",
         [](const RunConfig& c) { return run_rains(c, 1, "rains-n1"); }},
        {"rains-n2", 2, "Rains transformation at n=2",
         [](const RunConfig& c) { return run_rains(c, 2, "rains-n2"); }},
        {"eft-beta", 1, "elliptic Fourier transform vs beta evaluation", run_eft},
        {"d-reflection", 0, "D-operator reflection", run_d_reflection},
        {"str", 1, "star-triangle operator relation", run_str},
        {"rec-int-m0", 1, "integral recursion at m=0", run_rec_int},
        {"sci-2-3", 1, "Seiberg duality (N,M)=(2,3)",
         [](const RunConfig& c) { return run_sci(c, 2, 3, "sci-2-3"); }},
        {"sci-2-4", 1, "Seiberg duality (N,M)=(2,4)",
         [](const RunConfig& c) { return run_sci(c, 2, 4, "sci-2-4"); }},
        {"sci-pleth", 0, "plethystic vs gamma-form integrand", run_sci_pleth},
        {"mod-gamma", 0, "modified gamma: product vs Bernoulli form", run_mod_gamma},
        {"mod-theta", 0, "theta modular transformation law", run_mod_theta},
    };
    return reg;
}

bool known_identity(const std::string& id) {
    for (const auto& r : identity_registry())
        if (r.id == id) return true;
    return id == "all" || id == "quick";
}

double default_tol(const std::string& id, int dim) {
    if (id.rfind("sci", 0) == 0) return 1e-8;
    if (dim == 0) return 1e-11;
    if (dim >= 2) return 1e-6;
    return 1e-9;
}

std::vector<IdentityReport> run_verify(const std::string& id_or_suite,
                                       const RunConfig& cfg) {
    std::vector<IdentityReport> all;
    bool matched = false;
    for (const auto& r : identity_registry()) {
        bool selected = (id_or_suite == r.id) ||
                        (id_or_suite == "all" && !(cfg.quick && r.dim > 1)) ||
                        (id_or_suite == "quick" && r.dim <= 1);
        if (!selected && (id_or_suite == "all" || id_or_suite == "quick")) matched = true;
        if (!selected) continue;
        matched = true;
        auto reports = r.run(cfg);
        all.insert(all.end(), reports.begin(), reports.end());
    }
    if (!matched) throw domain_error("run_verify: unknown identity '" + id_or_suite + "'");
    std::stable_sort(all.begin(), all.end(),
                     [](const IdentityReport& a, const IdentityReport& b) {
                         return a.identity_id < b.identity_id;
                     });
    return all;
}

}  // namespace ellhyp
