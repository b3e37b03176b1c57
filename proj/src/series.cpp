#include "ellhyp/series.hpp"

#include <cmath>
#include <sstream>

#include "ellhyp/gamma.hpp"
#include "ellhyp/special.hpp"

namespace ellhyp {

namespace {

// Neumaier-compensated accumulation, separately on the parts.
struct CompensatedSum {
    double s[2] = {0.0, 0.0};
    double c[2] = {0.0, 0.0};
    void add(cd x) {
        const double parts[2] = {x.real(), x.imag()};
        for (int i = 0; i < 2; ++i) {
            double t = s[i] + parts[i];
            if (std::abs(s[i]) >= std::abs(parts[i]))
                c[i] += (s[i] - t) + parts[i];
            else
                c[i] += (parts[i] - t) + s[i];
            s[i] = t;
        }
    }
    cd value() const { return cd(s[0] + c[0], s[1] + c[1]); }
};

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

cd poch_ratio(std::span<const cd> num, std::span<const cd> den, long n,
              const BasePair& pq) {
    // interleave numerator/denominator Pochhammers to keep magnitudes tame
    cd r(1.0, 0.0);
    size_t i = 0, j = 0;
    while (i < num.size() || j < den.size()) {
        if (i < num.size()) r *= elliptic_pochhammer(num[i++], cd(double(n), 0.0), pq);
        if (j < den.size()) {
            cd d = elliptic_pochhammer(den[j], cd(double(n), 0.0), pq);
            if (d == cd(0.0)) {
                std::ostringstream os;
                os << "series: denominator Pochhammer vanished at n=" << n;
                throw singularity_error(os.str(), den[j], n);
            }
            r /= d;
            ++j;
        }
    }
    return r;
}

}  // namespace

SeriesSpec SeriesSpec::balanced(std::vector<cd> num, std::vector<cd> den_head, cd y,
                                const BasePair& pq, int term_index, int N, int M) {
    if (den_head.size() + 2 != num.size())
        throw domain_error("SeriesSpec: need s-1 denominator parameters for t_0..t_s");
    cd tp(1.0, 0.0);
    for (cd t : num) tp *= t;
    cd wp = pq.q;
    for (cd w : den_head) wp *= w;
    SeriesSpec spec;
    spec.num = std::move(num);
    spec.den = std::move(den_head);
    spec.den.push_back(tp / wp);  // prod t = q prod w
    spec.y = y;
    spec.pq = pq;
    spec.term_index = term_index;
    spec.N = N;
    spec.M = M;
    return spec;
}

static std::vector<cd> series_terms_E(const SeriesSpec& spec) {
    std::vector<cd> den_full;
    den_full.reserve(spec.den.size() + 1);
    den_full.push_back(spec.pq.q);
    den_full.insert(den_full.end(), spec.den.begin(), spec.den.end());
    std::vector<cd> terms;
    terms.reserve(spec.N + 1);
    cd yn(1.0, 0.0);
    for (long n = 0; n <= spec.N; ++n) {
        terms.push_back(poch_ratio(spec.num, den_full, n, spec.pq) * yn);
        yn *= spec.y;
    }
    return terms;
}

cd sum_series_E(const SeriesSpec& spec) {
    CompensatedSum acc;
    for (cd t : series_terms_E(spec)) acc.add(t);
    return acc.value();
}

std::vector<cd> series_terms_V(const VSeriesSpec& spec) {
    const long s = static_cast<long>(spec.t.size()) + 4;
    if (spec.check_balance) {
        cd prod(1.0, 0.0);
        for (cd t : spec.t) prod *= t;
        cd target = ipow(spec.t0, (s - 5) / 2) * ipow(spec.pq.q, (s - 7) / 2);
        cd r = prod / target;
        bool ok = (s % 2 == 1) ? std::abs(r - 1.0) < 1e-8
                               : std::min(std::abs(r - 1.0), std::abs(r + 1.0)) < 1e-8;
        if (!ok) throw domain_error("sum_series_V: balancing condition violated");
    }
    cd theta_t0 = theta(spec.t0, spec.pq.p, spec.pq.trunc_eps);
    std::vector<cd> terms;
    terms.reserve(spec.N + 1);
    cd qy = spec.pq.q * spec.y;
    cd qyn(1.0, 0.0);
    // the m-product includes m = 0: theta(t_0)_n / theta(q)_n
    std::vector<cd> num = {spec.t0};
    std::vector<cd> den = {spec.pq.q};
    for (cd tm : spec.t) {
        num.push_back(tm);
        den.push_back(spec.pq.q * spec.t0 / tm);
    }
    cd q2n(1.0, 0.0);  // q^{2n}
    for (long n = 0; n <= spec.N; ++n) {
        cd head = theta(spec.t0 * q2n, spec.pq.p, spec.pq.trunc_eps) / theta_t0;
        terms.push_back(head * poch_ratio(num, den, n, spec.pq) * qyn);
        qyn *= qy;
        q2n *= spec.pq.q * spec.pq.q;
    }
    return terms;
}

cd sum_series_V(const VSeriesSpec& spec) {
    CompensatedSum acc;
    for (cd t : series_terms_V(spec)) acc.add(t);
    return acc.value();
}

cd residue_term(const std::array<cd, 6>& t, int n, const BasePair& pq) {
    const cd t5 = t[5];
    cd head = theta(t5 * t5 * ipow(pq.q, 2 * n), pq.p, pq.trunc_eps) /
              theta(t5 * t5, pq.p, pq.trunc_eps);
    std::vector<cd> num, den;
    for (int m = 0; m <= 5; ++m) {
        num.push_back(t[m] * t5);
        den.push_back(pq.q * t5 / t[m]);
    }
    return head * poch_ratio(num, den, n, pq) * ipow(pq.q, n);
}

IdentityReport frenkel_turaev_check(const std::array<cd, 5>& t1to5, int N,
                                    const BasePair& pq, double tol, uint64_t seed,
                                    double* condition_out) {
    std::array<cd, 6> t;
    cd prod(1.0, 0.0);
    for (int m = 0; m < 5; ++m) {
        t[m + 1] = t1to5[m];
        prod *= t1to5[m];
    }
    t[0] = pq.q / prod;  // enforce prod_{m=0}^5 t_m = q

    CompensatedSum acc;
    double peak = 0.0;
    for (int n = 0; n <= N; ++n) {
        cd term = residue_term(t, n, pq);
        peak = std::max(peak, std::abs(term));
        acc.add(term);
    }
    cd lhs = acc.value();
    // ratio of the largest term to the sum: the cancellation severity, which
    // bounds the relative accuracy reachable in double precision
    if (condition_out) *condition_out = peak / std::max(std::abs(lhs), 1e-300);

    const cd q = pq.q, t5 = t[5];
    cd nN(double(N), 0.0);
    std::vector<cd> rn = {q * t5 * t5, q / (t[1] * t[2]), q / (t[1] * t[3]),
                          q / (t[2] * t[3])};
    std::vector<cd> rd = {q / (t[1] * t[2] * t[3] * t5), q * t5 / t[1], q * t5 / t[2],
                          q * t5 / t[3]};
    cd rhs = elliptic_pochhammer_prod(rn, nN, pq) / elliptic_pochhammer_prod(rd, nN, pq);

    return make_report("ft-sum", lhs, rhs, tol, seed);
}

EheqParams EheqParams::from_all(cd e1, cd e2, cd e3, cd e4, cd e5, cd e8,
                                const BasePair& pq) {
    EheqParams par;
    par.pq = pq;
    cd pq2 = pq.pq() * pq.pq();
    cd e7 = e8 / pq.q;
    cd e6 = pq2 / (e1 * e2 * e3 * e4 * e5 * e7 * e8);
    par.eps = {e1, e2, e3, e4, e5, e6, e7, e8};
    return par;
}

EheqParams EheqParams::for_index(cd e1, cd e2, cd e3, cd e6, cd e8, int n,
                                 const BasePair& pq) {
    EheqParams par;
    par.pq = pq;
    cd A = e1 * e2 * e3 * e6 * e8;
    cd e4 = pq.p * ipow(pq.q, n + 1) / e8;
    cd e5 = pq.p * ipow(pq.q, 2 - n) / A;
    par.eps = {e1, e2, e3, e4, e5, e6, e8 / pq.q, e8};
    return par;
}

EheqParams EheqParams::with_index(int n) const {
    return for_index(eps[0], eps[1], eps[2], eps[5], eps[7], n, pq);
}

cd EheqParams::potential(cd x) const {
    cd num(1.0, 0.0);
    for (const cd& e : eps) num *= theta(e * x, pq.p, pq.trunc_eps);
    cd den = theta(x * x, pq.p, pq.trunc_eps) *
             theta(pq.q * x * x, pq.p, pq.trunc_eps);
    if (den == cd(0.0))
        throw singularity_error("eheq potential: theta(x^2, q x^2) vanished", x);
    return num / den;
}

cd EheqParams::nu() const {
    cd r(1.0, 0.0);
    for (int k = 0; k < 6; ++k)
        r *= theta(eps[k] * eps[7] / pq.q, pq.p, pq.trunc_eps);
    return r;
}

namespace {

void check_termination(const EheqParams& par, int n) {
    cd expect = par.pq.p * ipow(par.pq.q, n + 1) / par.eps[7];
    if (std::abs(par.eps[3] / expect - 1.0) > 1e-8)
        throw domain_error("biorth series: eps_4 != p q^{n+1}/eps_8 for this n");
}

}  // namespace

cd biorth_R(cd x, int n, const EheqParams& par) {
    if (x == cd(0.0)) throw domain_error("biorth_R: x must be nonzero");
    check_termination(par, n);
    const auto& e = par.eps;
    const cd q = par.pq.q, p = par.pq.p;
    VSeriesSpec v;
    v.t0 = e[5] / e[7];
    v.t = {q / (e[0] * e[7]), q / (e[1] * e[7]), q / (e[2] * e[7]),
           q * p / (e[3] * e[7]), q * p / (e[4] * e[7]), e[5] * x, e[5] / x};
    v.pq = par.pq;
    v.N = n;
    return sum_series_V(v);
}

cd biorth_T(cd x, int n, const EheqParams& par) {
    if (x == cd(0.0)) throw domain_error("biorth_T: x must be nonzero");
    check_termination(par, n);
    const auto& e = par.eps;
    const cd q = par.pq.q, p = par.pq.p;
    const cd A = par.A();
    VSeriesSpec v;
    v.t0 = A * e[5] / q;
    v.t = {A / e[0], A / e[1], A / e[2], e[5] * x, e[5] / x,
           q * p / (e[3] * e[7]), q * p / (e[4] * e[7])};
    v.pq = par.pq;
    v.N = n;
    return sum_series_V(v);
}

cd TTRConfig::z_of(cd x, const EheqParams& par) const {
    const cd p = par.pq.p;
    cd den = theta_pm(x, eta, p, par.pq.trunc_eps);
    if (den == cd(0.0)) throw singularity_error("ttr z(x): theta(x eta^{+-}) vanished", x);
    return theta_pm(x, xi, p, par.pq.trunc_eps) / den;
}

cd TTRConfig::alpha(int n, const EheqParams& par) const {
    return z_of(ipow(par.pq.q, n) / par.eps[7], par);
}

cd TTRConfig::beta(int n, const EheqParams& par) const {
    return z_of(par.A() * ipow(par.pq.q, n - 1), par);
}

cd TTRConfig::rho(cd t, const EheqParams& par) const {
    const auto& e = par.eps;
    const cd q = par.pq.q, p = par.pq.p;
    const cd A = par.A();
    cd num = theta_prod({t, e[5] / (e[7] * t), q * e[5] / (e[7] * t),
                         q * t / (e[0] * e[1]), q * t / (e[1] * e[2]),
                         q * t / (e[0] * e[2])},
                        p, par.pq.trunc_eps) *
             theta_pm(q * q * t / A, eta, p, par.pq.trunc_eps);
    cd den = theta_prod({q * t * t * e[7] / A, q * q * t * t * e[7] / A}, p,
                        par.pq.trunc_eps);
    return num / den;
}

cd TTRConfig::delta(const EheqParams& par) const {
    const auto& e = par.eps;
    const cd q = par.pq.q, p = par.pq.p;
    return theta_prod({q * q * e[5] / par.A(), q / (e[0] * e[7]), q / (e[1] * e[7]),
                       q / (e[2] * e[7])},
                      p, par.pq.trunc_eps) *
           theta_pm(e[5], eta, p, par.pq.trunc_eps);
}

cd ttr_step(cd R_nm1, cd R_n, int n, cd x, const EheqParams& par, const TTRConfig& cfg) {
    const cd zx = cfg.z_of(x, par);
    const cd q = par.pq.q;
    cd lead = (zx - cfg.alpha(n + 1, par)) *
              cfg.rho(par.A() * ipow(q, n - 1) / par.eps[7], par);
    if (std::abs(lead) < 1e-280)
        throw singularity_error("ttr_step: vanishing leading coefficient", lead);
    cd mid = cfg.delta(par) * (zx - cfg.z_of(par.eps[5], par));
    cd back = (zx - cfg.beta(n - 1, par)) * cfg.rho(ipow(q, -n), par);
    return R_n - (back * (R_nm1 - R_n) + mid * R_n) / lead;
}

cd eheq_apply(const std::function<cd(cd)>& f, cd x, const EheqParams& par) {
    const cd q = par.pq.q;
    cd Ax = par.potential(x);
    cd Axi = par.potential(1.0 / x);
    return Ax * (f(q * x) - f(x)) + Axi * (f(x / q) - f(x)) + par.nu() * f(x);
}

}  // namespace ellhyp
