#include "ellhyp/special.hpp"

#include <algorithm>
#include <cmath>

#include "ellhyp/gamma.hpp"

namespace ellhyp {

namespace {

// Running product with power-of-two rescaling so that intermediate
// magnitudes never leave the representable range.
struct ScaledProduct {
    cd acc{1.0, 0.0};
    int exp2 = 0;

    void mul(cd f) {
        acc *= f;
        double m = std::abs(acc.real()) + std::abs(acc.imag());
        if (m > 0x1.0p500) {
            acc = cd(std::ldexp(acc.real(), -512), std::ldexp(acc.imag(), -512));
            exp2 += 512;
        } else if (m < 0x1.0p-500 && m > 0.0) {
            acc = cd(std::ldexp(acc.real(), 512), std::ldexp(acc.imag(), 512));
            exp2 -= 512;
        }
    }

    cd value() const {
        return cd(std::ldexp(acc.real(), exp2), std::ldexp(acc.imag(), exp2));
    }
};

bool factor_less(cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Enumerates all multi-indices with |idx| = d; for each included lattice
// point appends the factor (1 - z prod b^k) to out.
void collect_diagonal(cd z, std::span<const cd> bases,
                      const std::vector<std::vector<cd>>& pows,
                      const std::vector<std::vector<double>>& apows, int d,
                      double thr, double az, std::span<const long> skip,
                      std::vector<cd>& out) {
    const int nb = static_cast<int>(bases.size());
    std::vector<int> idx(nb, 0);
    auto handle = [&]() {
        double mag = az;
        for (int i = 0; i < nb; ++i) mag *= apows[i][idx[i]];
        if (mag <= thr) return;
        if (!skip.empty()) {
            bool same = true;
            for (int i = 0; i < nb; ++i)
                if (skip[i] != idx[i]) { same = false; break; }
            if (same) return;
        }
        cd w = z;
        for (int i = 0; i < nb; ++i) w *= pows[i][idx[i]];
        out.push_back(1.0 - w);
    };
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == nb - 1) {
            idx[pos] = rem;
            handle();
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            idx[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, d);
}

cd qpoch_impl(cd z, std::span<const cd> bases_in, double trunc_eps,
              std::span<const long> skip_in) {
    if (trunc_eps <= 0.0 || trunc_eps > 1e-6)
        throw domain_error("qpoch: trunc_eps must lie in (0, 1e-6]");
    // canonical base order makes the result independent of the list order
    std::vector<int> order(bases_in.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return factor_less(bases_in[a], bases_in[b]);
    });
    std::vector<cd> bases_sorted(bases_in.size());
    std::vector<long> skip_sorted(skip_in.size());
    for (size_t i = 0; i < order.size(); ++i) {
        bases_sorted[i] = bases_in[order[i]];
        if (!skip_in.empty()) skip_sorted[i] = skip_in[order[i]];
    }
    std::span<const cd> bases(bases_sorted);
    std::span<const long> skip(skip_sorted.data(), skip_in.size());

    double maxb = 0.0;
    for (cd b : bases) {
        double ab = std::abs(b);
        if (ab >= 1.0) throw domain_error("qpoch: base modulus must be < 1");
        maxb = std::max(maxb, ab);
    }
    const double az = std::abs(z);
    const double thr = trunc_eps * (1.0 - maxb);
    if (az <= thr) return cd(1.0, 0.0);
    if (bases.empty()) return cd(1.0, 0.0) - z;

    const int nb = static_cast<int>(bases.size());
    // d_max: smallest d with az * maxb^d <= thr
    int dmax = 0;
    if (maxb > 0.0) {
        double t = std::log(thr / az) / std::log(maxb);
        dmax = (t < 0) ? 0 : static_cast<int>(t) + 1;
    }
    std::vector<std::vector<cd>> pows(nb);
    std::vector<std::vector<double>> apows(nb);
    for (int i = 0; i < nb; ++i) {
        pows[i].resize(dmax + 2);
        apows[i].resize(dmax + 2);
        pows[i][0] = cd(1.0, 0.0);
        apows[i][0] = 1.0;
        for (int k = 1; k <= dmax + 1; ++k) {
            pows[i][k] = pows[i][k - 1] * bases[i];
            apows[i][k] = apows[i][k - 1] * std::abs(bases[i]);
        }
    }

    ScaledProduct prod;
    std::vector<cd> diag;
    for (int d = 0; d <= dmax; ++d) {
        if (az * std::pow(maxb, d) <= thr) break;
        diag.clear();
        collect_diagonal(z, bases, pows, apows, d, thr, az, skip, diag);
        std::sort(diag.begin(), diag.end(), factor_less);
        for (cd f : diag) prod.mul(f);
        if (d == dmax) break;
    }
    return prod.value();
}

}  // namespace

cd qpoch(cd z, std::span<const cd> bases, double trunc_eps) {
    return qpoch_impl(z, bases, trunc_eps, {});
}

cd qpoch(cd z, std::initializer_list<cd> bases, double trunc_eps) {
    return qpoch_impl(z, std::span<const cd>(bases.begin(), bases.size()), trunc_eps, {});
}

cd qpoch_skip(cd z, std::span<const cd> bases, std::span<const long> skip_index,
              double trunc_eps) {
    return qpoch_impl(z, bases, trunc_eps, skip_index);
}

cd theta(cd z, cd p, double trunc_eps) {
    if (z == cd(0.0, 0.0)) throw domain_error("theta: z must be nonzero");
    if (std::abs(p) >= 1.0) throw domain_error("theta: |p| must be < 1");
    const cd bases[1] = {p};
    return qpoch(z, bases, trunc_eps) * qpoch(p / z, bases, trunc_eps);
}

cd theta_prod(std::initializer_list<cd> args, cd p, double trunc_eps) {
    cd r(1.0, 0.0);
    for (cd a : args) r *= theta(a, p, trunc_eps);
    return r;
}

cd theta_pm(cd a, cd t, cd p, double trunc_eps) {
    return theta(a * t, p, trunc_eps) * theta(a / t, p, trunc_eps);
}

cd elliptic_pochhammer(cd t, cd n, const BasePair& pq) {
    if (is_nonneg_int(n) && n.real() <= 8.0) {
        long m = static_cast<long>(n.real());
        cd r(1.0, 0.0);
        cd tq = t;
        for (long j = 0; j < m; ++j) {
            r *= theta(tq, pq.p, pq.trunc_eps);
            tq *= pq.q;
        }
        return r;
    }
    // gamma-ratio continuation, principal branch of q^n
    cd qn = std::exp(n * std::log(pq.q));
    return elliptic_gamma(t * qn, pq) / elliptic_gamma(t, pq);
}

cd elliptic_pochhammer_prod(std::span<const cd> ts, cd n, const BasePair& pq) {
    cd r(1.0, 0.0);
    for (cd t : ts) r *= elliptic_pochhammer(t, n, pq);
    return r;
}

double riemann_residual(cd x, cd y, cd w, cd z, cd p) {
    if (x == cd(0.0) || y == cd(0.0) || w == cd(0.0) || z == cd(0.0))
        throw domain_error("riemann_residual: arguments must be nonzero");
    cd a = theta_pm(x, w, p) * theta_pm(y, z, p);
    cd b = theta_pm(x, z, p) * theta_pm(y, w, p);
    cd c = (y / w) * theta_pm(x, y, p) * theta_pm(w, z, p);
    return std::abs(a - b - c);
}

cd bernoulli_poly(BernoulliKind kind, cd u, const OmegaTriple& w) {
    if (w.w1 == cd(0.0) || w.w2 == cd(0.0))
        throw domain_error("bernoulli_poly: zero quasi-period");
    if (kind == BernoulliKind::B22) {
        return u * u / (w.w1 * w.w2) - u / w.w1 - u / w.w2 + w.w1 / (6.0 * w.w2) +
               w.w2 / (6.0 * w.w1) + 0.5;
    }
    if (w.w3 == cd(0.0)) throw domain_error("bernoulli_poly: zero quasi-period");
    cd s = 0.5 * w.sum();
    cd v = u - s;
    cd sq = 0.25 * (w.w1 * w.w1 + w.w2 * w.w2 + w.w3 * w.w3);
    return v * (v * v - sq) / (w.w1 * w.w2 * w.w3);
}

BasePair::BasePair(cd p_, cd q_, double trunc_eps_) : p(p_), q(q_), trunc_eps(trunc_eps_) {
    if (std::abs(p) >= 1.0 || std::abs(q) >= 1.0)
        throw domain_error("BasePair: |p| and |q| must be < 1");
    if (trunc_eps <= 0.0 || trunc_eps > 1e-6)
        throw domain_error("BasePair: trunc_eps must lie in (0, 1e-6]");
    const cd bp[1] = {p}, bq[1] = {q};
    pp_inf = qpoch(p, bp, trunc_eps);
    qq_inf = qpoch(q, bq, trunc_eps);
}

BasePair BasePair::swapped() const {
    BasePair r;
    r.p = q;
    r.q = p;
    r.trunc_eps = trunc_eps;
    r.pp_inf = qq_inf;
    r.qq_inf = pp_inf;
    return r;
}

namespace {
bool near_small_fraction(cd ratio, int bound, double tol) {
    if (std::abs(ratio.imag()) > tol) return false;
    double x = ratio.real();
    for (int b = 1; b <= bound; ++b)
        for (int a = -bound; a <= bound; ++a)
            if (std::abs(x - static_cast<double>(a) / b) < tol) return true;
    return false;
}
}  // namespace

OmegaTriple::OmegaTriple(cd w1_, cd w2_, cd w3_) : w1(w1_), w2(w2_), w3(w3_) {
    if (w1 == cd(0.0) || w2 == cd(0.0) || w3 == cd(0.0))
        throw domain_error("OmegaTriple: quasi-periods must be nonzero");
    if (near_small_fraction(w1 / w2, 12, 1e-9) || near_small_fraction(w3 / w2, 12, 1e-9) ||
        near_small_fraction(w3 / w1, 12, 1e-9))
        throw domain_error("OmegaTriple: quasi-periods look commensurate");
    const cd tp = 2.0 * kPi * kI;
    q = std::exp(tp * (w1 / w2));
    p = std::exp(tp * (w3 / w2));
    r = std::exp(tp * (w3 / w1));
    qt = std::exp(-tp * (w2 / w1));
    pt = std::exp(-tp * (w2 / w3));
    rt = std::exp(-tp * (w1 / w3));
}

}  // namespace ellhyp
