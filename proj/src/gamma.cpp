#include "ellhyp/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ellhyp/special.hpp"

namespace ellhyp {

namespace {

// Looks for j,k >= 0 with z p^j q^k = 1 (within tol). Only finitely many
// lattice points can reach modulus 1/|z|.
bool find_pole_index(cd z, const BasePair& pq, long& j_out, long& k_out,
                     double tol = 1e-11) {
    double az = std::abs(z);
    if (az < 0.5) return false;  // |p^j q^k| <= 1, so |z| must be >= 1 - tol
    double ap = std::abs(pq.p), aq = std::abs(pq.q);
    long jmax = 0, kmax = 0;
    if (ap > 0.0) jmax = static_cast<long>(std::log((1.0 - tol) / az) / std::log(ap)) + 1;
    if (aq > 0.0) kmax = static_cast<long>(std::log((1.0 - tol) / az) / std::log(aq)) + 1;
    jmax = std::max<long>(jmax, 0);
    kmax = std::max<long>(kmax, 0);
    cd pj(1.0, 0.0);
    for (long j = 0; j <= jmax; ++j) {
        cd w = z * pj;
        cd qk(1.0, 0.0);
        for (long k = 0; k <= kmax; ++k) {
            if (std::abs(w * qk - 1.0) < tol) {
                j_out = j;
                k_out = k;
                return true;
            }
            if (std::abs(w * qk) < 1.0 - tol) break;
            qk *= pq.q;
        }
        if (std::abs(w) < 1.0 - tol) break;
        pj *= pq.p;
    }
    return false;
}

}  // namespace

cd elliptic_gamma(cd z, const BasePair& pq) {
    if (z == cd(0.0)) throw domain_error("elliptic_gamma: z must be nonzero");
    long j, k;
    if (find_pole_index(z, pq, j, k)) {
        std::ostringstream os;
        os << "elliptic_gamma: argument on pole lattice p^-" << j << " q^-" << k;
        throw singularity_error(os.str(), z, j, k);
    }
    const cd bases[2] = {pq.p, pq.q};
    return qpoch(pq.pq() / z, bases, pq.trunc_eps) / qpoch(z, bases, pq.trunc_eps);
}

cd elliptic_gamma_pole_limit(cd z0, const BasePair& pq) {
    long j, k;
    if (!find_pole_index(z0, pq, j, k, 1e-8))
        throw domain_error("elliptic_gamma_pole_limit: z0 is not on the pole lattice");
    const cd bases[2] = {pq.p, pq.q};
    const long skip[2] = {j, k};
    cd den = qpoch_skip(z0, bases, skip, pq.trunc_eps);
    return qpoch(pq.pq() / z0, bases, pq.trunc_eps) / den;
}

cd elliptic_gamma_t(cd z, cd p, cd q, cd t, double trunc_eps) {
    if (z == cd(0.0)) throw domain_error("elliptic_gamma_t: z must be nonzero");
    if (std::abs(p) >= 1.0 || std::abs(q) >= 1.0 || std::abs(t) >= 1.0)
        throw domain_error("elliptic_gamma_t: |p|,|q|,|t| must be < 1");
    const cd bases[3] = {t, p, q};
    return qpoch(z, bases, trunc_eps) * qpoch(t * p * q / z, bases, trunc_eps);
}

cd modified_gamma_G(cd u, const OmegaTriple& w, GMethod method, double trunc_eps) {
    const cd tp = 2.0 * kPi * kI;
    if (method == GMethod::product_form) {
        if (std::abs(w.p) >= 1.0 || std::abs(w.q) >= 1.0 || std::abs(w.qt) >= 1.0 ||
            std::abs(w.r) >= 1.0)
            throw domain_error("modified_gamma_G: product_form unavailable for this omega");
        BasePair pq(w.p, w.q, trunc_eps);
        BasePair qr(w.qt, w.r, trunc_eps);
        cd z1 = std::exp(tp * u / w.w2);
        cd z2 = w.r * std::exp(-tp * u / w.w1);
        return elliptic_gamma(z1, pq) * elliptic_gamma(z2, qr);
    }
    if (std::abs(w.rt) >= 1.0 || std::abs(w.pt) >= 1.0)
        throw domain_error("modified_gamma_G: bernoulli_form unavailable for this omega");
    BasePair rp(w.rt, w.pt, trunc_eps);
    cd z = std::exp(-tp * u / w.w3);
    cd b33 = bernoulli_poly(BernoulliKind::B33, u, w);
    return std::exp(-kPi * kI / 3.0 * b33) * elliptic_gamma(z, rp);
}

cd gamma_prod(std::initializer_list<cd> args, const BasePair& pq) {
    cd r(1.0, 0.0);
    for (cd a : args) r *= elliptic_gamma(a, pq);
    return r;
}

cd gamma_pm(cd a, cd z, const BasePair& pq) {
    return elliptic_gamma(a * z, pq) * elliptic_gamma(a / z, pq);
}

cd gamma_product(const GammaProductSpec& spec) {
    std::vector<cd> num, den;
    num.reserve(spec.numerator.size());
    den.reserve(spec.denominator.size());
    std::string problems;
    for (cd a : spec.numerator) {
        try {
            num.push_back(elliptic_gamma(a, spec.pq));
        } catch (const singularity_error& e) {
            problems += std::string(e.what()) + "; ";
        }
    }
    bool zero_from_den_pole = false;
    for (cd a : spec.denominator) {
        try {
            cd g = elliptic_gamma(a, spec.pq);
            if (g == cd(0.0)) {
                std::ostringstream os;
                os << "gamma_product: denominator argument on zero lattice (" << a.real()
                   << "," << a.imag() << ")";
                problems += os.str() + "; ";
            } else {
                den.push_back(g);
            }
        } catch (const singularity_error&) {
            zero_from_den_pole = true;  // Gamma(den) = inf, the ratio vanishes
        }
    }
    if (!problems.empty())
        throw singularity_error("gamma_product: " + problems, cd(0.0));
    if (zero_from_den_pole) return cd(0.0);

    auto bigger = [](cd a, cd b) {
        double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    };
    std::sort(num.begin(), num.end(), bigger);
    std::sort(den.begin(), den.end(), bigger);

    cd acc(1.0, 0.0);
    size_t i = 0, j = 0;
    while (i < num.size() || j < den.size()) {
        if (j == den.size() || (i < num.size() && std::abs(acc) <= 1.0)) {
            acc *= num[i++];
        } else {
            acc /= den[j++];
        }
    }
    return acc;
}

}  // namespace ellhyp
