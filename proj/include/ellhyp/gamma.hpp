#ifndef ELLHYP_GAMMA_HPP
#define ELLHYP_GAMMA_HPP

#include <span>
#include <vector>

#include "ellhyp/types.hpp"

namespace ellhyp {

// Standard elliptic gamma function
//   Gamma(z;p,q) = (pq/z; p,q)_inf / (z; p,q)_inf.
// Arguments on the pole lattice {p^{-j} q^{-k}, j,k >= 0} raise
// singularity_error carrying the lattice indices.
cd elliptic_gamma(cd z, const BasePair& pq);

// lim_{z->z0} (1 - z/z0) Gamma(z;p,q) for z0 on the pole lattice.
// At z0 = 1 this equals 1/((p;p)_inf (q;q)_inf).
cd elliptic_gamma_pole_limit(cd z0, const BasePair& pq);

// Higher-level gamma: Gamma(z;p,q,t) =
//   prod_{j,k,l>=0} (1 - z t^j p^k q^l)(1 - z^{-1} t^{j+1} p^{k+1} q^{l+1}),
// an entire function of z on C^*; symmetric under z -> tpq/z.
cd elliptic_gamma_t(cd z, cd p, cd q, cd t, double trunc_eps = 1e-17);

enum class GMethod { product_form, bernoulli_form };

// Modified elliptic gamma function G(u;w).
//   product_form:   Gamma(e^{2pi i u/w2};p,q) Gamma(r e^{-2pi i u/w1}; qt, r)
//   bernoulli_form: e^{-pi i B_{3,3}(u;w)/3} Gamma(e^{-2pi i u/w3}; rt, pt)
// Each form requires its derived bases to have modulus < 1; otherwise a
// domain_error("method unavailable") is thrown. The two forms agree (one of
// the SL(3,Z) modular laws).
cd modified_gamma_G(cd u, const OmegaTriple& w, GMethod method,
                    double trunc_eps = 1e-17);

// Convenience products
cd gamma_prod(std::initializer_list<cd> args, const BasePair& pq);
// Gamma(a z;p,q) Gamma(a/z;p,q)
cd gamma_pm(cd a, cd z, const BasePair& pq);

struct GammaProductSpec {
    std::vector<cd> numerator;
    std::vector<cd> denominator;
    BasePair pq;
};

// prod Gamma(numerator) / prod Gamma(denominator), multiplied in an
// interleaved large/small order so intermediates stay near unit magnitude.
// Numerator poles and denominator zero-lattice hits are reported together.
cd gamma_product(const GammaProductSpec& spec);

}  // namespace ellhyp

#endif
