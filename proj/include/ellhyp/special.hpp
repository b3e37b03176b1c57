#ifndef ELLHYP_SPECIAL_HPP
#define ELLHYP_SPECIAL_HPP

#include <span>
#include <vector>

#include "ellhyp/types.hpp"

namespace ellhyp {

// Truncated multi-base q-Pochhammer product
//   (z; b_1,...,b_m)_inf = prod_{k_1..k_m >= 0} (1 - z b_1^{k_1}...b_m^{k_m}).
// Lattice points with |z| prod|b|^k <= trunc_eps*(1-max|b|) are dropped; the
// omitted tail is below trunc_eps in log-magnitude. Factors on each lattice
// diagonal are multiplied in a canonical value order, so the result is
// bit-identical under permutations of the base list.
cd qpoch(cd z, std::span<const cd> bases, double trunc_eps = 1e-17);
cd qpoch(cd z, std::initializer_list<cd> bases, double trunc_eps = 1e-17);

// Same product with one lattice point excluded (used by pole limits).
cd qpoch_skip(cd z, std::span<const cd> bases, std::span<const long> skip_index,
              double trunc_eps = 1e-17);

// theta(z;p) = (z;p)_inf (p/z;p)_inf, z != 0
cd theta(cd z, cd p, double trunc_eps = 1e-17);

// theta(a_1,...,a_k;p) = prod theta(a_i;p)
cd theta_prod(std::initializer_list<cd> args, cd p, double trunc_eps = 1e-17);

// theta(a t^{+1};p) theta(a t^{-1};p)
cd theta_pm(cd a, cd t, cd p, double trunc_eps = 1e-17);

struct BasePairRef;  // fwd not needed; BasePair in types

// Elliptic Pochhammer symbol theta(t)_n = prod_{j=0}^{n-1} theta(t q^j; p).
// For non-integer (or large/negative) n this is continued as
// Gamma(t q^n;p,q)/Gamma(t;p,q) with the principal branch of q^n.
cd elliptic_pochhammer(cd t, cd n, const BasePair& pq);

// prod over a list: theta(t_1,...,t_k)_n
cd elliptic_pochhammer_prod(std::span<const cd> ts, cd n, const BasePair& pq);

// Magnitude of the defect of the Riemann relation
//   theta(x w^{±}, y z^{±};p) - theta(x z^{±}, y w^{±};p) - (y/w) theta(x y^{±}, w z^{±};p).
double riemann_residual(cd x, cd y, cd w, cd z, cd p);

enum class BernoulliKind { B22, B33 };

// B_{2,2}(u;w) = u^2/(w1 w2) - u/w1 - u/w2 + w1/(6 w2) + w2/(6 w1) + 1/2.
// B_{3,3} is fixed by B_{3,3}(u + (w1+w2+w3)/2; w) = u(u^2 - (w1^2+w2^2+w3^2)/4)/(w1 w2 w3).
cd bernoulli_poly(BernoulliKind kind, cd u, const OmegaTriple& w);

}  // namespace ellhyp

#endif
