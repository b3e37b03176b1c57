#ifndef ELLHYP_SCI_HPP
#define ELLHYP_SCI_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ellhyp/quadrature.hpp"
#include "ellhyp/report.hpp"
#include "ellhyp/types.hpp"

namespace ellhyp {

// exact rational charge; evaluated only at the final (pq)^r
struct Frac {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    Frac one_minus() const { return {den - num, den}; }
};

enum class RepKind { trivial, fundamental, antifundamental, adjoint, antisymmetric };

struct FlavorFactor {
    bool is_u1 = false;
    int K = 0;  // SU(K) when !is_u1
};

struct RepEntry {
    std::string name;
    RepKind gauge_rep = RepKind::trivial;
    std::vector<RepKind> flavor_reps;  // one per SU flavor factor
    Frac u1_charge{0, 1};
    Frac r2{0, 1};  // the table's 2 r_j
    bool is_vector = false;
};

struct TheorySpec {
    std::string name;
    int gauge_N = 0;  // SU(N)
    std::vector<FlavorFactor> flavors;
    std::vector<RepEntry> fields;
    int rank() const { return gauge_N - 1; }
};

// Line format:
//   group SU <N>            (exactly one)
//   flavor SU <K> | flavor U1   (repeatable, ordered)
//   field name=<id> gauge=<f|fbar|adj|asym|1> flavor=<tok,tok,..> u1=<a/b> r2=<a/b> [vector]
// '#' starts a comment. Throws domain_error listing all problems with line numbers.
TheorySpec parse_theory(const std::string& text);

// Weight vectors of the representation as integer exponents over the K torus
// variables (the SU constraint prod z = 1 is applied by the evaluators).
// Adjoint omits its zero weights: they are folded into the measure constant.
std::vector<std::vector<int>> rep_weights(RepKind kind, int K);

struct FlavorPoint {
    std::vector<std::vector<cd>> su;  // one list per SU factor; last entry renormalized
    cd u1{1.0, 0.0};
};

// normalizes prod = 1 per SU factor by rescaling the last entry
FlavorPoint make_flavor_point(const TheorySpec& spec, std::vector<std::vector<cd>> su,
                              cd u1);

// the one-particle states index at a gauge torus point z (N values, prod = 1)
cd single_letter_index(const TheorySpec& spec, cd p, cd q, std::span<const cd> z,
                       const FlavorPoint& y);

// chiral gamma factors over the measure denominators, evaluated at an
// arbitrary torus point (N gauge values with prod = 1)
cd sci_kernel_value(const TheorySpec& spec, const BasePair& pq, std::span<const cd> z,
                    const FlavorPoint& y);

// grid-tabulated kernel over the rank-(N-1) torus; the caller multiplies by
// ((p;p)(q;q))^{rank}/N!
TorusKernel integrand_gamma_form(const TheorySpec& spec, const BasePair& pq,
                                 const FlavorPoint& y);

// (exp sum_{n<=nmax} ind(p^n,..)/n , ((p;p)(q;q))^rank kernel / (Delta(z) Delta(1/z)))
std::pair<cd, cd> plethystic_probe(const TheorySpec& spec, const BasePair& pq,
                                   std::span<const cd> z, const FlavorPoint& y,
                                   int nmax);

QuadratureResult compute_index(const TheorySpec& spec, const BasePair& pq,
                               const FlavorPoint& y, double tol = 1e-10,
                               int max_nodes = 4096);

// electric/magnetic pair for SU(N) with M flavors; requires M > N >= 1
std::pair<TheorySpec, TheorySpec> seiberg_pair(int N, int M);

// flavour point: y.su = {SU(M)_l values, SU(M)_r values}, y.u1 on the circle
IdentityReport duality_check(int N, int M, const BasePair& pq, const FlavorPoint& y,
                             double tol = 1e-8, uint64_t seed = 0,
                             int max_nodes = 4096);

}  // namespace ellhyp

#endif
