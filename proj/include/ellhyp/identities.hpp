#ifndef ELLHYP_IDENTITIES_HPP
#define ELLHYP_IDENTITIES_HPP

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ellhyp/quadrature.hpp"
#include "ellhyp/report.hpp"
#include "ellhyp/series.hpp"
#include "ellhyp/types.hpp"

namespace ellhyp {

// Parameters of a balanced integral: prod t = (pq)^m, the last entry derived.
struct BalancedParams {
    std::vector<cd> t;
    int m = 1;
    BasePair pq;

    static BalancedParams derive_last(std::vector<cd> head, int m, const BasePair& pq);
};

enum class Side { lhs, rhs };
enum class E7Which { reflection_A, duality_B, inversion_C };

struct TransformResult {
    BalancedParams new_params;
    cd prefactor{1.0, 0.0};  // V(t) = prefactor * V(new_params)
    E7Which which = E7Which::reflection_A;
};

// kappa_n (2 pi i)^n = ((p;p)(q;q))^n / (2^n n!): the factor callers apply to
// measure-pure torus integrals of C_n-type kernels.
cd kappa_scale(int n, const BasePair& pq);

// 1-variable kernel prod_a Gamma(a z^{+-};p,q) / (Gamma(z^{+-2}) prod_b Gamma(b z^{+-})),
// gamma factors tabulated over the grid nodes per refinement level.
TorusKernel beta_like_kernel(std::vector<cd> num, std::vector<cd> den,
                             const BasePair& pq);

// V(t_1..t_8) = kappa int prod Gamma(t_j z^{+-})/Gamma(z^{+-2}) dz/z
cd v_value(std::span<const cd> t, const BasePair& pq, double tol = 1e-11,
           int max_nodes = 4096, QuadratureResult* info = nullptr);

// --- univariate identities -------------------------------------------------

cd beta_integral(Side side, const BalancedParams& params, double tol = 1e-11,
                 int max_nodes = 4096, QuadratureResult* info = nullptr);

// kappa int_C = kappa int_T + c_0 sum_{|t5 q^n|>1} nu_n, with int_C replaced
// by the exact product (the analytic continuation of the beta integral).
// Preconditions: |t_m|<1 (m<=4), |p t5| < 1 < |t5|, |pq| < |A|.
IdentityReport residue_expansion(const std::array<cd, 5>& t, int n_max,
                                 const BasePair& pq, double tol = 1e-8,
                                 uint64_t seed = 0, int max_nodes = 4096);

cd v_eval(const BalancedParams& params, double tol = 1e-11, int max_nodes = 4096,
          QuadratureResult* info = nullptr);

TransformResult e7_apply(const BalancedParams& params, E7Which which);

// t7 theta(t8 t7^{+-}/q;p) V(q t6, t8/q) - (t6<->t7) - t7 theta(t6 t7^{+-};p) V(t);
// scale_out receives the magnitude of the largest term.
cd contiguous_residual(const BalancedParams& params, double tol = 1e-11,
                       int max_nodes = 4096, double* scale_out = nullptr);

// Same relation applied to the integrand at a fixed z (no quadrature).
cd contiguous_residual_kernel(const BalancedParams& params, cd z,
                              double* scale_out = nullptr);

// f_1(x): the V-function solution of the elliptic hypergeometric equation.
// c must satisfy c^2 = eps_6 eps_8 / p^4 (callers pick the branch).
cd eheq_sol1(cd x, const EheqParams& params, cd c, double tol = 1e-11,
             int max_nodes = 4096);

// --- root systems ------------------------------------------------------------

cd cn_type1(Side side, std::span<const cd> t, int n, const BasePair& pq,
            double tol = 1e-9, int max_nodes = 512, QuadratureResult* info = nullptr);

cd cn_type2_selberg(Side side, cd t, std::span<const cd> t6, int n,
                    const BasePair& pq, double tol = 1e-9, int max_nodes = 512,
                    QuadratureResult* info = nullptr);

// One step of the dimensional recursion:
// I_n(t,t_1..t_5) = Gamma(t^n)/Gamma(t) prod_{0<=r<s<=5} Gamma(t_r t_s)
//                   * I_{n-1}(t, t^{1/2} t_1,.., t^{1/2} t_5),
// with t_0 = pq/(t^{n-1} prod_{r=1}^5 t_r). Returns (lhs, rhs) of the step.
std::pair<cd, cd> selberg_recursion_step(cd t, std::span<const cd> t5, int n,
                                         const BasePair& pq, double tol = 1e-9,
                                         int max_nodes = 512);

cd an_beta(Side side, const std::array<cd, 3>& tpar, const std::array<cd, 3>& spar,
           cd t, cd s, int n, const BasePair& pq, double tol = 1e-9,
           int max_nodes = 512, QuadratureResult* info = nullptr);

// I_n(t_1..t_8;t) with the Gamma(.;p,q,t) prefactor included.
cd rains_value(std::span<const cd> t8, cd t, int n, const BasePair& pq,
               double tol = 1e-9, int max_nodes = 512, QuadratureResult* info = nullptr);

IdentityReport rains_transform(const std::array<cd, 8>& t8, cd t, int n,
                               const BasePair& pq, double tol = 1e-5,
                               uint64_t seed = 0, int max_nodes = 512,
                               bool principal_branch = true);

// --- Bailey machinery --------------------------------------------------------

// M(t)_{wz} alpha: kappa int Gamma(t w^{+-} z^{+-})/Gamma(t^2, z^{+-2}) alpha(z) dz/z
cd bailey_M(cd t, const std::function<cd(cd)>& alpha, cd w, const BasePair& pq,
            double tol = 1e-11, int max_nodes = 4096, QuadratureResult* info = nullptr);

// D(t;y,w) = Gamma(sqrt(pq) t^{-1} y^{+-} w^{+-})
cd bailey_D(cd t, cd y, cd w, const BasePair& pq);

// Both sides of M(s) D(st;y,.) M(t) f = D(t;y,.) M(st) D(s;y,.) f at the
// probe w; returns lhs - rhs, with the common magnitude in scale_out.
cd star_triangle_residual(cd s, cd t, cd y, const std::function<cd(cd)>& testfn,
                          cd w, const BasePair& pq, double tol = 1e-9,
                          int max_nodes = 256, double* scale_out = nullptr);

// Recurrence I^(m+1) from I^(m) (m = 0 only): the w-integral form with the
// exact product substituted for I^(0). Returns a report comparing it with
// the directly integrated V-function.
IdentityReport recursion_Im(int m, const std::array<cd, 8>& t8, const BasePair& pq,
                            double tol = 1e-8, uint64_t seed = 0, int max_nodes = 4096);

// --- biorthogonality (k = l = 0) ----------------------------------------------

struct GramResult {
    std::vector<std::vector<cd>> G;  // kappa int T_n R_m weight dx/x
    std::vector<cd> h;               // predicted diagonal h_{n0}
    int nodes = 0;
};

GramResult biorth_gram(const EheqParams& free_params, int nmax, double tol = 1e-10,
                       int max_nodes = 2048);

// --- exact parameter-map algebra for the E7 composition law -------------------

struct Rational {
    long long n = 0, d = 1;
    Rational() = default;
    Rational(long long n_, long long d_ = 1);
    Rational operator+(Rational o) const;
    Rational operator-(Rational o) const;
    Rational half() const;
    bool operator==(const Rational& o) const { return n == o.n && d == o.d; }
    bool operator<(const Rational& o) const;
};

// (pq)^{g} prod t_j^{e_j} with exact rational exponents, compared modulo the
// balancing relation prod t_j = (pq)^2.
struct Monomial {
    Rational g;
    std::array<Rational, 8> e{};
    Monomial normalized() const;  // g-exponent folded into the t-exponents
    bool operator==(const Monomial& o) const;
    bool operator<(const Monomial& o) const;
};

struct SymbolicMap {
    std::array<Monomial, 8> out;
    std::vector<Monomial> gammas;  // prefactor Gamma arguments
};

SymbolicMap symbolic_identity();
// Reflection that divides the four listed positions by rho and multiplies the
// others; prefactor pairs come from both quartets.
SymbolicMap symbolic_reflection(const SymbolicMap& in, const std::array<int, 4>& quartet);
SymbolicMap symbolic_duality(const SymbolicMap& in);
// Relabels the underlying free variables.
SymbolicMap symbolic_relabel(const SymbolicMap& in, const std::array<int, 8>& perm);

// Cancels reflection pairs Gamma(x)Gamma(pq/x) and compares maps: output
// multisets and surviving prefactors must match exactly.
bool symbolic_maps_equal(const SymbolicMap& a, const SymbolicMap& b);

// reflection_A at {1,2,3,4}, then at {3,4,5,6}, then t3,t4 <-> t5,t6
// relabeling reproduces duality_B. Exact rational arithmetic throughout.
bool duality_composition_law_holds();

}  // namespace ellhyp

#endif
