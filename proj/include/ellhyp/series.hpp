#ifndef ELLHYP_SERIES_HPP
#define ELLHYP_SERIES_HPP

#include <array>
#include <functional>
#include <vector>

#include "ellhyp/report.hpp"
#include "ellhyp/types.hpp"

namespace ellhyp {

// Terminating series sum_{n=0}^{N} theta(t_0..t_s)_n / theta(q,w_1..w_s)_n y^n.
// Termination comes from t_k = q^{-N} p^M for the recorded index k; the
// balancing prod t = q prod w is enforced by deriving the last denominator
// parameter in balanced().
struct SeriesSpec {
    std::vector<cd> num;  // t_0..t_s
    std::vector<cd> den;  // w_1..w_s
    cd y{1.0, 0.0};
    BasePair pq;
    int term_index = 0;  // which t_k carries the termination
    int N = 0;
    int M = 0;

    static SeriesSpec balanced(std::vector<cd> num, std::vector<cd> den_head, cd y,
                               const BasePair& pq, int term_index, int N, int M);
};

cd sum_series_E(const SeriesSpec& spec);

// Very-well-poised series
//   {s+1}V{s}(t0; t1..t{s-4}; q,p; y) =
//   sum_n theta(t0 q^{2n};p)/theta(t0;p) prod_m theta(t_m)_n/theta(q t0/t_m)_n (qy)^n,
// summed over n = 0..N. Balancing prod t_m = +t0^{(s-5)/2} q^{(s-7)/2}
// (odd s) is checked to 1e-8 unless check_balance is cleared.
struct VSeriesSpec {
    cd t0;
    std::vector<cd> t;  // t_1..t_{s-4}
    cd y{1.0, 0.0};
    BasePair pq;
    int N = 0;
    bool check_balance = true;
};

cd sum_series_V(const VSeriesSpec& spec);

// Individual terms (n = 0..N); the sums above add these with compensated
// summation in forward order.
std::vector<cd> series_terms_V(const VSeriesSpec& spec);

// Frenkel-Turaev: sum_{n=0}^N nu_n(t) against the closed theta-Pochhammer
// ratio. t_0 is derived from prod_{m=0}^5 t_m = q; the caller supplies the
// termination t_4 t_5 = q^{-N}.
// condition_out (optional) reports max_n |nu_n| / |sum|, the cancellation
// severity; draws above ~1e3 cannot reach 1e-11 in double precision and the
// seeded runners resample instead.
IdentityReport frenkel_turaev_check(const std::array<cd, 5>& t1to5, int N,
                                    const BasePair& pq, double tol = 1e-11,
                                    uint64_t seed = 0, double* condition_out = nullptr);

// nu_n of the residue expansion: theta(t5^2 q^{2n};p)/theta(t5^2;p) *
// prod_{m=0}^5 theta(t_m t_5)_n / theta(q t_5/t_m)_n * q^n.
cd residue_term(const std::array<cd, 6>& t0to5, int n, const BasePair& pq);

// Parameters of the elliptic hypergeometric equation: eps_1..eps_8 with
// prod eps = (pq)^2 and eps_7 = eps_8/q. The R_n/T_n family keeps
// eps_{1,2,3,6,8} fixed while eps_4(n) = p q^{n+1}/eps_8 and
// eps_5(n) = p q^{2-n}/A carry the termination; eps_4 eps_5 stays constant,
// so the balancing never drifts.
struct EheqParams {
    std::array<cd, 8> eps{};
    BasePair pq;

    // eps_6 derived from the rest; eps_7 = eps_8/q
    static EheqParams from_all(cd e1, cd e2, cd e3, cd e4, cd e5, cd e8,
                               const BasePair& pq);
    // eps_4, eps_5 derived for termination index n
    static EheqParams for_index(cd e1, cd e2, cd e3, cd e6, cd e8, int n,
                                const BasePair& pq);

    cd A() const { return eps[0] * eps[1] * eps[2] * eps[5] * eps[7]; }
    cd potential(cd x) const;  // A(x) of the equation
    cd nu() const;
    EheqParams with_index(int n) const;  // same free data, termination at n
};

// Terminating 12V11 solutions of the elliptic hypergeometric equation.
// biorth_R requires eps_4 = p q^{n+1}/eps_8 for the given n (use
// EheqParams::for_index/with_index).
cd biorth_R(cd x, int n, const EheqParams& params);
cd biorth_T(cd x, int n, const EheqParams& params);

// Gauge data of the three-term recurrence.
struct TTRConfig {
    cd xi, eta;

    cd z_of(cd x, const EheqParams& par) const;
    cd alpha(int n, const EheqParams& par) const;  // z(q^n/eps_8)
    cd beta(int n, const EheqParams& par) const;   // z(A q^{n-1})
    cd rho(cd t, const EheqParams& par) const;
    cd delta(const EheqParams& par) const;
};

// Solves the recurrence for R_{n+1} from (R_{n-1}, R_n) at the point x.
cd ttr_step(cd R_nm1, cd R_n, int n, cd x, const EheqParams& params,
            const TTRConfig& cfg);

// A(x)(f(qx)-f(x)) + A(1/x)(f(x/q)-f(x)) + nu f(x)
cd eheq_apply(const std::function<cd(cd)>& f, cd x, const EheqParams& params);

}  // namespace ellhyp

#endif
