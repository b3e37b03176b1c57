#ifndef ELLHYP_TYPES_HPP
#define ELLHYP_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellhyp {

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const cd kI{0.0, 1.0};

class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// A product factor (or gamma argument) landed on a pole/zero lattice.
// Carries the offending value and, when known, the lattice indices.
class singularity_error : public std::runtime_error {
public:
    singularity_error(const std::string& what, cd offending, long j = -1, long k = -1)
        : std::runtime_error(what), offending_(offending), j_(j), k_(k) {}
    cd offending() const { return offending_; }
    long lattice_j() const { return j_; }
    long lattice_k() const { return k_; }

private:
    cd offending_;
    long j_, k_;
};

// Bases (p,q) of all infinite products, plus the product-tail truncation
// threshold. (p;p)_inf and (q;q)_inf are cached eagerly; BasePair is a
// value type and safe to share across threads.
struct BasePair {
    cd p{0.0, 0.0};
    cd q{0.0, 0.0};
    double trunc_eps = 1e-17;
    cd pp_inf{1.0, 0.0};  // (p;p)_inf
    cd qq_inf{1.0, 0.0};  // (q;q)_inf

    BasePair() = default;
    BasePair(cd p_, cd q_, double trunc_eps_ = 1e-17);

    cd pq() const { return p * q; }
    BasePair swapped() const;  // (q,p), caches reused
};

// Quasi-periods (omega1, omega2, omega3) with the six derived bases.
// Incommensurability is asserted heuristically: no ratio is allowed to sit
// within 1e-9 of a fraction a/b with |a|,|b| <= 12.
struct OmegaTriple {
    cd w1, w2, w3;
    cd q, p, r;     // e^{2pi i w1/w2}, e^{2pi i w3/w2}, e^{2pi i w3/w1}
    cd qt, pt, rt;  // e^{-2pi i w2/w1}, e^{-2pi i w2/w3}, e^{-2pi i w1/w3}

    OmegaTriple(cd w1_, cd w2_, cd w3_);
    cd sum() const { return w1 + w2 + w3; }
};

inline bool is_nonneg_int(cd n) {
    return n.imag() == 0.0 && n.real() >= 0.0 && n.real() == std::floor(n.real()) &&
           n.real() < 1e9;
}

}  // namespace ellhyp

#endif
