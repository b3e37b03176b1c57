#ifndef ELLHYP_QUADRATURE_HPP
#define ELLHYP_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

#include "ellhyp/types.hpp"

namespace ellhyp {

struct QuadratureResult {
    cd value{0.0, 0.0};
    double err_estimate = 0.0;  // |value(N) - value(N/2)|
    int nodes_per_dim = 0;
    long long evaluations = 0;
    bool converged = false;
};

// Equispaced nodes exp(2 pi i k/N), k = 0..N-1. Doubling N keeps the old
// nodes at the even positions bit-for-bit.
struct Grid {
    int N = 0;
    std::vector<cd> nodes;
    explicit Grid(int n);
};

// A kernel on T^n addressed by grid indices. bind() is called once per
// refinement level; the returned evaluator maps a multi-index (one entry per
// dimension, each in [0,N)) to the integrand value. Kernels built from
// elliptic gamma factors tabulate them over the N roots of unity inside
// bind(), which makes product-grid evaluation cheap.
struct TorusKernel {
    int dim = 1;
    std::function<std::function<cd(std::span<const int>)>(const Grid&)> bind;
    std::vector<double> poles_inside;   // moduli of pole sequences inside T
    std::vector<double> poles_outside;  // moduli of pole sequences outside T
};

// Wraps a plain evaluator on complex points (no tabulation).
TorusKernel pointwise_kernel(int dim, std::function<cd(std::span<const cd>)> f,
                             std::vector<double> poles_inside = {},
                             std::vector<double> poles_outside = {});

// Product trapezoid rule for int_{T^n} f(z) prod dz_j/(2 pi i z_j): the
// 1/(2 pi i)^n measure is folded into the equal weights; identity-specific
// constants are applied by callers. N doubles from start_n until
// |value(N) - value(N/2)| <= tol*max(1,|value|) or N would exceed
// max_nodes_per_dim. Values from the previous level are reused at the even
// sub-grid; the reduction is a fixed pairwise tree over lexicographic index
// order, so results are bit-deterministic.
QuadratureResult torus_integrate(const TorusKernel& kernel, double tol,
                                 int max_nodes_per_dim, int start_n = 32);

// min(1 - max inside, min outside - 1)
double pole_clearance(std::span<const double> inside, std::span<const double> outside);

// identity evaluators refuse to integrate with less clearance than this
inline constexpr double kClearanceMargin = 0.05;

// Deterministic pairwise-tree sum (used internally; exposed for tests).
cd pairwise_sum(std::span<const cd> v);

}  // namespace ellhyp

#endif
