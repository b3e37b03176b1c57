#include "ellhyp/quadrature.hpp"

#include <cmath>

namespace ellhyp {

Grid::Grid(int n) : N(n), nodes(n) {
    for (int k = 0; k < n; ++k) nodes[k] = std::polar(1.0, (2.0 * kPi * k) / n);
}

TorusKernel pointwise_kernel(int dim, std::function<cd(std::span<const cd>)> f,
                             std::vector<double> poles_inside,
                             std::vector<double> poles_outside) {
    TorusKernel k;
    k.dim = dim;
    k.poles_inside = std::move(poles_inside);
    k.poles_outside = std::move(poles_outside);
    k.bind = [dim, f = std::move(f)](const Grid& g) {
        return [dim, &g, f](std::span<const int> idx) {
            cd zs[3];
            for (int i = 0; i < dim; ++i) zs[i] = g.nodes[idx[i]];
            return f(std::span<const cd>(zs, static_cast<size_t>(dim)));
        };
    };
    return k;
}

cd pairwise_sum(std::span<const cd> v) {
    if (v.size() <= 8) {
        cd s(0.0, 0.0);
        for (cd x : v) s += x;
        return s;
    }
    size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

QuadratureResult torus_integrate(const TorusKernel& kernel, double tol,
                                 int max_nodes_per_dim, int start_n) {
    if (tol <= 0.0) throw domain_error("torus_integrate: tol must be positive");
    if (kernel.dim < 1 || kernel.dim > 3)
        throw domain_error("torus_integrate: dimension must be 1..3");

    QuadratureResult res;
    std::vector<cd> prev_vals;
    cd prev_value(0.0, 0.0);
    bool have_prev = false;

    for (int N = start_n; N <= max_nodes_per_dim; N *= 2) {
        Grid grid(N);
        auto eval = kernel.bind(grid);
        const int dim = kernel.dim;
        size_t total = 1;
        for (int d = 0; d < dim; ++d) total *= static_cast<size_t>(N);

        std::vector<cd> vals(total);
        int idx[3] = {0, 0, 0};
        for (size_t flat = 0; flat < total; ++flat) {
            // lexicographic decode
            size_t f = flat;
            for (int d = dim - 1; d >= 0; --d) {
                idx[d] = static_cast<int>(f % N);
                f /= N;
            }
            bool all_even = have_prev;
            for (int d = 0; d < dim && all_even; ++d) all_even = (idx[d] % 2) == 0;
            if (all_even) {
                size_t pf = 0;
                for (int d = 0; d < dim; ++d) pf = pf * (N / 2) + idx[d] / 2;
                vals[flat] = prev_vals[pf];
            } else {
                vals[flat] = eval(std::span<const int>(idx, static_cast<size_t>(dim)));
                ++res.evaluations;
            }
        }

        cd value = pairwise_sum(vals) / static_cast<double>(total);
        res.nodes_per_dim = N;
        if (have_prev) {
            res.err_estimate = std::abs(value - prev_value);
            res.value = value;
            if (res.err_estimate <= tol * std::max(1.0, std::abs(value))) {
                res.converged = true;
                return res;
            }
        } else {
            res.value = value;
            res.err_estimate = std::abs(value);
        }
        prev_value = value;
        prev_vals = std::move(vals);
        have_prev = true;
    }
    res.converged = false;  // reported, never silent
    return res;
}

double pole_clearance(std::span<const double> inside, std::span<const double> outside) {
    if (inside.empty() || outside.empty())
        throw domain_error("pole_clearance: lists must be nonempty");
    double mi = 0.0, mo = 1e300;
    for (double r : inside) mi = std::max(mi, r);
    for (double r : outside) mo = std::min(mo, r);
    return std::min(1.0 - mi, mo - 1.0);
}

}  // namespace ellhyp
