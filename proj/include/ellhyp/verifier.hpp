#ifndef ELLHYP_VERIFIER_HPP
#define ELLHYP_VERIFIER_HPP

#include <functional>
#include <string>
#include <vector>

#include "ellhyp/report.hpp"
#include "ellhyp/rng.hpp"
#include "ellhyp/types.hpp"

namespace ellhyp {

struct IdentityRunner {
    std::string id;
    int dim = 1;  // max quadrature dimension; 0 = products/series only
    std::string description;
    std::function<std::vector<IdentityReport>(const RunConfig&)> run;
};

const std::vector<IdentityRunner>& identity_registry();

// id, "all", or "quick" (dimension <= 1). Reports come back sorted by
// identity_id; with a fixed seed the values are bit-reproducible.
std::vector<IdentityReport> run_verify(const std::string& id_or_suite,
                                       const RunConfig& cfg);

bool known_identity(const std::string& id);

// per-class default tolerance: products/series 1e-11, 1-dim integrals 1e-9,
// 2-dim 1e-6, sci 1e-8
double default_tol(const std::string& id, int dim);

}  // namespace ellhyp

#endif
