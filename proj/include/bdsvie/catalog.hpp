#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bdsvie/paths.hpp"
#include "bdsvie/problem.hpp"

namespace bdsvie {

/// A named test problem; entries with a closed-form solution carry oracle
/// evaluators used by the verification harness.
struct CatalogEntry {
    std::string name;
    ProblemSpec spec;
    bool has_oracle{false};
    std::function<DiagonalProcess(const BrownianEnsemble&)> oracle_y;
    std::function<TriangularField(const BrownianEnsemble&)> oracle_z;
};

/// Entries:
///   martingale       f=0, g=0, xi=W_T;      Y(t)=W_t, Z=1
///   backward-driver  f=0, g=1, xi=0;        Y(t)=B_T-B_t, Z=0
///   linear-drift     f=-y, g=0, xi=W_T;     Y(t)=e^{-(T-t)}W_t, Z(t,s)=e^{-(T-s)}
///   kernel           f=t, g=0, xi=W_T;      Y(t)=W_t+t(T-t), Z=1
///   lipschitz-demo   f=0.5*sin(y1+z11), g=0.5*cos(y1)+0.5*z11, xi=sin(wT);
///                    no closed form, C=0.25, alpha=0.5
CatalogEntry catalog_problem(const std::string& name);

std::vector<std::string> catalog_names();

}  // namespace bdsvie
