#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bdsvie/regression.hpp"

namespace bdsvie {

/// Step drivers of a single (non-Volterra) BDSDE. eval fills f_out (M x k)
/// with f(r_j, .) and g_out (M x k*l) with g(r_{j+1}, .), both evaluated at
/// the inner iterate (lam, mu) when the drivers depend on the solution.
struct BdsdeDrivers {
    std::function<void(int j, const Eigen::MatrixXd& lam, const Eigen::MatrixXd& mu,
                       Eigen::MatrixXd& f_out, Eigen::MatrixXd& g_out)>
        eval;
    bool depends_on_solution{false};
    int k{1};
    int l{1};
};

struct BdsdeConfig {
    int inner_iterations{2};   // predictor + corrections per step
    bool record_inner{false};  // keep per-step inner iterate distances
};

struct BdsdeSolution {
    int i0{0};
    int i1{0};
    std::vector<Eigen::MatrixXd> lambda;  // [i0..i1], M x k each
    std::vector<Eigen::MatrixXd> mu;      // [i0..i1-1], M x k*d each
    std::vector<int> inner_iterations_used;
    std::vector<std::vector<double>> inner_distances;  // filled when record_inner

    const Eigen::MatrixXd& lambda_at(int j) const {
        return lambda[static_cast<std::size_t>(j - i0)];
    }
    const Eigen::MatrixXd& mu_at(int j) const { return mu[static_cast<std::size_t>(j - i0)]; }
};

/// Regression dynamic programming for
///   lambda(r) = terminal + int_r^T f ds + int_r^T g dB - int_r^T mu dW
/// on the window [i0, i1]. One backward step solves
///   mu(r_j)     = E[ (lambda(r_{j+1}) + g * dB_j) dW_j^T | F_{t_j} ] / dt
///   lambda(r_j) = E[ A_{j+1} + f dt + g * dB_j | F_{t_j} ]
/// where A is the raw accumulated target (A_{i1} = terminal), f is taken at
/// the left endpoint and g at the right endpoint. Solution-dependent
/// drivers are handled by an explicit inner fixed point on (lambda, mu);
/// the iterate starts at (lambda(r_{j+1}), mu(r_{j+1})) and after the first
/// pass holds the step's own estimates. Fitting the accumulated target
/// rather than the previous fitted values keeps the driver-free case an
/// exact single projection of the terminal.
BdsdeSolution solve_bdsde(const BdsdeDrivers& drivers, const BrownianEnsemble& ens,
                          const RegressionContext& reg, int i0, int i1,
                          const Eigen::MatrixXd& terminal, const BdsdeConfig& config = {});

}  // namespace bdsvie
