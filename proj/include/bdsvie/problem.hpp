#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "bdsvie/brownian_ensemble.hpp"

namespace bdsvie {

/// Vectorised coefficient: given (t, s) and per-path blocks y (M x k) and
/// z (M x k*d), fills `out` with f values (M x k) or g values (M x k*l,
/// column q = a*l + b).
using CoefficientFn =
    std::function<void(double t, double s, const Eigen::Ref<const Eigen::MatrixXd>& y,
                       const Eigen::Ref<const Eigen::MatrixXd>& z, Eigen::MatrixXd& out)>;

/// Terminal functional of the W-path, evaluated per path (M x k).
using TerminalFn = std::function<Eigen::MatrixXd(const BrownianEnsemble& ens)>;

/// Full problem statement: dimensions, coefficients f and g, terminal
/// functional xi, horizon, and the user-supplied Lipschitz metadata used by
/// the contraction certificate. `lip_c` is the squared-sense constant
/// (|df|^2 <= C(|dy|^2 + ||dz||^2)); `alpha` the z-coefficient of g's bound.
struct ProblemSpec {
    std::string name;
    int k{1};
    int d{1};
    int l{1};
    double T{1.0};
    double lip_c{0.0};
    double alpha{0.5};
    CoefficientFn f;
    CoefficientFn g;
    TerminalFn xi;
    bool f_depends_on_yz{false};
    bool g_depends_on_yz{false};

    bool drivers_depend_on_solution() const { return f_depends_on_yz || g_depends_on_yz; }

    /// Throws std::invalid_argument on bad dimensions, alpha outside (0,1),
    /// negative C, or coefficients that are non-finite at (t, s, 0, 0).
    void validate() const;
};

}  // namespace bdsvie
