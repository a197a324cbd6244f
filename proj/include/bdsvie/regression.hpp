#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bdsvie/brownian_ensemble.hpp"

namespace bdsvie {

/// Feature count for monomials of total degree <= p in d+l variables.
int basis_feature_count(int dim_w, int dim_b, int degree);

/// M x n_features matrix of all monomials of total degree <= p in the d+l
/// scalars (W_{t_i} coordinates, (B_T - B_{t_i}) coordinates), constant term
/// first, W block before B block within each degree. These are exactly the
/// F_{t_i}-measurable features: W up to t_i and B increments after t_i.
/// At i = N the B block is identically zero.
Eigen::MatrixXd build_basis(const BrownianEnsemble& ens, int i, int degree);

struct ConditionalEstimate {
    Eigen::MatrixXd coefficients;        // n_features x n_targets
    Eigen::MatrixXd predictions;         // M x n_targets
    double residual_second_moment{0.0};  // mean over paths and targets
    double gram_rcond{0.0};              // min/max |diag D| of the LDLT
};

/// Ridge least squares on the normal equations, the Monte Carlo surrogate
/// for E[. | F_{t_i}]. ridge < 0 selects the scale-invariant default
/// 1e-8 * trace(Gram)/n_features; ridge = 0 demands a well-conditioned Gram
/// and throws std::runtime_error otherwise. Targets in the feature span are
/// reproduced exactly at ridge 0.
ConditionalEstimate estimate_conditional(const Eigen::MatrixXd& targets,
                                         const Eigen::MatrixXd& features, double ridge = -1.0);

/// Per-index cached features and Gram factorisations for one ensemble.
/// fit() solves against the cached factorisation, so repeated estimates at
/// the same index cost one matrix-vector product each. Read-only after
/// construction and safe to share across threads.
class RegressionContext {
public:
    RegressionContext(const BrownianEnsemble& ens, int degree, double ridge = -1.0);

    const BrownianEnsemble& ensemble() const { return *ens_; }
    int degree() const { return degree_; }
    int n_features() const { return n_features_; }

    const Eigen::MatrixXd& features(int i) const { return features_[static_cast<std::size_t>(i)]; }

    /// Fitted values (M x n_targets) of the conditional expectation at index i.
    Eigen::MatrixXd fit(int i, const Eigen::MatrixXd& targets) const;

    /// Martingale-coefficient extraction at step j: the regression estimate
    /// of E[targets * (dW_j)^T | F_{t_j}] / dt as an M x k*d block
    /// (column q = a*d + b). Targets are centred by their own conditional
    /// fit first; this leaves the estimand unchanged (E[dW | F_{t_j}] = 0)
    /// and removes the O(sqrt(dt)) variance of the raw product.
    Eigen::MatrixXd martingale_coefficient(int j, const Eigen::MatrixXd& targets) const;

private:
    const BrownianEnsemble* ens_;
    int degree_{0};
    int n_features_{0};
    std::vector<Eigen::MatrixXd> features_;
    std::vector<Eigen::LDLT<Eigen::MatrixXd>> gram_;
};

/// One-off form of RegressionContext::martingale_coefficient.
Eigen::MatrixXd estimate_martingale_coefficient(const Eigen::MatrixXd& targets,
                                                const BrownianEnsemble& ens, int j, int degree,
                                                double ridge = -1.0);

}  // namespace bdsvie
