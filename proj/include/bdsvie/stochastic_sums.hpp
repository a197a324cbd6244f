#pragma once

#include <Eigen/Dense>
#include <functional>

#include "bdsvie/brownian_ensemble.hpp"
#include "bdsvie/paths.hpp"

namespace bdsvie {

enum class Driver { W, B };

/// Fills `out` (M x k*dim) with the integrand sampled at grid index i.
/// Column q = a*dim + c carries component (a, c).
using StepIntegrand = std::function<void(int i, Eigen::MatrixXd& out)>;

/// Left-endpoint Ito sum: sum_{j=i0}^{i1-1} H(t_j) * dDriver_j, per path.
/// Returns M x k.
Eigen::MatrixXd forward_ito_sum(const StepIntegrand& integrand, const BrownianEnsemble& ens,
                                Driver driver, int i0, int i1, int k);

/// Right-endpoint (backward Ito) sum: sum_{j=i0}^{i1-1} G(t_{j+1}) * dDriver_j.
Eigen::MatrixXd backward_ito_sum(const StepIntegrand& integrand, const BrownianEnsemble& ens,
                                 Driver driver, int i0, int i1, int k);

/// Left-endpoint quadrature: sum_{j=i0}^{i1-1} F(t_j) * dt, per path (M x k).
Eigen::MatrixXd riemann_sum(const StepIntegrand& integrand, const TimeGrid& grid, int n_paths,
                            int k, int i0, int i1);

/// Weight exponent and grid window [i_lo, i_hi] delimiting [S, T].
struct WeightedNormParams {
    double a{0.0};
    int i_lo{0};
    int i_hi{0};
};

/// Squared weighted H2 norm of a (y, z) pair:
///   Ehat[ sum_{i=lo}^{hi-1} e^{a t_i} |y(t_i)|^2 dt
///        + sum_{i=lo}^{hi-1} sum_{j=i}^{hi-1} e^{a t_j} ||z(t_i,t_j)||_F^2 dt^2 ].
/// Either part can be omitted by passing nullptr.
double weighted_h2_norm(const DiagonalProcess* y, const TriangularField* z,
                        const WeightedNormParams& params);

inline double weighted_h2_norm(const DiagonalProcess& y, const TriangularField& z,
                               const WeightedNormParams& params) {
    return weighted_h2_norm(&y, &z, params);
}

/// Squared weighted H2 norm of the difference (y1 - y2, z1 - z2), streamed
/// without materialising the difference fields.
double weighted_h2_distance_sq(const DiagonalProcess& y1, const TriangularField& z1,
                               const DiagonalProcess& y2, const TriangularField& z2,
                               const WeightedNormParams& params);

}  // namespace bdsvie
