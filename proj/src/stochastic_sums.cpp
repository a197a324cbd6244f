#include "bdsvie/stochastic_sums.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bdsvie {

namespace {

void check_window(int i0, int i1, int n_steps, const char* who) {
    if (i0 < 0 || i1 > n_steps || i0 > i1)
        throw std::out_of_range(std::string(who) + ": window out of range");
}

int driver_dim(const BrownianEnsemble& ens, Driver d) {
    return d == Driver::W ? ens.dim_w() : ens.dim_b();
}

Eigen::MatrixXd driver_increment(const BrownianEnsemble& ens, Driver d, int j) {
    return d == Driver::W ? ens.w_increment(j) : ens.b_increment(j);
}

// acc += H_vals * dX contracted over the driver coordinate:
// acc(m, a) += sum_c H_vals(m, a*dim + c) * dX(m, c).
void accumulate_contraction(Eigen::MatrixXd& acc, const Eigen::MatrixXd& vals,
                            const Eigen::MatrixXd& dx, int k, int dim) {
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < dim; ++c)
            acc.col(a).array() += vals.col(a * dim + c).array() * dx.col(c).array();
}

}  // namespace

Eigen::MatrixXd forward_ito_sum(const StepIntegrand& integrand, const BrownianEnsemble& ens,
                                Driver driver, int i0, int i1, int k) {
    check_window(i0, i1, ens.grid().n_steps, "forward_ito_sum");
    const int dim = driver_dim(ens, driver);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ens.n_paths(), k);
    Eigen::MatrixXd vals(ens.n_paths(), k * dim);
    for (int j = i0; j < i1; ++j) {
        integrand(j, vals);
        accumulate_contraction(acc, vals, driver_increment(ens, driver, j), k, dim);
    }
    return acc;
}

Eigen::MatrixXd backward_ito_sum(const StepIntegrand& integrand, const BrownianEnsemble& ens,
                                 Driver driver, int i0, int i1, int k) {
    check_window(i0, i1, ens.grid().n_steps, "backward_ito_sum");
    const int dim = driver_dim(ens, driver);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ens.n_paths(), k);
    Eigen::MatrixXd vals(ens.n_paths(), k * dim);
    for (int j = i0; j < i1; ++j) {
        integrand(j + 1, vals);  // right endpoint
        accumulate_contraction(acc, vals, driver_increment(ens, driver, j), k, dim);
    }
    return acc;
}

Eigen::MatrixXd riemann_sum(const StepIntegrand& integrand, const TimeGrid& grid, int n_paths,
                            int k, int i0, int i1) {
    check_window(i0, i1, grid.n_steps, "riemann_sum");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_paths, k);
    Eigen::MatrixXd vals(n_paths, k);
    for (int j = i0; j < i1; ++j) {
        integrand(j, vals);
        acc += vals * grid.dt;
    }
    return acc;
}

double weighted_h2_norm(const DiagonalProcess* y, const TriangularField* z,
                        const WeightedNormParams& params) {
    const TimeGrid& grid = y ? y->grid() : z->grid();
    const int n_paths = y ? y->n_paths() : z->n_paths();
    if (y && z && (y->grid().n_steps != z->grid().n_steps || y->n_paths() != z->n_paths()))
        throw std::invalid_argument("weighted_h2_norm: mismatched grids");
    if (params.i_lo < 0 || params.i_hi > grid.n_steps || params.i_lo > params.i_hi)
        throw std::invalid_argument("weighted_h2_norm: invalid window");
    if (params.a < 0.0) throw std::invalid_argument("weighted_h2_norm: a must be nonnegative");

    const double dt = grid.dt;
    double total = 0.0;
    if (y) {
        for (int i = params.i_lo; i < params.i_hi; ++i)
            total += std::exp(params.a * grid.at(i)) * y->at(i).squaredNorm() * dt;
    }
    if (z) {
        for (int i = params.i_lo; i < params.i_hi; ++i)
            for (int j = i; j < params.i_hi; ++j)
                total += std::exp(params.a * grid.at(j)) * z->at(i, j).squaredNorm() * dt * dt;
    }
    return total / n_paths;
}

double weighted_h2_distance_sq(const DiagonalProcess& y1, const TriangularField& z1,
                               const DiagonalProcess& y2, const TriangularField& z2,
                               const WeightedNormParams& params) {
    const TimeGrid& grid = y1.grid();
    const double dt = grid.dt;
    double total = 0.0;
    for (int i = params.i_lo; i < params.i_hi; ++i)
        total += std::exp(params.a * grid.at(i)) * (y1.at(i) - y2.at(i)).squaredNorm() * dt;
    for (int i = params.i_lo; i < params.i_hi; ++i)
        for (int j = i; j < params.i_hi; ++j)
            total += std::exp(params.a * grid.at(j)) * (z1.at(i, j) - z2.at(i, j)).squaredNorm() *
                     dt * dt;
    return total / y1.n_paths();
}

}  // namespace bdsvie
