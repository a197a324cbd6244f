#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <tuple>

#include "bdsvie/bdsvie_solver.hpp"
#include "bdsvie/catalog.hpp"
#include "bdsvie/stochastic_sums.hpp"

namespace bdsvie::testing {

// Shared ensembles, cached so the big Monte Carlo fixtures are sampled once
// per test binary.
inline const BrownianEnsemble& shared_ensemble(int N, int M, std::uint64_t seed) {
    static std::map<std::tuple<int, int, std::uint64_t>, BrownianEnsemble> cache;
    auto key = std::make_tuple(N, M, seed);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, sample_ensemble(make_grid(1.0, N), M, 1, 1, seed)).first;
    return it->second;
}

// Path-wise residual of the discrete equation for row i:
//   -Y(t_i) + xi + sum_j [ f(t_i,s_j,Y_j,Z_ij) dt
//                          + g(t_i,s_{j+1},Y_{j+1},Z_ij) dB_j - Z_ij dW_j ].
// Built from the raw calculus sums, independent of the solver's regression
// path.
inline Eigen::MatrixXd equation_residual_row(const ProblemSpec& spec, const BrownianEnsemble& ens,
                                             const DiagonalProcess& y, const TriangularField& z,
                                             int i) {
    const int N = ens.grid().n_steps;
    const int M = ens.n_paths();
    const double t_row = ens.grid().at(i);
    Eigen::MatrixXd resid = spec.xi(ens) - y.at(i);
    Eigen::MatrixXd f_vals(M, spec.k), g_vals(M, spec.k * spec.l);
    for (int j = i; j < N; ++j) {
        const ConstMatrixMap z_cell = z.at(i, j);
        spec.f(t_row, ens.grid().at(j), y.at(j), z_cell, f_vals);
        spec.g(t_row, ens.grid().at(j + 1), y.at(j + 1), z_cell, g_vals);
        resid += f_vals * ens.grid().dt;
        const Eigen::MatrixXd db = ens.b_increment(j);
        const Eigen::MatrixXd dw = ens.w_increment(j);
        for (int a = 0; a < spec.k; ++a) {
            for (int b = 0; b < spec.l; ++b)
                resid.col(a).array() += g_vals.col(a * spec.l + b).array() * db.col(b).array();
            for (int b = 0; b < spec.d; ++b)
                resid.col(a).array() -= z_cell.col(a * spec.d + b).array() * dw.col(b).array();
        }
    }
    return resid;
}

// sqrt( Ehat sum_i |resid_i|^2 dt ) over all rows.
inline double equation_residual_norm(const ProblemSpec& spec, const BrownianEnsemble& ens,
                                     const DiagonalProcess& y, const TriangularField& z) {
    const int N = ens.grid().n_steps;
    double total = 0.0;
    for (int i = 0; i < N; ++i)
        total += equation_residual_row(spec, ens, y, z, i).squaredNorm() * ens.grid().dt;
    return std::sqrt(total / ens.n_paths());
}

inline double relative_y_error(const DiagonalProcess& got, const DiagonalProcess& want) {
    const int N = got.grid().n_steps;
    const double dt = got.grid().dt;
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < N; ++i) {
        err += (got.at(i) - want.at(i)).squaredNorm() * dt;
        ref += want.at(i).squaredNorm() * dt;
    }
    return std::sqrt(err / ref);
}

inline double relative_z_error(const TriangularField& got, const TriangularField& want) {
    const int N = got.grid().n_steps;
    const double dt = got.grid().dt;
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            err += (got.at(i, j) - want.at(i, j)).squaredNorm() * dt * dt;
            ref += want.at(i, j).squaredNorm() * dt * dt;
        }
    return std::sqrt(err / ref);
}

inline double absolute_z_error(const TriangularField& got) {
    const int N = got.grid().n_steps;
    const double dt = got.grid().dt;
    double err = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) err += got.at(i, j).squaredNorm() * dt * dt;
    return std::sqrt(err / got.n_paths());
}

}  // namespace bdsvie::testing
