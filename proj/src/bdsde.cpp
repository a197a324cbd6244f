#include "bdsvie/bdsde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bdsvie {

BdsdeSolution solve_bdsde(const BdsdeDrivers& drivers, const BrownianEnsemble& ens,
                          const RegressionContext& reg, int i0, int i1,
                          const Eigen::MatrixXd& terminal, const BdsdeConfig& config) {
    const int N = ens.grid().n_steps;
    if (i0 < 0 || i1 > N || i0 > i1) throw std::out_of_range("solve_bdsde: window out of range");
    const int M = ens.n_paths();
    const int k = drivers.k;
    const int l = drivers.l;
    const int d = ens.dim_w();
    if (terminal.rows() != M || terminal.cols() != k)
        throw std::invalid_argument("solve_bdsde: terminal must be M x k");
    if (!terminal.allFinite())
        throw std::invalid_argument("solve_bdsde: terminal has non-finite entries");
    const double dt = ens.grid().dt;

    BdsdeSolution sol;
    sol.i0 = i0;
    sol.i1 = i1;
    sol.lambda.assign(static_cast<std::size_t>(i1 - i0) + 1, Eigen::MatrixXd());
    sol.mu.assign(static_cast<std::size_t>(std::max(i1 - i0, 0)), Eigen::MatrixXd());
    sol.inner_iterations_used.assign(static_cast<std::size_t>(std::max(i1 - i0, 0)), 0);
    if (config.record_inner)
        sol.inner_distances.assign(static_cast<std::size_t>(std::max(i1 - i0, 0)), {});
    sol.lambda.back() = terminal;

    // Constant drivers make every inner pass identical; one pass suffices
    // and produces the same bits.
    const int inner = drivers.depends_on_solution ? std::max(1, config.inner_iterations) : 1;

    Eigen::MatrixXd accumulated = terminal;  // raw target A_j
    Eigen::MatrixXd lam_tilde, mu_tilde, f_vals(M, k), g_vals(M, k * l);
    Eigen::MatrixXd g_db(M, k), mu_target(M, k), lam_target(M, k), lam_new, mu_new;

    for (int j = i1 - 1; j >= i0; --j) {
        const std::size_t step = static_cast<std::size_t>(j - i0);
        const Eigen::MatrixXd& lam_next = sol.lambda[step + 1];
        const Eigen::MatrixXd db = ens.b_increment(j);

        lam_tilde = lam_next;
        if (j + 1 <= i1 - 1)
            mu_tilde = sol.mu[step + 1];
        else
            mu_tilde = Eigen::MatrixXd::Zero(M, k * d);

        for (int pass = 0; pass < inner; ++pass) {
            drivers.eval(j, lam_tilde, mu_tilde, f_vals, g_vals);

            // (g * dB)_a = sum_b g(:, a*l+b) .* dB_b
            g_db.setZero();
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < l; ++b)
                    g_db.col(a).array() += g_vals.col(a * l + b).array() * db.col(b).array();

            mu_target = lam_next + g_db;
            mu_new = reg.martingale_coefficient(j, mu_target);

            lam_target = accumulated + f_vals * dt + g_db;
            lam_new = reg.fit(j, lam_target);

            if (config.record_inner && pass > 0) {
                const double dist = std::sqrt(((lam_new - lam_tilde).squaredNorm() +
                                               (mu_new - mu_tilde).squaredNorm()) /
                                              M);
                sol.inner_distances[step].push_back(dist);
            }
            lam_tilde = lam_new;
            mu_tilde = mu_new;
        }

        if (!lam_new.allFinite() || !mu_new.allFinite())
            throw std::runtime_error("solve_bdsde: non-finite values at step " +
                                     std::to_string(j));

        accumulated = lam_target;
        sol.lambda[step] = lam_new;
        sol.mu[step] = mu_new;
        sol.inner_iterations_used[step] = inner;
    }
    return sol;
}

}  // namespace bdsvie
