#include "bdsvie/bdsvie_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bdsvie/parallel.hpp"
#include "bdsvie/stochastic_sums.hpp"

namespace bdsvie {

FrozenField FrozenField::zero(const TimeGrid& grid, int n_paths, int k, int d) {
    FrozenField f;
    f.y = DiagonalProcess(grid, n_paths, k);
    f.z = TriangularField(grid, n_paths, k, d);
    return f;
}

FrozenField FrozenField::constant(const TimeGrid& grid, const Eigen::MatrixXd& values, int d) {
    FrozenField f;
    f.y = DiagonalProcess(grid, static_cast<int>(values.rows()),
                          static_cast<int>(values.cols()));
    f.z = TriangularField(grid, static_cast<int>(values.rows()),
                          static_cast<int>(values.cols()), d);
    for (int i = 0; i <= grid.n_steps; ++i) f.y.at(i) = values;
    return f;
}

void solve_frozen_rows(const ProblemSpec& spec, const BrownianEnsemble& ens,
                       const RegressionContext& reg, const FrozenField& frozen, int row_lo,
                       int row_hi, int i_end, const TerminalProvider& terminal,
                       const BdsdeConfig& bdsde_config, int threads, DiagonalProcess& y_out,
                       TriangularField& z_out, long long* regressions) {
    const int N = ens.grid().n_steps;
    if (row_lo < 0 || row_hi > i_end || i_end > N)
        throw std::out_of_range("solve_frozen_rows: row window out of range");

    std::vector<long long> row_regressions(static_cast<std::size_t>(row_hi - row_lo + 1), 0);

    parallel_for(row_lo, row_hi + 1, threads, [&](int i) {
        if (i == i_end) {
            y_out.at(i) = terminal(i);
            return;
        }
        const double t_row = ens.grid().at(i);
        BdsdeDrivers drivers;
        drivers.k = spec.k;
        drivers.l = spec.l;
        drivers.depends_on_solution = false;
        // Frozen drivers of row t_i: f at the left endpoint with the frozen
        // diagonal and the row's own cell; g at the right time endpoint with
        // the frozen diagonal there and the z value of the cell being
        // integrated (the mu solved at j), which keeps every cell reference
        // inside the triangle.
        drivers.eval = [&, i, t_row](int j, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                                     Eigen::MatrixXd& f_out, Eigen::MatrixXd& g_out) {
            const ConstMatrixMap z_cell = frozen.z.at(i, j);
            spec.f(t_row, ens.grid().at(j), frozen.y.at(j), z_cell, f_out);
            spec.g(t_row, ens.grid().at(j + 1), frozen.y.at(j + 1), z_cell, g_out);
        };

        const BdsdeSolution sol =
            solve_bdsde(drivers, ens, reg, i, i_end, terminal(i), bdsde_config);
        y_out.at(i) = sol.lambda_at(i);
        const int z_hi = std::min(i_end, N) - 1;
        for (int j = i; j <= z_hi; ++j) z_out.at(i, j) = sol.mu_at(j);
        // One conditional fit and d martingale fits per inner pass per step.
        row_regressions[static_cast<std::size_t>(i - row_lo)] =
            static_cast<long long>(i_end - i) * sol.inner_iterations_used[0] *
            (1 + ens.dim_w());
    });

    if (regressions) {
        long long total = 0;
        for (long long r : row_regressions) total += r;
        *regressions += total;
    }
}

std::pair<DiagonalProcess, TriangularField> solve_frozen_bdsvie(
    const ProblemSpec& spec, const BrownianEnsemble& ens, const RegressionContext& reg,
    const FrozenField& frozen, int i_lo, int i_hi, const Eigen::MatrixXd& terminal,
    const SolverConfig& config) {
    DiagonalProcess y(ens.grid(), ens.n_paths(), spec.k);
    TriangularField z(ens.grid(), ens.n_paths(), spec.k, spec.d);
    BdsdeConfig bcfg;
    bcfg.inner_iterations = config.inner_iterations;
    TerminalProvider uniform = [&terminal](int) -> const Eigen::MatrixXd& { return terminal; };
    solve_frozen_rows(spec, ens, reg, frozen, i_lo, i_hi, i_hi, uniform, bcfg, config.threads, y,
                      z, nullptr);
    return {std::move(y), std::move(z)};
}

FrozenField apply_theta(const ProblemSpec& spec, const BrownianEnsemble& ens,
                        const RegressionContext& reg, const FrozenField& input, int i_lo,
                        int i_hi, const Eigen::MatrixXd& terminal, const SolverConfig& config) {
    auto [y, z] = solve_frozen_bdsvie(spec, ens, reg, input, i_lo, i_hi, terminal, config);
    FrozenField out;
    out.y = std::move(y);
    out.z = std::move(z);
    return out;
}

namespace {

// Picard iteration of the frozen solve on rows [row_lo, row_hi] with each
// row's recursion running to i_end. `state` carries the current iterate and
// is updated in place; rows outside the window are left untouched, which is
// exactly how the stitched solve freezes the already-solved region.
IntervalStats picard_rows(const ProblemSpec& spec, const BrownianEnsemble& ens,
                          const RegressionContext& reg, int row_lo, int row_hi, int i_end,
                          const Eigen::MatrixXd& terminal, const ContractionCertificate& cert,
                          const SolverConfig& config, FrozenField& state,
                          long long* regressions) {
    IntervalStats stats;
    stats.row_lo = row_lo;
    stats.row_hi = row_hi;
    stats.s_lo = ens.grid().at(row_lo);
    stats.s_hi = ens.grid().at(std::min(row_hi, ens.grid().n_steps));

    DiagonalProcess y_next(ens.grid(), ens.n_paths(), spec.k);
    TriangularField z_next(ens.grid(), ens.n_paths(), spec.k, spec.d);
    BdsdeConfig bcfg;
    bcfg.inner_iterations = config.inner_iterations;
    TerminalProvider uniform = [&terminal](int) -> const Eigen::MatrixXd& { return terminal; };

    // With solution-independent drivers Theta is a constant map: the first
    // sweep lands on the fixed point and the second only certifies it.
    const int max_iter =
        spec.drivers_depend_on_solution() ? config.max_iter : std::min(config.max_iter, 2);

    for (int n = 1; n <= max_iter; ++n) {
        solve_frozen_rows(spec, ens, reg, state, row_lo, row_hi, i_end, uniform, bcfg,
                          config.threads, y_next, z_next, regressions);

        // a-weighted squared distance between the sweep and the iterate,
        // restricted to the rows this window owns (everything else is
        // frozen and contributes zero).
        double dist_sq = 0.0;
        {
            const double dt = ens.grid().dt;
            for (int i = row_lo; i <= std::min(row_hi, i_end - 1); ++i)
                dist_sq += std::exp(cert.a * ens.grid().at(i)) *
                           (y_next.at(i) - state.y.at(i)).squaredNorm() * dt;
            const int z_hi = std::min(i_end, ens.grid().n_steps) - 1;
            for (int i = row_lo; i <= std::min(row_hi, z_hi); ++i)
                for (int j = i; j <= z_hi; ++j)
                    dist_sq += std::exp(cert.a * ens.grid().at(j)) *
                               (z_next.at(i, j) - state.z.at(i, j)).squaredNorm() * dt * dt;
            dist_sq /= ens.n_paths();
        }
        const double dist = std::sqrt(dist_sq);
        stats.residuals.push_back(dist);
        stats.iterations = n;

        for (int i = row_lo; i <= row_hi; ++i) state.y.at(i) = y_next.at(i);
        const int z_hi = std::min(i_end, ens.grid().n_steps) - 1;
        for (int i = row_lo; i <= std::min(row_hi, z_hi); ++i)
            for (int j = i; j <= z_hi; ++j) state.z.at(i, j) = z_next.at(i, j);

        if (dist <= config.tol) {
            stats.converged = true;
            break;
        }
    }
    return stats;
}

void check_window_length(const ContractionCertificate& cert, double length) {
    if (!(length < cert.max_step))
        throw std::invalid_argument(
            "picard_solve: window length " + std::to_string(length) +
            " must stay strictly below the certificate step bound " +
            std::to_string(cert.max_step));
}

}  // namespace

SolutionEstimate picard_solve(const ProblemSpec& spec, const BrownianEnsemble& ens,
                              const RegressionContext& reg, int i_lo, int i_hi,
                              const Eigen::MatrixXd& terminal, const ContractionCertificate& cert,
                              const SolverConfig& config, const FrozenField& init) {
    if (!(config.tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
    check_window_length(cert, ens.grid().at(i_hi) - ens.grid().at(i_lo));

    SolutionEstimate est;
    est.certificate = cert;
    FrozenField state = init;
    long long regressions = 0;
    IntervalStats stats = picard_rows(spec, ens, reg, i_lo, i_hi, i_hi, terminal, cert, config,
                                      state, &regressions);
    est.y = std::move(state.y);
    est.z = std::move(state.z);
    est.converged = stats.converged;
    est.intervals.push_back(std::move(stats));
    est.regressions = regressions;
    return est;
}

SolutionEstimate stitched_solve(const ProblemSpec& spec, const BrownianEnsemble& ens,
                                const RegressionContext& reg, const ContractionCertificate& cert,
                                const SolverConfig& config, const FrozenField* init) {
    const int N = ens.grid().n_steps;
    if (!(config.tol > 0.0)) throw std::invalid_argument("stitched_solve: tol must be positive");

    // Snap the certificate partition onto grid indices.
    std::vector<int> idx(cert.partition.size());
    for (std::size_t p = 0; p < cert.partition.size(); ++p)
        idx[p] = ens.grid().index_of(cert.partition[p]);
    if (idx.front() != N || idx.back() != 0)
        throw std::invalid_argument("stitched_solve: partition must span [0, T]");
    for (std::size_t p = 0; p + 1 < idx.size(); ++p) {
        if (idx[p] <= idx[p + 1])
            throw std::invalid_argument(
                "stitched_solve: partition collapses after snapping to the grid");
        check_window_length(cert, ens.grid().at(idx[p]) - ens.grid().at(idx[p + 1]));
    }

    const Eigen::MatrixXd xi = spec.xi(ens);
    if (xi.rows() != ens.n_paths() || xi.cols() != spec.k)
        throw std::invalid_argument("stitched_solve: xi must evaluate to M x k");

    SolutionEstimate est;
    est.certificate = cert;
    FrozenField state =
        init ? *init : FrozenField::zero(ens.grid(), ens.n_paths(), spec.k, spec.d);
    est.converged = true;
    long long regressions = 0;

    for (std::size_t p = 0; p + 1 < idx.size(); ++p) {
        const int row_hi = p == 0 ? N : idx[p] - 1;
        const int row_lo = idx[p + 1];
        IntervalStats stats = picard_rows(spec, ens, reg, row_lo, row_hi, N, xi, cert, config,
                                          state, &regressions);
        est.converged = est.converged && stats.converged;
        est.intervals.push_back(std::move(stats));
    }

    est.y = std::move(state.y);
    est.z = std::move(state.z);
    est.regressions = regressions;
    return est;
}

}  // namespace bdsvie
