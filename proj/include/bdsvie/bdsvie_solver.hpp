#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bdsvie/bdsde.hpp"
#include "bdsvie/certificate.hpp"
#include "bdsvie/paths.hpp"
#include "bdsvie/problem.hpp"
#include "bdsvie/regression.hpp"

namespace bdsvie {

/// The frozen argument (y(s), z(t,s)) fed to the Theta map.
struct FrozenField {
    DiagonalProcess y;
    TriangularField z;

    static FrozenField zero(const TimeGrid& grid, int n_paths, int k, int d);
    /// y(t_i) = values for every i, z = 0.
    static FrozenField constant(const TimeGrid& grid, const Eigen::MatrixXd& values, int d);
};

struct SolverConfig {
    double tol{1e-4};
    int max_iter{25};
    int inner_iterations{2};
    int threads{1};
};

/// Per-interval Picard record. `residuals` holds the a-weighted distances
/// ||x_n - x_{n-1}|| (not squared) in sweep order.
struct IntervalStats {
    double s_lo{0.0};
    double s_hi{0.0};
    int row_lo{0};
    int row_hi{0};
    std::vector<double> residuals;
    int iterations{0};
    bool converged{false};
};

struct SolutionEstimate {
    DiagonalProcess y;
    TriangularField z;
    ContractionCertificate certificate;
    std::vector<IntervalStats> intervals;
    bool converged{false};
    long long regressions{0};  // deterministic work counter
};

/// Per-path terminal row for row index i (M x k).
using TerminalProvider = std::function<const Eigen::MatrixXd&(int row)>;

/// Frozen-driver solve: for each row i in [row_lo, row_hi] runs the BDSDE
/// recursion on [i, i_end] with drivers
///   s_j -> f(t_i, s_j, y(s_j), z(t_i, s_j))  (left endpoint)
///   s_j -> g(t_i, s_{j+1}, y(s_{j+1}), z(t_i, s_j))  (right endpoint in
///   time and y; z at the cell being integrated)
/// and extracts Y(t_i) = lambda^{t_i}(t_i), Z(t_i, s_j) = mu^{t_i}(s_j) for
/// j in [i, i_end-1] into y_out / z_out. Rows are independent and
/// parallelised over `threads` with bit-identical results.
void solve_frozen_rows(const ProblemSpec& spec, const BrownianEnsemble& ens,
                       const RegressionContext& reg, const FrozenField& frozen, int row_lo,
                       int row_hi, int i_end, const TerminalProvider& terminal,
                       const BdsdeConfig& bdsde_config, int threads, DiagonalProcess& y_out,
                       TriangularField& z_out, long long* regressions = nullptr);

/// Spec-facing frozen solve on window [i_lo, i_hi]: rows i_lo..i_hi, each
/// solved on [i, i_hi] with the given terminal at t_{i_hi}.
std::pair<DiagonalProcess, TriangularField> solve_frozen_bdsvie(
    const ProblemSpec& spec, const BrownianEnsemble& ens, const RegressionContext& reg,
    const FrozenField& frozen, int i_lo, int i_hi, const Eigen::MatrixXd& terminal,
    const SolverConfig& config = {});

/// One application of the Theta map: the frozen solve repackaged as a field.
FrozenField apply_theta(const ProblemSpec& spec, const BrownianEnsemble& ens,
                        const RegressionContext& reg, const FrozenField& input, int i_lo, int i_hi,
                        const Eigen::MatrixXd& terminal, const SolverConfig& config = {});

/// Picard iteration of Theta on window [i_lo, i_hi] from `init`, stopping
/// when the a-weighted distance between successive iterates drops to
/// config.tol or max_iter is reached (non-fatal; recorded in the stats).
/// Requires the window to be shorter than cert.max_step.
SolutionEstimate picard_solve(const ProblemSpec& spec, const BrownianEnsemble& ens,
                              const RegressionContext& reg, int i_lo, int i_hi,
                              const Eigen::MatrixXd& terminal, const ContractionCertificate& cert,
                              const SolverConfig& config, const FrozenField& init);

/// Full-horizon solve by interval stitching. The rightmost certificate
/// interval [S_1, T] is solved first; each earlier interval then solves its
/// vertical strip {(t, s): t in [S_{p+1}, S_p], s in [t, T]} with y frozen
/// to the already-solved values on [S_p, T] and full-length z rows. Running
/// every strip row's recursion to T with terminal xi realises the
/// t-dependent effective terminal (xi plus the f-quadrature and g-backward
/// sum over the solved region, re-evaluated each sweep) as the raw
/// accumulated regression target. Stitch points snap to grid indices;
/// partitions that violate the step bound after snapping are rejected.
SolutionEstimate stitched_solve(const ProblemSpec& spec, const BrownianEnsemble& ens,
                                const RegressionContext& reg, const ContractionCertificate& cert,
                                const SolverConfig& config, const FrozenField* init = nullptr);

}  // namespace bdsvie
