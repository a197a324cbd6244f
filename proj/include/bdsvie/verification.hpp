#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bdsvie/bdsvie_solver.hpp"

namespace bdsvie {

struct AprioriReport {
    double lhs{0.0};
    double rhs{0.0};
    double slack_ratio{0.0};  // lhs / rhs (inf when rhs = 0 and lhs > 0)
    bool pass{false};
};

/// Checks the a-priori energy bound
///   E int |Y|^2 dt + E int int ||Z||^2 ds dt
///     <= 3(T-S) E|xi|^2 + 3[(T-S) v 1] E int int (|f|^2 + |g|^2) ds dt
/// on window [win_lo, win_hi], with f and g evaluated along the solution
/// (the frozen-driver reading). pass iff lhs <= slack * rhs.
AprioriReport check_apriori_bound(const DiagonalProcess& y, const TriangularField& z,
                                  const ProblemSpec& spec, const BrownianEnsemble& ens, int win_lo,
                                  int win_hi, double slack = 1.1);

struct UniquenessReport {
    double distance{0.0};
    double tol{0.0};
    bool pass{false};
};

/// Two stitched solves from the zero field and the xi-constant field;
/// pass iff their final a-weighted distance is at most 10 * tol.
UniquenessReport run_uniqueness_test(const ProblemSpec& spec, const BrownianEnsemble& ens,
                                     const RegressionContext& reg,
                                     const ContractionCertificate& cert,
                                     const SolverConfig& config);

struct ContractionReport {
    std::vector<double> ratios;  // r_n = residual_{n+1}^2 / residual_n^2
    double lambda_factor{0.0};
    bool pass{false};
};

/// Ratios of successive squared Picard residuals; pass iff every ratio from
/// r_2 on is at most Lambda + slack. Throws if fewer than 3 residuals.
ContractionReport measure_contraction_ratios(const std::vector<double>& residuals,
                                             double lambda_factor, double slack = 0.1);

/// Fixed-point residual ||Theta(x) - x||_a of a computed solution under one
/// global frozen solve over the full triangle.
double resubstitution_residual(const ProblemSpec& spec, const BrownianEnsemble& ens,
                               const RegressionContext& reg, const SolutionEstimate& sol,
                               double a, int threads = 1);

struct OracleRow {
    std::string name;
    int N{0};
    int M{0};
    int degree{2};
    double err_y{0.0};
    double err_z{0.0};        // relative when the oracle Z is nonzero, else absolute
    bool err_z_relative{true};
    double threshold_y{0.0};
    std::optional<double> threshold_z;
    bool pass{false};
    std::vector<int> iterations;
};

struct OracleSuiteConfig {
    std::uint64_t seed{42};
    int threads{1};
    std::vector<std::string> entries;  // empty = all closed-form entries
};

/// Runs stitched_solve on every closed-form catalog entry at its pinned
/// grid and compares against the oracle in the relative L2 (a = 0) sense.
std::vector<OracleRow> run_oracle_suite(const OracleSuiteConfig& config);

nlohmann::json oracle_rows_to_json(const std::vector<OracleRow>& rows);

}  // namespace bdsvie
