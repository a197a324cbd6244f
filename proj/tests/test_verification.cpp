#include <doctest.h>

#include <cmath>

#include "bdsvie/catalog.hpp"
#include "bdsvie/verification.hpp"
#include "support.hpp"

using namespace bdsvie;

TEST_CASE("a-priori bound on the trivial problem") {
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 1024, 5);
    ProblemSpec spec = catalog_problem("martingale").spec;
    spec.xi = [](const BrownianEnsemble& e) {
        return Eigen::MatrixXd::Zero(e.n_paths(), 1).eval();
    };
    DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
    TriangularField z(ens.grid(), ens.n_paths(), 1, 1);
    const AprioriReport rep = check_apriori_bound(y, z, spec, ens, 0, 16);
    CHECK(rep.pass);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs == 0.0);
}

TEST_CASE("a-priori bound on the martingale oracle: lhs ~ 1, rhs ~ 3") {
    const CatalogEntry entry = catalog_problem("martingale");
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 8192, 42);
    const DiagonalProcess y = entry.oracle_y(ens);
    const TriangularField z = entry.oracle_z(ens);
    const AprioriReport rep = check_apriori_bound(y, z, entry.spec, ens, 0, 32);
    CHECK(rep.pass);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(0.15));
    CHECK(rep.rhs == doctest::Approx(3.0).epsilon(0.15));
    CHECK(rep.slack_ratio == doctest::Approx(1.0 / 3.0).epsilon(0.2));
}

TEST_CASE("a-priori constants: the (T-S) v 1 factor") {
    // T - S = 1 here, so rhs = 3 * Ehat|xi|^2 exactly when f = g = 0.
    const CatalogEntry entry = catalog_problem("martingale");
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 2048, 5);
    DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
    TriangularField z(ens.grid(), ens.n_paths(), 1, 1);
    const AprioriReport rep = check_apriori_bound(y, z, entry.spec, ens, 0, 16);
    const double xi_moment = ens.w_at(16).squaredNorm() / ens.n_paths();
    CHECK(rep.rhs == doctest::Approx(3.0 * xi_moment).epsilon(1e-12));
}

TEST_CASE("Theta of the zero field obeys the Lemma estimate on the demo problem") {
    const CatalogEntry entry = catalog_problem("lipschitz-demo");
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 8192, 42);
    const RegressionContext reg(ens, 2);
    const FrozenField zero = FrozenField::zero(ens.grid(), ens.n_paths(), 1, 1);
    const Eigen::MatrixXd xi = entry.spec.xi(ens);
    const FrozenField image = apply_theta(entry.spec, ens, reg, zero, 0, 32, xi);

    // the frozen drivers of this Theta application are f(.,.,0,0), g(.,.,0,0)
    ProblemSpec frozen_spec = entry.spec;
    frozen_spec.f = [&entry](double t, double s, const Eigen::Ref<const Eigen::MatrixXd>& y,
                             const Eigen::Ref<const Eigen::MatrixXd>&, Eigen::MatrixXd& out) {
        const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(y.rows(), 1);
        entry.spec.f(t, s, zeros, zeros, out);
    };
    frozen_spec.g = [&entry](double t, double s, const Eigen::Ref<const Eigen::MatrixXd>& y,
                             const Eigen::Ref<const Eigen::MatrixXd>&, Eigen::MatrixXd& out) {
        const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(y.rows(), 1);
        entry.spec.g(t, s, zeros, zeros, out);
    };
    const AprioriReport rep = check_apriori_bound(image.y, image.z, frozen_spec, ens, 0, 32);
    CHECK(rep.pass);
}

TEST_CASE("contraction ratio bookkeeping") {
    const double lambda = 0.6;
    // geometric residuals res_n^2 = lambda^n
    std::vector<double> residuals;
    for (int n = 1; n <= 6; ++n) residuals.push_back(std::pow(lambda, n / 2.0));
    const ContractionReport rep = measure_contraction_ratios(residuals, lambda);
    CHECK(rep.pass);
    for (double r : rep.ratios) CHECK(r == doctest::Approx(lambda));

    std::vector<double> bad = residuals;
    bad[2] = std::sqrt((lambda + 0.2) * bad[1] * bad[1]);
    const ContractionReport rep_bad = measure_contraction_ratios(bad, lambda);
    CHECK_FALSE(rep_bad.pass);

    CHECK_THROWS_AS(measure_contraction_ratios({0.5, 0.2}, lambda), std::invalid_argument);
}

TEST_CASE("uniqueness: constant-driver problems match bit-for-bit") {
    const CatalogEntry entry = catalog_problem("martingale");
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 2048, 7);
    const RegressionContext reg(ens, 2);
    const ContractionCertificate cert =
        build_certificate(entry.spec.lip_c, entry.spec.alpha, entry.spec.T);
    SolverConfig cfg;
    const UniquenessReport rep = run_uniqueness_test(entry.spec, ens, reg, cert, cfg);
    CHECK(rep.pass);
    CHECK(rep.distance == 0.0);
}

TEST_CASE("resubstitution residual vanishes for constant drivers") {
    const CatalogEntry entry = catalog_problem("martingale");
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 2048, 7);
    const RegressionContext reg(ens, 2);
    const ContractionCertificate cert =
        build_certificate(entry.spec.lip_c, entry.spec.alpha, entry.spec.T);
    SolverConfig cfg;
    const SolutionEstimate sol = stitched_solve(entry.spec, ens, reg, cert, cfg);
    CHECK(resubstitution_residual(entry.spec, ens, reg, sol, cert.a) == 0.0);
}

TEST_CASE("oracle residuals in the discrete equation shrink at first order") {
    // martingale / backward-driver / kernel(psi=1) telescope exactly;
    // linear-drift carries an O(dt) quadrature residual.
    for (const char* name : {"martingale", "backward-driver", "kernel"}) {
        const CatalogEntry entry = catalog_problem(name);
        const BrownianEnsemble& ens = testing::shared_ensemble(32, 2048, 17);
        const double resid = testing::equation_residual_norm(
            entry.spec, ens, entry.oracle_y(ens), entry.oracle_z(ens));
        INFO(name);
        CHECK(resid <= 1e-12);
    }

    const CatalogEntry drift = catalog_problem("linear-drift");
    double previous = 0.0;
    for (int idx = 0; idx < 3; ++idx) {
        const int N = 16 << idx;
        const BrownianEnsemble& ens = testing::shared_ensemble(N, 2048, 17);
        const double resid = testing::equation_residual_norm(drift.spec, ens,
                                                             drift.oracle_y(ens),
                                                             drift.oracle_z(ens));
        if (idx > 0) {
            const double factor = previous / resid;
            CHECK(factor >= 1.4);
            CHECK(factor <= 2.6);
        }
        previous = resid;
    }
}

TEST_CASE("oracle suite rows carry self-auditing pass flags") {
    OracleSuiteConfig cfg;
    cfg.entries = {"backward-driver"};
    const std::vector<OracleRow> rows = run_oracle_suite(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].pass == (rows[0].err_y <= rows[0].threshold_y));
    CHECK_FALSE(rows[0].threshold_z.has_value());
}
