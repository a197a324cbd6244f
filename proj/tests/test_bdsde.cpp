#include <doctest.h>

#include <cmath>

#include "bdsvie/bdsde.hpp"
#include "bdsvie/catalog.hpp"
#include "support.hpp"

using namespace bdsvie;

namespace {

BdsdeDrivers zero_drivers() {
    BdsdeDrivers d;
    d.eval = [](int, const Eigen::MatrixXd&, const Eigen::MatrixXd&, Eigen::MatrixXd& f,
                Eigen::MatrixXd& g) {
        f.setZero();
        g.setZero();
    };
    return d;
}

}  // namespace

TEST_CASE("terminal condition is exact") {
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 1024, 5);
    const RegressionContext reg(ens, 2);
    const Eigen::MatrixXd terminal = ens.w_at(16);
    const BdsdeSolution sol = solve_bdsde(zero_drivers(), ens, reg, 0, 16, terminal);
    CHECK((sol.lambda_at(16) - terminal).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("driver-free recursion equals a single projection") {
    const BrownianEnsemble& ens = testing::shared_ensemble(16, 2048, 5);
    const RegressionContext reg(ens, 2);
    const Eigen::MatrixXd terminal = ens.w_at(16).array().sin().matrix();
    const BdsdeSolution sol = solve_bdsde(zero_drivers(), ens, reg, 0, 16, terminal);
    for (int j : {0, 5, 12}) {
        const Eigen::MatrixXd direct = reg.fit(j, terminal);
        CHECK((sol.lambda_at(j) - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("zero drivers, terminal W_T reproduces the martingale pair") {
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 8192, 42);
    const int N = ens.grid().n_steps;
    const RegressionContext reg(ens, 2);
    const BdsdeSolution sol = solve_bdsde(zero_drivers(), ens, reg, 0, N, ens.w_at(N));

    double err = 0.0, ref = 0.0, zerr = 0.0, zref = 0.0;
    for (int j = 0; j < N; ++j) {
        err += (sol.lambda_at(j) - ens.w_at(j)).squaredNorm();
        ref += ens.w_at(j).squaredNorm();
        zerr += (sol.mu_at(j).array() - 1.0).matrix().squaredNorm();
        zref += static_cast<double>(ens.n_paths());
    }
    CHECK(std::sqrt(err / ref) <= 0.05);
    CHECK(std::sqrt(zerr / zref) <= 0.05);
}

TEST_CASE("constant backward driver reproduces B_T - B_t") {
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 8192, 42);
    const int N = ens.grid().n_steps;
    const RegressionContext reg(ens, 2);
    BdsdeDrivers d;
    d.eval = [](int, const Eigen::MatrixXd&, const Eigen::MatrixXd&, Eigen::MatrixXd& f,
                Eigen::MatrixXd& g) {
        f.setZero();
        g.setOnes();
    };
    const BdsdeSolution sol =
        solve_bdsde(d, ens, reg, 0, N, Eigen::MatrixXd::Zero(ens.n_paths(), 1));

    double err = 0.0, ref = 0.0, zabs = 0.0;
    for (int j = 0; j < N; ++j) {
        const Eigen::MatrixXd want = ens.b_at(N) - ens.b_at(j);
        err += (sol.lambda_at(j) - want).squaredNorm();
        ref += want.squaredNorm();
        zabs = std::max(zabs, sol.mu_at(j).cwiseAbs().maxCoeff());
    }
    CHECK(std::sqrt(err / ref) <= 0.02);
    CHECK(zabs <= 1e-8);
}

TEST_CASE("linear drift matches the exponential decay pair") {
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 16384, 42);
    const int N = ens.grid().n_steps;
    const RegressionContext reg(ens, 2);
    BdsdeDrivers d;
    d.depends_on_solution = true;
    d.eval = [](int, const Eigen::MatrixXd& lam, const Eigen::MatrixXd&, Eigen::MatrixXd& f,
                Eigen::MatrixXd& g) {
        f = -lam;
        g.setZero();
    };
    const BdsdeSolution sol = solve_bdsde(d, ens, reg, 0, N, ens.w_at(N));

    // lambda(0) ~ e^{-1} W_0 = 0
    CHECK(std::abs(sol.lambda_at(0).col(0).mean()) <= 0.02);

    // mu(r_j) ~ e^{-(1-r_j)} within 5% in mean
    for (int j : {4, 16, 28}) {
        const double want = std::exp(-(1.0 - ens.grid().at(j)));
        CHECK(sol.mu_at(j).col(0).mean() == doctest::Approx(want).epsilon(0.05));
    }
}

TEST_CASE("inner fixed point contracts on the demo drivers") {
    const CatalogEntry entry = catalog_problem("lipschitz-demo");
    const BrownianEnsemble& ens = testing::shared_ensemble(32, 4096, 9);
    const RegressionContext reg(ens, 2);

    BdsdeDrivers d;
    d.depends_on_solution = true;
    d.k = 1;
    d.l = 1;
    d.eval = [&](int j, const Eigen::MatrixXd& lam, const Eigen::MatrixXd& mu, Eigen::MatrixXd& f,
                 Eigen::MatrixXd& g) {
        const double r = ens.grid().at(j);
        entry.spec.f(r, r, lam, mu, f);
        entry.spec.g(r, r, lam, mu, g);
    };
    BdsdeConfig cfg;
    cfg.inner_iterations = 5;
    cfg.record_inner = true;
    const Eigen::MatrixXd terminal = entry.spec.xi(ens);
    const BdsdeSolution sol = solve_bdsde(d, ens, reg, 0, 32, terminal, cfg);

    // distances between successive inner iterates shrink geometrically
    int checked = 0;
    for (const auto& dists : sol.inner_distances) {
        for (std::size_t n = 0; n + 1 < dists.size(); ++n) {
            if (dists[n] <= 1e-14) continue;
            CHECK(dists[n + 1] <= 0.9 * dists[n] + 1e-14);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("time-discretisation error drops at first order on linear drift") {
    // M large enough that the regression-noise floor sits well below the
    // O(dt) scheme bias at both resolutions
    const int M = 16384;
    BdsdeDrivers d;
    d.depends_on_solution = true;
    d.eval = [](int, const Eigen::MatrixXd& lam, const Eigen::MatrixXd&, Eigen::MatrixXd& f,
                Eigen::MatrixXd& g) {
        f = -lam;
        g.setZero();
    };

    auto y_error = [&](int N) {
        const BrownianEnsemble& ens = testing::shared_ensemble(N, M, 42);
        const RegressionContext reg(ens, 2);
        const BdsdeSolution sol = solve_bdsde(d, ens, reg, 0, N, ens.w_at(N));
        double err = 0.0, ref = 0.0;
        for (int j = 0; j < N; ++j) {
            const Eigen::MatrixXd want =
                std::exp(-(1.0 - ens.grid().at(j))) * ens.w_at(j);
            err += (sol.lambda_at(j) - want).squaredNorm() * ens.grid().dt;
            ref += want.squaredNorm() * ens.grid().dt;
        }
        return std::sqrt(err / ref);
    };

    const double coarse = y_error(16);
    const double fine = y_error(32);
    const double factor = coarse / fine;
    CHECK(factor >= 1.5);
    CHECK(factor <= 2.5);
}
