#include <doctest.h>

#include <cmath>

#include "bdsvie/brownian_ensemble.hpp"
#include "support.hpp"

using namespace bdsvie;

TEST_CASE("equal seeds give byte-identical ensembles at any thread count") {
    const TimeGrid g = make_grid(1.0, 16);
    const BrownianEnsemble a = sample_ensemble(g, 257, 2, 3, 99, 1);
    const BrownianEnsemble b = sample_ensemble(g, 257, 2, 3, 99, 4);
    const BrownianEnsemble c = sample_ensemble(g, 257, 2, 3, 99, 7);
    CHECK(a == b);
    CHECK(a == c);
    const BrownianEnsemble other = sample_ensemble(g, 257, 2, 3, 100, 1);
    CHECK_FALSE(a == other);
}

TEST_CASE("paths start at zero") {
    const TimeGrid g = make_grid(1.0, 8);
    const BrownianEnsemble ens = sample_ensemble(g, 64, 2, 2, 5);
    CHECK(ens.w_at(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ens.b_at(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("increment moments match the Gaussian law") {
    const int M = 10000;
    const BrownianEnsemble& ens = testing::shared_ensemble(32, M, 42);
    const double dt = ens.grid().dt;

    // mean within 4 standard errors of 0
    for (int j : {0, 7, 31}) {
        const double mean = ens.w_increment(j).col(0).mean();
        CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / M));
    }

    // variance of one increment coordinate within 10% of dt
    const Eigen::VectorXd inc = ens.w_increment(5).col(0);
    const double var = (inc.array() - inc.mean()).square().sum() / (M - 1);
    CHECK(var == doctest::Approx(dt).epsilon(0.10));
}

TEST_CASE("W and B are uncorrelated across increments") {
    const int M = 10000;
    const BrownianEnsemble& ens = testing::shared_ensemble(32, M, 42);
    const double dt = ens.grid().dt;
    for (int jw : {0, 13}) {
        for (int jb : {0, 13, 27}) {
            const Eigen::VectorXd w = ens.w_increment(jw).col(0);
            const Eigen::VectorXd b = ens.b_increment(jb).col(0);
            const double cov = (w.array() - w.mean()).matrix().dot(
                                   (b.array() - b.mean()).matrix()) /
                               (M - 1);
            // stderr of the empirical covariance of two independent N(0, dt)
            CHECK(std::abs(cov) <= 4.0 * dt / std::sqrt(static_cast<double>(M)));
        }
    }
}

TEST_CASE("step index is range-checked") {
    const BrownianEnsemble ens = sample_ensemble(make_grid(1.0, 4), 8, 1, 1, 1);
    CHECK_THROWS_AS(ens.w_increment(4), std::out_of_range);
    CHECK_THROWS_AS(ens.b_increment(-1), std::out_of_range);
}
