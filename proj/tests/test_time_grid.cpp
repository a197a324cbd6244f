#include <doctest.h>

#include "bdsvie/time_grid.hpp"

using namespace bdsvie;

TEST_CASE("make_grid produces uniform nodes") {
    const TimeGrid g = make_grid(1.0, 4);
    CHECK(g.times == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(g.dt == 0.25);

    const TimeGrid single = make_grid(1.0, 1);
    CHECK(single.times == std::vector<double>{0.0, 1.0});

    CHECK(make_grid(0.5, 2).dt == 0.25);
}

TEST_CASE("make_grid endpoints are exact") {
    for (int N : {3, 7, 10, 33}) {
        const TimeGrid g = make_grid(1.0, N);
        CHECK(g.times.front() == 0.0);
        CHECK(g.times.back() == 1.0);
        for (int i = 0; i < N; ++i)
            CHECK(g.at(i + 1) - g.at(i) == doctest::Approx(g.dt).epsilon(1e-12));
    }
}

TEST_CASE("make_grid rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("index_of snaps to nearby nodes only") {
    const TimeGrid g = make_grid(1.0, 4);
    CHECK(g.index_of(0.5) == 2);
    CHECK(g.index_of(0.5 + 1e-12) == 2);
    CHECK(g.index_of(1.0) == 4);
    CHECK_THROWS_AS(g.index_of(0.4), std::invalid_argument);
    CHECK_THROWS_AS(g.index_of(1.4), std::invalid_argument);
}
