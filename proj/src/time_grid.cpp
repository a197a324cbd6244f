#include "bdsvie/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bdsvie {

TimeGrid make_grid(double T, int N) {
    if (!(T > 0.0)) throw std::invalid_argument("make_grid: T must be positive");
    if (N < 1) throw std::invalid_argument("make_grid: N must be at least 1");
    TimeGrid g;
    g.start = 0.0;
    g.end = T;
    g.n_steps = N;
    g.dt = T / N;
    g.times.resize(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) g.times[static_cast<std::size_t>(i)] = T * i / N;
    g.times.back() = T;
    return g;
}

int TimeGrid::index_of(double t) const {
    const double pos = t / dt;
    const int i = static_cast<int>(std::lround(pos));
    if (i < 0 || i > n_steps || std::abs(t - at(std::clamp(i, 0, n_steps))) > 0.5 * dt)
        throw std::invalid_argument("TimeGrid::index_of: " + std::to_string(t) +
                                    " is not near a grid node");
    return i;
}

}  // namespace bdsvie
