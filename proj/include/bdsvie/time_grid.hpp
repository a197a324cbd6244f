#pragma once

#include <vector>

namespace bdsvie {

/// Uniform time grid on [0, T] with N steps (N+1 nodes).
struct TimeGrid {
    double start{0.0};
    double end{0.0};
    int n_steps{0};
    double dt{0.0};
    std::vector<double> times;

    int n_nodes() const { return n_steps + 1; }
    double at(int i) const { return times[static_cast<std::size_t>(i)]; }

    /// Nearest grid index for a time value; throws if t is farther than
    /// half a step from every node.
    int index_of(double t) const;
};

TimeGrid make_grid(double T, int N);

}  // namespace bdsvie
