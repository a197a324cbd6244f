#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bdsvie/time_grid.hpp"

namespace bdsvie {

using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;

/// M sampled paths of the two independent Brownian drivers W (R^d) and
/// B (R^l) on a shared grid. Values are laid out per grid index as
/// column-major M x dim blocks, so per-index slices map straight into Eigen.
///
/// Increments are drawn from counter-based streams keyed by
/// (seed, path, driver tag), which makes the ensemble bit-identical at any
/// thread count. Both drivers are simulated forward in time; the backward
/// role of B is purely a matter of which endpoint the integral sums read.
class BrownianEnsemble {
public:
    BrownianEnsemble(TimeGrid grid, int n_paths, int dim_w, int dim_b, std::uint64_t seed);

    const TimeGrid& grid() const { return grid_; }
    int n_paths() const { return n_paths_; }
    int dim_w() const { return dim_w_; }
    int dim_b() const { return dim_b_; }
    std::uint64_t seed() const { return seed_; }

    /// M x d block of W values at grid index i.
    ConstMatrixMap w_at(int i) const;
    /// M x l block of B values at grid index i.
    ConstMatrixMap b_at(int i) const;

    double w(int i, int path, int coord) const;
    double b(int i, int path, int coord) const;

    /// W or B increment over step j as an M x dim matrix.
    Eigen::MatrixXd w_increment(int j) const;
    Eigen::MatrixXd b_increment(int j) const;

    bool operator==(const BrownianEnsemble& other) const;

private:
    friend BrownianEnsemble sample_ensemble(const TimeGrid&, int, int, int, std::uint64_t, int);

    TimeGrid grid_;
    int n_paths_{0};
    int dim_w_{0};
    int dim_b_{0};
    std::uint64_t seed_{0};
    std::vector<double> w_;  // [(i*d + c)*M + m]
    std::vector<double> b_;  // [(i*l + c)*M + m]
};

/// Samples M paths of (W, B). Each increment is N(0, dt) per coordinate,
/// independent across steps, paths and coordinates; W and B use disjoint
/// streams. `threads` only partitions the work.
BrownianEnsemble sample_ensemble(const TimeGrid& grid, int n_paths, int dim_w, int dim_b,
                                 std::uint64_t seed, int threads = 1);

}  // namespace bdsvie
