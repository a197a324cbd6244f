#include "bdsvie/brownian_ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "bdsvie/counter_rng.hpp"
#include "bdsvie/parallel.hpp"

namespace bdsvie {

BrownianEnsemble::BrownianEnsemble(TimeGrid grid, int n_paths, int dim_w, int dim_b,
                                   std::uint64_t seed)
    : grid_(std::move(grid)), n_paths_(n_paths), dim_w_(dim_w), dim_b_(dim_b), seed_(seed) {
    if (n_paths_ < 1) throw std::invalid_argument("BrownianEnsemble: M must be at least 1");
    if (dim_w_ < 1 || dim_b_ < 1)
        throw std::invalid_argument("BrownianEnsemble: dimensions must be positive");
    const std::size_t nodes = static_cast<std::size_t>(grid_.n_nodes());
    w_.assign(nodes * static_cast<std::size_t>(dim_w_) * static_cast<std::size_t>(n_paths_), 0.0);
    b_.assign(nodes * static_cast<std::size_t>(dim_b_) * static_cast<std::size_t>(n_paths_), 0.0);
}

ConstMatrixMap BrownianEnsemble::w_at(int i) const {
    const std::size_t off = (static_cast<std::size_t>(i) * dim_w_) * n_paths_;
    return ConstMatrixMap(w_.data() + off, n_paths_, dim_w_);
}

ConstMatrixMap BrownianEnsemble::b_at(int i) const {
    const std::size_t off = (static_cast<std::size_t>(i) * dim_b_) * n_paths_;
    return ConstMatrixMap(b_.data() + off, n_paths_, dim_b_);
}

double BrownianEnsemble::w(int i, int path, int coord) const {
    return w_[(static_cast<std::size_t>(i) * dim_w_ + coord) * n_paths_ + path];
}

double BrownianEnsemble::b(int i, int path, int coord) const {
    return b_[(static_cast<std::size_t>(i) * dim_b_ + coord) * n_paths_ + path];
}

Eigen::MatrixXd BrownianEnsemble::w_increment(int j) const {
    if (j < 0 || j >= grid_.n_steps)
        throw std::out_of_range("BrownianEnsemble: step index out of range");
    return w_at(j + 1) - w_at(j);
}

Eigen::MatrixXd BrownianEnsemble::b_increment(int j) const {
    if (j < 0 || j >= grid_.n_steps)
        throw std::out_of_range("BrownianEnsemble: step index out of range");
    return b_at(j + 1) - b_at(j);
}

bool BrownianEnsemble::operator==(const BrownianEnsemble& other) const {
    return n_paths_ == other.n_paths_ && dim_w_ == other.dim_w_ && dim_b_ == other.dim_b_ &&
           grid_.n_steps == other.grid_.n_steps && grid_.end == other.grid_.end &&
           w_ == other.w_ && b_ == other.b_;
}

namespace {

// tag 0 = W, 1 = B. The per-path stream walks Gaussians in (step, coord)
// order; cumulative sums run serially within a path.
void fill_paths(std::vector<double>& out, const TimeGrid& grid, int n_paths, int dim,
                std::uint64_t seed, int tag, int threads) {
    const int N = grid.n_steps;
    const std::size_t M = static_cast<std::size_t>(n_paths);
    const double sqrt_dt = std::sqrt(grid.dt);
    parallel_for(0, n_paths, threads, [&](int m) {
        const std::uint64_t stream = static_cast<std::uint64_t>(m) * 2 + static_cast<std::uint64_t>(tag);
        for (int c = 0; c < dim; ++c) {
            double value = 0.0;
            out[(static_cast<std::size_t>(0) * dim + c) * M + m] = 0.0;
            for (int i = 0; i < N; ++i) {
                const std::uint64_t q = static_cast<std::uint64_t>(i) * dim + c;
                value += sqrt_dt * rng::gaussian_at(seed, stream, q);
                out[(static_cast<std::size_t>(i + 1) * dim + c) * M + m] = value;
            }
        }
    });
}

}  // namespace

BrownianEnsemble sample_ensemble(const TimeGrid& grid, int n_paths, int dim_w, int dim_b,
                                 std::uint64_t seed, int threads) {
    BrownianEnsemble ens(grid, n_paths, dim_w, dim_b, seed);
    fill_paths(ens.w_, grid, n_paths, dim_w, seed, 0, threads);
    fill_paths(ens.b_, grid, n_paths, dim_b, seed, 1, threads);
    return ens;
}

}  // namespace bdsvie
