#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "bdsvie/brownian_ensemble.hpp"
#include "bdsvie/time_grid.hpp"

namespace bdsvie {

/// Per-path k-vector process on grid nodes 0..N. Block at index i is an
/// M x k column-major matrix.
class DiagonalProcess {
public:
    DiagonalProcess() = default;
    DiagonalProcess(TimeGrid grid, int n_paths, int k);

    const TimeGrid& grid() const { return grid_; }
    int n_paths() const { return n_paths_; }
    int dim() const { return k_; }

    MatrixMap at(int i);
    ConstMatrixMap at(int i) const;

    void set_zero();
    bool all_finite() const;

private:
    TimeGrid grid_;
    int n_paths_{0};
    int k_{0};
    std::vector<double> data_;
};

/// Volterra unknown Z(t_i, s_j) on the discrete triangle 0 <= i <= j <= N-1.
/// Each cell holds, per path, a k x d matrix flattened row-major into k*d
/// columns (column q = row a * d + col b). Out-of-triangle access throws.
class TriangularField {
public:
    TriangularField() = default;
    TriangularField(TimeGrid grid, int n_paths, int k, int d);

    const TimeGrid& grid() const { return grid_; }
    int n_paths() const { return n_paths_; }
    int dim_k() const { return k_; }
    int dim_d() const { return d_; }

    bool in_triangle(int i, int j) const {
        return i >= 0 && i <= j && j <= grid_.n_steps - 1;
    }

    MatrixMap at(int i, int j);
    ConstMatrixMap at(int i, int j) const;

    void set_zero();
    bool all_finite() const;

    /// Number of triangle cells, N(N+1)/2.
    std::size_t n_cells() const { return n_cells_; }

private:
    std::size_t cell_offset(int i, int j) const;

    TimeGrid grid_;
    int n_paths_{0};
    int k_{0};
    int d_{0};
    std::size_t n_cells_{0};
    std::vector<std::size_t> row_offset_;
    std::vector<double> data_;
};

}  // namespace bdsvie
