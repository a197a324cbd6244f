#include "bdsvie/paths.hpp"

#include <cmath>

namespace bdsvie {

DiagonalProcess::DiagonalProcess(TimeGrid grid, int n_paths, int k)
    : grid_(std::move(grid)), n_paths_(n_paths), k_(k) {
    if (n_paths_ < 1 || k_ < 1)
        throw std::invalid_argument("DiagonalProcess: M and k must be positive");
    data_.assign(static_cast<std::size_t>(grid_.n_nodes()) * n_paths_ * k_, 0.0);
}

MatrixMap DiagonalProcess::at(int i) {
    if (i < 0 || i > grid_.n_steps)
        throw std::out_of_range("DiagonalProcess: index out of range");
    return MatrixMap(data_.data() + static_cast<std::size_t>(i) * n_paths_ * k_, n_paths_, k_);
}

ConstMatrixMap DiagonalProcess::at(int i) const {
    if (i < 0 || i > grid_.n_steps)
        throw std::out_of_range("DiagonalProcess: index out of range");
    return ConstMatrixMap(data_.data() + static_cast<std::size_t>(i) * n_paths_ * k_, n_paths_,
                          k_);
}

void DiagonalProcess::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool DiagonalProcess::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

TriangularField::TriangularField(TimeGrid grid, int n_paths, int k, int d)
    : grid_(std::move(grid)), n_paths_(n_paths), k_(k), d_(d) {
    if (n_paths_ < 1 || k_ < 1 || d_ < 1)
        throw std::invalid_argument("TriangularField: M, k, d must be positive");
    const int N = grid_.n_steps;
    row_offset_.resize(static_cast<std::size_t>(N));
    std::size_t cells = 0;
    for (int i = 0; i < N; ++i) {
        row_offset_[static_cast<std::size_t>(i)] = cells;
        cells += static_cast<std::size_t>(N - i);
    }
    n_cells_ = cells;
    data_.assign(cells * n_paths_ * k_ * d_, 0.0);
}

std::size_t TriangularField::cell_offset(int i, int j) const {
    if (!in_triangle(i, j)) throw std::out_of_range("TriangularField: (i, j) outside triangle");
    return (row_offset_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - i)) *
           static_cast<std::size_t>(n_paths_) * k_ * d_;
}

MatrixMap TriangularField::at(int i, int j) {
    return MatrixMap(data_.data() + cell_offset(i, j), n_paths_, k_ * d_);
}

ConstMatrixMap TriangularField::at(int i, int j) const {
    return ConstMatrixMap(data_.data() + cell_offset(i, j), n_paths_, k_ * d_);
}

void TriangularField::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool TriangularField::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace bdsvie
