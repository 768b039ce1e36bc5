#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace treebound {

// Dense row-major matrix of doubles. Sized for the small systems this library
// works with (comparison matrices of the tree depth, system matrices of the
// agent count); no BLAS, no views.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    double row_sum(std::size_t i) const;
    double min_entry() const;
    bool all_finite() const;

    // y = M x; requires x.size() == cols().
    std::vector<double> apply(std::span<const double> x) const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Nonnegative entries and unit row sums, both within tol.
bool is_row_stochastic(const DenseMatrix& m, double tol = 1e-12);

}  // namespace treebound
