#include "treebound/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace treebound {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j];
    return s;
}

double DenseMatrix::min_entry() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::min(m, v);
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    if (x.size() != cols_) {
        throw std::invalid_argument("DenseMatrix::apply: dimension mismatch");
    }
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        const double* r = data_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

bool is_row_stochastic(const DenseMatrix& m, double tol) {
    if (!m.square() || m.rows() == 0) return false;
    if (m.min_entry() < -tol) return false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (std::abs(m.row_sum(i) - 1.0) > tol) return false;
    }
    return true;
}

}  // namespace treebound
