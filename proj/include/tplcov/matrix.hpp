#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tplcov/vech.hpp"

namespace tplcov {

// Dense symmetric matrix stored once, as its half-vectorization. The
// storage vector *is* vech(M), so it can be handed to the score code as
// the parameter vector theta without copying.
class SymMatrix {
public:
    SymMatrix() : index_(1), values_(1, 0.0) {}
    explicit SymMatrix(std::size_t p) : index_(p), values_(index_.size(), 0.0) {}

    static SymMatrix identity(std::size_t p);
    // Symmetric part of `dense` is not taken; only the upper triangle is read.
    static SymMatrix from_dense(const Eigen::MatrixXd& dense);

    std::size_t dim() const noexcept { return index_.dim(); }
    const VechIndex& index() const noexcept { return index_; }

    // 0-based, either triangle.
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return i <= j ? values_[index_.offset(i, j)] : values_[index_.offset(j, i)];
    }
    double& operator()(std::size_t i, std::size_t j) noexcept {
        return i <= j ? values_[index_.offset(i, j)] : values_[index_.offset(j, i)];
    }

    std::span<const double> vech() const noexcept { return values_; }

    Eigen::MatrixXd to_dense() const;

    bool is_pd() const;

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.dim() == b.dim() && a.values_ == b.values_;
    }

private:
    VechIndex index_;
    std::vector<double> values_;
};

// n observations of a p-vector, one observation per row.
class DataMatrix {
public:
    // Throws DataError on non-finite entries or an empty matrix.
    explicit DataMatrix(Eigen::MatrixXd rows);

    std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    const Eigen::MatrixXd& rows() const noexcept { return rows_; }

private:
    Eigen::MatrixXd rows_;
};

// S = (1/n) sum_i x_i x_i^T, divisor n. With `center` the column means are
// subtracted first. Requires n >= 2.
SymMatrix sample_covariance(const DataMatrix& data, bool center = false);

inline constexpr double kCholeskyPivotTol = 1e-12;

// Lower-triangular L with mat = L L^T, or nullopt if some pivot is
// <= kCholeskyPivotTol.
std::optional<Eigen::MatrixXd> cholesky_factor(const SymMatrix& mat);

}  // namespace tplcov
