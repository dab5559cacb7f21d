#include "tplcov/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tplcov/errors.hpp"

namespace tplcov {

SymMatrix SymMatrix::identity(std::size_t p) {
    SymMatrix out(p);
    for (std::size_t i = 0; i < p; ++i) out(i, i) = 1.0;
    return out;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols() || dense.rows() == 0) {
        throw std::invalid_argument("SymMatrix::from_dense: matrix must be square and non-empty");
    }
    const auto p = static_cast<std::size_t>(dense.rows());
    SymMatrix out(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j)
            out(i, j) = dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
    const auto p = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd out(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            out(i, j) = (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return out;
}

bool SymMatrix::is_pd() const { return cholesky_factor(*this).has_value(); }

DataMatrix::DataMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 1) {
        throw DataError("data matrix must have at least one row and one column");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
            if (!std::isfinite(rows_(i, j))) {
                throw DataError("non-finite value at row " + std::to_string(i + 1) +
                                ", column " + std::to_string(j + 1));
            }
        }
    }
}

SymMatrix sample_covariance(const DataMatrix& data, bool center) {
    if (data.n() < 2) {
        throw std::invalid_argument("sample_covariance: need at least 2 observations");
    }
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    Eigen::MatrixXd x = data.rows();
    if (center) {
        const Eigen::RowVectorXd mean = x.colwise().mean();
        x.rowwise() -= mean;
    }
    SymMatrix s(p);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) {
        const auto cj = x.col(static_cast<Eigen::Index>(j));
        for (std::size_t k = j; k < p; ++k) {
            const auto ck = x.col(static_cast<Eigen::Index>(k));
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += cj(static_cast<Eigen::Index>(i)) * ck(static_cast<Eigen::Index>(i));
            }
            s(j, k) = acc * inv_n;
        }
    }
    return s;
}

std::optional<Eigen::MatrixXd> cholesky_factor(const SymMatrix& mat) {
    const auto p = static_cast<Eigen::Index>(mat.dim());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double pivot = mat(static_cast<std::size_t>(j), static_cast<std::size_t>(j));
        for (Eigen::Index r = 0; r < j; ++r) pivot -= l(j, r) * l(j, r);
        if (!(pivot > kCholeskyPivotTol)) return std::nullopt;
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (Eigen::Index i = j + 1; i < p; ++i) {
            double v = mat(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            for (Eigen::Index r = 0; r < j; ++r) v -= l(i, r) * l(j, r);
            l(i, j) = v / d;
        }
    }
    return l;
}

}  // namespace tplcov
