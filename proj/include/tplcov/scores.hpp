#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tplcov/matrix.hpp"

namespace tplcov {

struct ScoreEntry {
    std::size_t offset;  // 0-based vech offset
    double value;
};

// A marginal (one entry) or bivariate (three entries) Gaussian score as a
// sparse m-vector. Entries are sorted by offset.
struct SparseScoreVector {
    std::array<ScoreEntry, 3> entries{};
    std::size_t count = 0;

    std::span<const ScoreEntry> view() const noexcept { return {entries.data(), count}; }
};

// Components of the bivariate score u_jk = grad l_jk, j < k, where
//   l_jk = -log(tjj tkk - tjk^2) - (tkk xj^2 - 2 tjk xj xk + tjj xk^2) / (tjj tkk - tjk^2),
// keyed by the parameter they differentiate.
struct PairScore {
    double wrt_jj;  // u^[1], at (j,j)
    double wrt_kk;  // u^[2], at (k,k)
    double wrt_jk;  // u^[3], at (j,k)
};

// u_jj = grad of -log(theta_jj) - x_j^2 / theta_jj = (x_j^2 - theta_jj) / theta_jj^2.
// Indices are 0-based.
// Throws DomainError when theta_jj <= 0.
SparseScoreVector marginal_score(const SymMatrix& theta, std::size_t j,
                                 std::span<const double> x);

// Raw components of u_jk for a bivariate block (tjj, tkk, tjk) at (xj, xk).
// Throws DomainError unless tjj * tkk - tjk^2 > 0.
PairScore pair_score_components(double tjj, double tkk, double tjk, double xj, double xk);

// u_jk, j < k (0-based), laid out at the (j,j), (j,k), (k,k) offsets.
SparseScoreVector pairwise_score(const SymMatrix& theta, std::size_t j, std::size_t k,
                                 std::span<const double> x);

struct ScoreCovEntry {
    std::size_t col;
    double value;
};

// Empirical score covariance J = (1/n) sum_i U_i^T U_i evaluated at the
// sample covariance. Only entries whose score supports share a variable
// are stored; each row is sorted by column and includes its diagonal.
class ScoreCov {
public:
    ScoreCov(std::size_t p, std::vector<std::size_t> row_start,
             std::vector<ScoreCovEntry> entries, std::vector<double> diag);

    std::size_t dim() const noexcept { return p_; }
    std::size_t size() const noexcept { return diag_.size(); }
    std::size_t nonzeros() const noexcept { return entries_.size(); }

    std::span<const ScoreCovEntry> row(std::size_t a) const noexcept {
        return {entries_.data() + row_start_[a], row_start_[a + 1] - row_start_[a]};
    }
    std::span<const double> diag() const noexcept { return diag_; }

    // Stored value at (a, b), zero when structurally absent.
    double at(std::size_t a, std::size_t b) const;

    // sum_b J_ab v_b over the stored row.
    double row_dot(std::size_t a, std::span<const double> v) const noexcept {
        double acc = 0.0;
        for (const auto& e : row(a)) acc += e.value * v[e.col];
        return acc;
    }

    Eigen::MatrixXd to_dense() const;

private:
    std::size_t p_;
    std::vector<std::size_t> row_start_;
    std::vector<ScoreCovEntry> entries_;
    std::vector<double> diag_;
};

// Requires every 2x2 principal block of `s` to be positive definite; throws
// DomainError naming the first offending pair (1-based) otherwise.
ScoreCov build_score_covariance(const DataMatrix& data, const SymMatrix& s);

// Row `a` (0-based) of J, sorted by column, diagonal included.
inline std::span<const ScoreCovEntry> score_cov_row(const ScoreCov& jcov, std::size_t a) {
    return jcov.row(a);
}

}  // namespace tplcov
