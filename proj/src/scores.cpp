#include "tplcov/scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tplcov/errors.hpp"

namespace tplcov {

namespace {

std::string pair_name(std::size_t j, std::size_t k) {
    return "(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
}

}  // namespace

SparseScoreVector marginal_score(const SymMatrix& theta, std::size_t j,
                                 std::span<const double> x) {
    const double tjj = theta(j, j);
    if (!(tjj > 0.0)) {
        throw DomainError("marginal_score: theta" + pair_name(j, j) + " must be positive");
    }
    SparseScoreVector u;
    u.entries[0] = {theta.index().offset(j, j), (x[j] * x[j] - tjj) / (tjj * tjj)};
    u.count = 1;
    return u;
}

PairScore pair_score_components(double tjj, double tkk, double tjk, double xj, double xk) {
    const double det = tjj * tkk - tjk * tjk;
    if (!(det > 0.0)) {
        throw DomainError("pairwise score: bivariate block is not positive definite");
    }
    const double denom = det * det;
    const double xj2 = xj * xj;
    const double xk2 = xk * xk;
    const double xjk = xj * xk;
    const double tjk2 = tjk * tjk;

    // Gradient of l_jk = -log(det) - q / det, q = tkk xj^2 - 2 tjk xj xk + tjj xk^2.
    // Like l_jj = -log(tjj) - xj^2 / tjj it omits the 1/2 of the Gaussian
    // log-density, so marginal and bivariate scores share one scale.
    PairScore u;
    u.wrt_jj = -(tjj * tkk * tkk - tkk * tjk2 - xk2 * tjk2 - xj2 * tkk * tkk +
                 2.0 * xjk * tjk * tkk) /
               denom;
    u.wrt_kk = -(tkk * tjj * tjj - tjj * tjk2 - xj2 * tjk2 - xk2 * tjj * tjj +
                 2.0 * xjk * tjk * tjj) /
               denom;
    u.wrt_jk = -2.0 *
               (tjk2 * tjk - tjk * tjj * tkk + xj2 * tjk * tkk + xk2 * tjk * tjj -
                xjk * (tjj * tkk + tjk2)) /
               denom;
    return u;
}

SparseScoreVector pairwise_score(const SymMatrix& theta, std::size_t j, std::size_t k,
                                 std::span<const double> x) {
    if (j >= k) throw std::invalid_argument("pairwise_score: need j < k");
    PairScore c;
    try {
        c = pair_score_components(theta(j, j), theta(k, k), theta(j, k), x[j], x[k]);
    } catch (const DomainError&) {
        throw DomainError("pairwise_score: block " + pair_name(j, k) +
                          " is not positive definite");
    }
    const auto& vech = theta.index();
    SparseScoreVector u;
    // offset(j,j) < offset(j,k) < offset(k,k) for j < k.
    u.entries[0] = {vech.offset(j, j), c.wrt_jj};
    u.entries[1] = {vech.offset(j, k), c.wrt_jk};
    u.entries[2] = {vech.offset(k, k), c.wrt_kk};
    u.count = 3;
    return u;
}

ScoreCov::ScoreCov(std::size_t p, std::vector<std::size_t> row_start,
                   std::vector<ScoreCovEntry> entries, std::vector<double> diag)
    : p_(p),
      row_start_(std::move(row_start)),
      entries_(std::move(entries)),
      diag_(std::move(diag)) {
    if (row_start_.size() != diag_.size() + 1 || row_start_.back() != entries_.size()) {
        throw std::invalid_argument("ScoreCov: inconsistent row layout");
    }
}

double ScoreCov::at(std::size_t a, std::size_t b) const {
    const auto r = row(a);
    const auto it = std::lower_bound(r.begin(), r.end(), b,
                                     [](const ScoreCovEntry& e, std::size_t c) { return e.col < c; });
    return (it != r.end() && it->col == b) ? it->value : 0.0;
}

Eigen::MatrixXd ScoreCov::to_dense() const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t a = 0; a < size(); ++a)
        for (const auto& e : row(a))
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(e.col)) = e.value;
    return out;
}

// Two distinct scores overlap in at most one coordinate, the (v,v) slot of
// a shared variable v. So every off-diagonal entry of J is an entry of one
// of the p Gram matrices G_v = C_v^T C_v / n, where column l of C_v holds
// the (v,v) component of the score for pair {v, l} (the marginal when
// l == v). The diagonal additionally collects the (j,k) component of each
// bivariate score.
ScoreCov build_score_covariance(const DataMatrix& data, const SymMatrix& s) {
    const std::size_t p = s.dim();
    if (data.p() != p) {
        throw std::invalid_argument("build_score_covariance: data has " + std::to_string(data.p()) +
                                    " columns but covariance is " + std::to_string(p) + "x" +
                                    std::to_string(p));
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (!(s(j, j) > 0.0)) {
            throw DomainError("build_score_covariance: S" + pair_name(j, j) +
                              " is not positive");
        }
        for (std::size_t k = j + 1; k < p; ++k) {
            if (!(s(j, j) * s(k, k) - s(j, k) * s(j, k) > 0.0)) {
                throw DomainError("build_score_covariance: 2x2 block " + pair_name(j, k) +
                                  " of S is not positive definite");
            }
        }
    }

    const VechIndex& vech = s.index();
    const std::size_t m = vech.size();
    const auto n = static_cast<Eigen::Index>(data.n());
    const double inv_n = 1.0 / static_cast<double>(data.n());
    const Eigen::MatrixXd& x = data.rows();
    const auto pi = static_cast<Eigen::Index>(p);

    auto off = [&](std::size_t a, std::size_t b) {
        return a <= b ? vech.offset(a, b) : vech.offset(b, a);
    };

    std::vector<double> diag(m, 0.0);
    std::vector<std::vector<ScoreCovEntry>> rows(m);
    for (std::size_t v = 0; v < p; ++v) rows[vech.offset(v, v)].reserve(p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j + 1; k < p; ++k) rows[vech.offset(j, k)].reserve(2 * p - 1);

    Eigen::MatrixXd comp(n, pi);
    Eigen::MatrixXd gram(pi, pi);
    for (std::size_t v = 0; v < p; ++v) {
        const double tvv = s(v, v);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double xv = x(i, static_cast<Eigen::Index>(v));
            for (std::size_t l = 0; l < p; ++l) {
                const double xl = x(i, static_cast<Eigen::Index>(l));
                double c;
                if (l == v) {
                    c = (xv * xv - tvv) / (tvv * tvv);
                } else if (v < l) {
                    c = pair_score_components(tvv, s(l, l), s(v, l), xv, xl).wrt_jj;
                } else {
                    c = pair_score_components(s(l, l), tvv, s(l, v), xl, xv).wrt_kk;
                }
                comp(i, static_cast<Eigen::Index>(l)) = c;
            }
        }
        gram.setZero();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(comp.transpose(), inv_n);
        gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

        for (std::size_t l = 0; l < p; ++l) {
            const std::size_t a = off(v, l);
            diag[a] += gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
            for (std::size_t r = 0; r < p; ++r) {
                if (r == l) continue;
                rows[a].push_back(
                    {off(v, r), gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r))});
            }
        }
    }

    // (j,k) component of each bivariate score only meets itself.
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double u = pair_score_components(s(j, j), s(k, k), s(j, k),
                                                       x(i, static_cast<Eigen::Index>(j)),
                                                       x(i, static_cast<Eigen::Index>(k)))
                                     .wrt_jk;
                acc += u * u;
            }
            diag[vech.offset(j, k)] += acc * inv_n;
        }
    }

    std::vector<std::size_t> row_start(m + 1, 0);
    std::vector<ScoreCovEntry> entries;
    std::size_t total = 0;
    for (std::size_t a = 0; a < m; ++a) total += rows[a].size() + 1;
    entries.reserve(total);
    for (std::size_t a = 0; a < m; ++a) {
        rows[a].push_back({a, diag[a]});
        std::sort(rows[a].begin(), rows[a].end(),
                  [](const ScoreCovEntry& l, const ScoreCovEntry& r) { return l.col < r.col; });
        entries.insert(entries.end(), rows[a].begin(), rows[a].end());
        row_start[a + 1] = entries.size();
        std::vector<ScoreCovEntry>().swap(rows[a]);
    }
    return ScoreCov(p, std::move(row_start), std::move(entries), std::move(diag));
}

}  // namespace tplcov
