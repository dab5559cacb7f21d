#pragma once

// Test-side reference implementations. They follow the definitions directly
// (dense matrices, explicit loops, textbook series) and share no code paths
// with the library beyond its public data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tplcov/matrix.hpp"
#include "tplcov/scores.hpp"
#include "tplcov/simulate.hpp"

namespace oracle {

// Regularized lower incomplete gamma P(1/2, x/2) by its power series.
inline double chisq1_cdf(double x) {
    if (x <= 0.0) return 0.0;
    const double a = 0.5;
    const double z = x / 2.0;
    double term = 1.0 / std::tgamma(a + 1.0);
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= z / (a + k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return std::pow(z, a) * std::exp(-z) * sum;
}

// Upper-alpha quantile of chi-square(1) by bisection on the series CDF.
inline double chisq1_quantile(double alpha) {
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (1.0 - chisq1_cdf(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Log-likelihood terms as written in the model, without the Gaussian 1/2.
inline double ell_marginal(double t, double x) { return -std::log(t) - x * x / t; }

inline double ell_pair(double tjj, double tkk, double tjk, double xj, double xk) {
    const double d = tjj * tkk - tjk * tjk;
    return -std::log(d) - (tkk * xj * xj - 2.0 * tjk * xj * xk + tjj * xk * xk) / d;
}

// Central differences of ell_pair in (tjj, tkk, tjk).
struct FdGrad {
    double jj, kk, jk;
};

inline FdGrad fd_pair_gradient(double tjj, double tkk, double tjk, double xj, double xk,
                               double h = 1e-6) {
    auto f = [&](double a, double b, double c) { return ell_pair(a, b, c, xj, xk); };
    const double hj = h * std::max(1.0, std::abs(tjj));
    const double hk = h * std::max(1.0, std::abs(tkk));
    const double hc = h * std::max(1.0, std::abs(tjk));
    return {(f(tjj + hj, tkk, tjk) - f(tjj - hj, tkk, tjk)) / (2 * hj),
            (f(tjj, tkk + hk, tjk) - f(tjj, tkk - hk, tjk)) / (2 * hk),
            (f(tjj, tkk, tjk + hc) - f(tjj, tkk, tjk - hc)) / (2 * hc)};
}

inline double fd_marginal_gradient(double t, double x, double h = 1e-6) {
    const double ht = h * std::max(1.0, std::abs(t));
    return (ell_marginal(t + ht, x) - ell_marginal(t - ht, x)) / (2 * ht);
}

// Dense score matrix for one observation, m entries in vech order, and
// J = (1/n) sum_i U_i^T U_i by explicit m x m accumulation.
inline Eigen::MatrixXd dense_score_cov(const tplcov::DataMatrix& data,
                                       const tplcov::SymMatrix& s) {
    const std::size_t p = s.dim();
    const std::size_t m = p * (p + 1) / 2;
    const std::size_t n = data.n();
    Eigen::MatrixXd u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    u.setZero();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(p);
        for (std::size_t c = 0; c < p; ++c)
            x[c] = data.rows()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        // One row per score (score a = index of its own pair), m columns.
        Eigen::MatrixXd ui = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                   static_cast<Eigen::Index>(m));
        std::size_t a = 0;
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = r; c < p; ++c, ++a) {
                const auto sc = r == c ? tplcov::marginal_score(s, r, x)
                                       : tplcov::pairwise_score(s, r, c, x);
                for (const auto& e : sc.view())
                    ui(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(e.offset)) = e.value;
            }
        }
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(m); ++r)
            for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(m); ++c) {
                double acc = 0.0;
                for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(m); ++t)
                    acc += ui(r, t) * ui(c, t);
                j(r, c) += acc;
            }
    }
    return j / static_cast<double>(n);
}

// Penalty thresholds lambda / (n S_a^2) per coordinate, 0 on the diagonal,
// +inf where S_a == 0.
inline std::vector<double> thresholds(const tplcov::SymMatrix& s, double lambda, std::size_t n) {
    std::vector<double> t;
    const std::size_t p = s.dim();
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = r; c < p; ++c) {
            if (r == c) {
                t.push_back(0.0);
            } else if (s(r, c) == 0.0) {
                t.push_back(std::numeric_limits<double>::infinity());
            } else {
                t.push_back(lambda / (static_cast<double>(n) * s(r, c) * s(r, c)));
            }
        }
    return t;
}

inline double dense_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& j,
                              const std::vector<double>& thr) {
    double pen = 0.0;
    for (Eigen::Index a = 0; a < w.size(); ++a)
        if (w(a) != 0.0) pen += thr[static_cast<std::size_t>(a)] * std::abs(w(a));
    return 0.5 * w.dot(j * w) - w.dot(j.diagonal()) + pen;
}

// Proximal-gradient iterations on the dense problem, step 1/L.
inline Eigen::VectorXd dense_prox_solve(const Eigen::MatrixXd& j, const std::vector<double>& thr,
                                        std::size_t max_iter = 1000000) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    const double step = 1.0 / es.eigenvalues().maxCoeff();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(j.rows());
    const Eigen::VectorXd h = j.diagonal();
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd g = j * w - h;
        Eigen::VectorXd next = w - step * g;
        double change = 0.0;
        for (Eigen::Index a = 0; a < w.size(); ++a) {
            const double t = thr[static_cast<std::size_t>(a)];
            double v;
            if (std::isinf(t)) {
                v = 0.0;
            } else {
                const double mag = std::abs(next(a)) - step * t;
                v = mag > 0.0 ? std::copysign(mag, next(a)) : 0.0;
            }
            change = std::max(change, std::abs(v - w(a)));
            next(a) = v;
        }
        w = next;
        if (change < 1e-16) break;
    }
    return w;
}

inline tplcov::SymMatrix random_pd(std::size_t p, tplcov::Rng& rng, double ridge = 0.5) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = z(rng);
    Eigen::MatrixXd t = a * a.transpose() / static_cast<double>(p);
    t.diagonal().array() += ridge;
    return tplcov::SymMatrix::from_dense(t);
}

inline tplcov::DataMatrix gaussian_data(std::size_t n, std::size_t p, tplcov::Rng& rng) {
    return tplcov::sample_mvn(random_pd(p, rng), n, rng);
}

// Every sign pattern of each base row: all cross products cancel exactly, so
// S is exactly diagonal while the marginal scores still vary.
inline tplcov::DataMatrix orthogonal_sign_data(const std::vector<std::vector<double>>& base,
                                               const std::vector<bool>& flip) {
    const std::size_t p = base.front().size();
    std::vector<std::size_t> flipped;
    for (std::size_t c = 0; c < p; ++c)
        if (flip[c]) flipped.push_back(c);
    const std::size_t patterns = std::size_t{1} << flipped.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(base.size() * patterns),
                      static_cast<Eigen::Index>(p));
    Eigen::Index row = 0;
    for (const auto& b : base)
        for (std::size_t mask = 0; mask < patterns; ++mask, ++row) {
            for (std::size_t c = 0; c < p; ++c) x(row, static_cast<Eigen::Index>(c)) = b[c];
            for (std::size_t f = 0; f < flipped.size(); ++f)
                if (mask & (std::size_t{1} << f))
                    x(row, static_cast<Eigen::Index>(flipped[f])) *= -1.0;
        }
    return tplcov::DataMatrix(std::move(x));
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace oracle
