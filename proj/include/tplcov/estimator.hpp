#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tplcov/matrix.hpp"
#include "tplcov/optimizer.hpp"
#include "tplcov/scores.hpp"

namespace tplcov {

// n S_jk^2 / (S_jk^2 + S_jj S_kk); asymptotically chi-square(1) when
// theta_jk = 0. Indices 0-based, j < k. Throws DomainError on a zero
// diagonal.
double chi_square_stat(const SymMatrix& s, std::size_t j, std::size_t k, std::size_t n);

// Smallest lambda at which the optimum has no off-diagonal weight: with
// w_D solving the diagonal block, max_{j<k} n S_jk^2 |diag(J)_jk - J_{jk,D} w_D|.
double lambda_max(const ScoreCov& jcov, const SymMatrix& s, std::size_t n);

struct TplFit {
    SymMatrix theta_hat;
    WeightVector weights;
    std::vector<std::pair<std::size_t, std::size_t>> support;  // 0-based (j,k), j < k
    double lambda_hat = 0.0;
    std::optional<double> gamma;  // unset when lambda was given directly
    std::size_t sweeps_total = 0;
    double kkt_residual = 0.0;
    bool converged = false;
};

// Thresholded covariance: theta_jk = S_jk where w_jk != 0, 0 elsewhere,
// diagonal copied from S.
TplFit assemble_fit(const SymMatrix& s, WeightVector weights, double lambda);

// Single coordinate-descent solve at a fixed lambda, packaged as a fit.
TplFit fit_at_lambda(const ScoreCov& jcov, const SymMatrix& s, std::size_t n, double lambda,
                     const OptimizerConfig& cfg = {}, std::span<const double> w_init = {});

// True when every selected pair has chi_square_stat > gamma (strictly).
bool passes_chi_square(const TplFit& fit, const SymMatrix& s, std::size_t n, double gamma);

struct LambdaSearchConfig {
    double search_tol = 1e-3;  // relative width of the final bracket
    OptimizerConfig cd;
};

// Smallest lambda in [0, lambda_max] whose fit passes the chi-square rule,
// located by bisection with warm starts. Throws NumericError if a probe
// fails to converge.
TplFit select_lambda(const ScoreCov& jcov, const SymMatrix& s, std::size_t n, double gamma,
                     const LambdaSearchConfig& cfg = {});

struct TplOptions {
    // Exactly one of alpha / lambda. Neither set means alpha = 0.1.
    std::optional<double> alpha;
    std::optional<double> lambda;
    bool center = false;
    double search_tol = 1e-3;
    OptimizerConfig cd;
};

// sample covariance -> score covariance -> lambda rule (or fixed lambda)
// -> thresholded estimate.
TplFit tpl_estimate(const DataMatrix& data, const TplOptions& opts = {});

enum class AdjustedSeStatus { ok, nonpositive_information };

struct AdjustedSe {
    AdjustedSeStatus status = AdjustedSeStatus::ok;
    double value = 0.0;            // meaningful only when status == ok
    double information = 0.0;      // var(u_jk) - cov(u_jk, w^T u) with u_jk removed
};

// n^{-1/2} (var(u_jk) - cov(u_jk, sum_{st != jk} w_st u_st))^{-1/2}.
AdjustedSe adjusted_se(const ScoreCov& jcov, std::size_t n, const TplFit& fit, std::size_t j,
                       std::size_t k);

}  // namespace tplcov
