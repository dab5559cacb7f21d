#include "tplcov/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tplcov/errors.hpp"
#include "tplcov/quantile.hpp"

namespace tplcov {

double chi_square_stat(const SymMatrix& s, std::size_t j, std::size_t k, std::size_t n) {
    const double sjj = s(j, j);
    const double skk = s(k, k);
    if (!(sjj > 0.0) || !(skk > 0.0)) {
        throw DomainError("chi_square_stat: zero variance in pair (" + std::to_string(j + 1) +
                          "," + std::to_string(k + 1) + ")");
    }
    const double sjk2 = s(j, k) * s(j, k);
    return static_cast<double>(n) * sjk2 / (sjk2 + sjj * skk);
}

double lambda_max(const ScoreCov& jcov, const SymMatrix& s, std::size_t n) {
    const std::size_t p = s.dim();
    const VechIndex& vech = s.index();
    const auto pi = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd block(pi, pi);
    Eigen::VectorXd rhs(pi);
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t a = vech.offset(j, j);
        rhs(static_cast<Eigen::Index>(j)) = jcov.diag()[a];
        for (std::size_t k = 0; k < p; ++k) {
            block(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                jcov.at(a, vech.offset(k, k));
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) {
        throw NumericError("lambda_max: diagonal block of the score covariance is singular");
    }
    const Eigen::VectorXd wd = llt.solve(rhs);

    WeightVector w(jcov.size(), 0.0);
    for (std::size_t j = 0; j < p; ++j) w[vech.offset(j, j)] = wd(static_cast<Eigen::Index>(j));

    double best = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) {
            const std::size_t a = vech.offset(j, k);
            const double sjk = s(j, k);
            const double r = jcov.diag()[a] - jcov.row_dot(a, w);
            best = std::max(best, static_cast<double>(n) * sjk * sjk * std::fabs(r));
        }
    }
    return best;
}

TplFit assemble_fit(const SymMatrix& s, WeightVector weights, double lambda) {
    TplFit fit;
    const std::size_t p = s.dim();
    fit.theta_hat = SymMatrix(p);
    for (std::size_t j = 0; j < p; ++j) {
        fit.theta_hat(j, j) = s(j, j);
        for (std::size_t k = j + 1; k < p; ++k) {
            if (weights[s.index().offset(j, k)] != 0.0) {
                fit.theta_hat(j, k) = s(j, k);
                fit.support.emplace_back(j, k);
            }
        }
    }
    fit.weights = std::move(weights);
    fit.lambda_hat = lambda;
    return fit;
}

TplFit fit_at_lambda(const ScoreCov& jcov, const SymMatrix& s, std::size_t n, double lambda,
                     const OptimizerConfig& cfg, std::span<const double> w_init) {
    CdResult cd = coordinate_descent(jcov, s, lambda, n, w_init, cfg);
    const double kkt = kkt_residual(cd.weights, jcov, s, lambda, n);
    TplFit fit = assemble_fit(s, std::move(cd.weights), lambda);
    fit.sweeps_total = cd.sweeps;
    fit.converged = cd.converged;
    fit.kkt_residual = kkt;
    return fit;
}

bool passes_chi_square(const TplFit& fit, const SymMatrix& s, std::size_t n, double gamma) {
    for (const auto& [j, k] : fit.support) {
        if (!(chi_square_stat(s, j, k, n) > gamma)) return false;
    }
    return true;
}

namespace {

TplFit probe(const ScoreCov& jcov, const SymMatrix& s, std::size_t n, double lambda,
             const OptimizerConfig& cfg, std::span<const double> w_init) {
    TplFit fit = fit_at_lambda(jcov, s, n, lambda, cfg, w_init);
    if (!fit.converged) {
        throw NumericError("coordinate descent did not converge within " +
                           std::to_string(cfg.max_sweeps) + " sweeps at lambda=" +
                           std::to_string(lambda));
    }
    return fit;
}

}  // namespace

TplFit select_lambda(const ScoreCov& jcov, const SymMatrix& s, std::size_t n, double gamma,
                     const LambdaSearchConfig& cfg) {
    if (!(gamma > 0.0)) throw std::invalid_argument("select_lambda: gamma must be positive");
    if (!(cfg.search_tol > 0.0 && cfg.search_tol <= 0.1)) {
        throw std::invalid_argument("select_lambda: search_tol must lie in (0, 0.1]");
    }

    const double top = lambda_max(jcov, s, n);
    std::size_t sweeps = 0;

    TplFit best = probe(jcov, s, n, 0.0, cfg.cd, {});
    sweeps += best.sweeps_total;
    if (passes_chi_square(best, s, n, gamma) || top == 0.0) {
        best.sweeps_total = sweeps;
        best.gamma = gamma;
        return best;
    }

    // At lambda_max itself the binding pair sits on the threshold, and the
    // coordinate-descent tolerance can leave it marginally active.
    WeightVector warm = best.weights;
    double hi = top;
    double margin = 1e-9;
    for (int attempt = 0;; ++attempt) {
        best = probe(jcov, s, n, hi, cfg.cd, warm);
        sweeps += best.sweeps_total;
        if (passes_chi_square(best, s, n, gamma)) break;
        if (attempt == 40) {
            throw NumericError("select_lambda: no feasible lambda found above lambda_max");
        }
        hi = top * (1.0 + margin);
        margin *= 2.0;
    }
    warm = best.weights;

    // Invariant: lo is infeasible (or zero), hi is feasible.
    double lo = 0.0;
    for (int iter = 0; iter < 200 && hi - lo > cfg.search_tol * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        TplFit fit = probe(jcov, s, n, mid, cfg.cd, warm);
        sweeps += fit.sweeps_total;
        warm = fit.weights;
        if (passes_chi_square(fit, s, n, gamma)) {
            hi = mid;
            best = std::move(fit);
        } else {
            lo = mid;
        }
    }
    best.sweeps_total = sweeps;
    best.gamma = gamma;
    return best;
}

TplFit tpl_estimate(const DataMatrix& data, const TplOptions& opts) {
    if (opts.alpha && opts.lambda) {
        throw std::invalid_argument("tpl_estimate: give either alpha or lambda, not both");
    }
    const SymMatrix s = sample_covariance(data, opts.center);
    const ScoreCov jcov = build_score_covariance(data, s);
    if (opts.lambda) {
        if (!(*opts.lambda >= 0.0)) throw std::invalid_argument("tpl_estimate: lambda must be >= 0");
        return fit_at_lambda(jcov, s, data.n(), *opts.lambda, opts.cd);
    }
    const double gamma = chisq1_quantile(opts.alpha.value_or(0.1));
    return select_lambda(jcov, s, data.n(), gamma, {opts.search_tol, opts.cd});
}

AdjustedSe adjusted_se(const ScoreCov& jcov, std::size_t n, const TplFit& fit, std::size_t j,
                       std::size_t k) {
    const VechIndex& vech = fit.theta_hat.index();
    const std::size_t a = j <= k ? vech.offset(j, k) : vech.offset(k, j);
    const double var = jcov.diag()[a];
    const double cov = jcov.row_dot(a, fit.weights) - var * fit.weights[a];
    AdjustedSe out;
    out.information = var - cov;
    if (!(out.information > 0.0)) {
        out.status = AdjustedSeStatus::nonpositive_information;
        return out;
    }
    out.value = 1.0 / std::sqrt(static_cast<double>(n) * out.information);
    return out;
}

}  // namespace tplcov
