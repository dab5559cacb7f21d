#include "tplcov/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tplcov/errors.hpp"

namespace tplcov {

PenaltyLayout::PenaltyLayout(const SymMatrix& s) {
    const std::size_t p = s.dim();
    const std::size_t m = s.index().size();
    diagonal.assign(m, 0);
    weight.assign(m, 0.0);
    std::size_t a = 0;
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k, ++a) {
            if (j == k) {
                diagonal[a] = 1;
            } else {
                const double sjk = s(j, k);
                weight[a] = sjk == 0.0 ? kPinned : 1.0 / (sjk * sjk);
            }
        }
    }
}

namespace {

void check_sizes(std::span<const double> w, const ScoreCov& jcov, const SymMatrix& s) {
    if (jcov.dim() != s.dim()) {
        throw std::invalid_argument("score covariance and S have different dimensions");
    }
    if (w.size() != jcov.size()) {
        throw std::invalid_argument("weight vector has length " + std::to_string(w.size()) +
                                    ", expected " + std::to_string(jcov.size()));
    }
}

}  // namespace

double objective(std::span<const double> w, const ScoreCov& jcov, const SymMatrix& s,
                 double lambda, std::size_t n) {
    check_sizes(w, jcov, s);
    const PenaltyLayout layout(s);
    const auto diag = jcov.diag();
    double quad = 0.0;
    double lin = 0.0;
    double pen = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (w[a] == 0.0) continue;
        quad += w[a] * jcov.row_dot(a, w);
        lin += w[a] * diag[a];
        if (!layout.diagonal[a]) pen += std::fabs(w[a]) * layout.weight[a];
    }
    return 0.5 * quad - lin + lambda / static_cast<double>(n) * pen;
}

CdResult coordinate_descent(const ScoreCov& jcov, const SymMatrix& s, double lambda,
                            std::size_t n, std::span<const double> w_init,
                            const OptimizerConfig& cfg) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("coordinate_descent: lambda must be >= 0");
    if (n == 0) throw std::invalid_argument("coordinate_descent: n must be positive");
    if (!(cfg.tol > 0.0) || cfg.max_sweeps < 1) {
        throw std::invalid_argument("coordinate_descent: need tol > 0 and max_sweeps >= 1");
    }
    const std::size_t m = jcov.size();
    const auto diag = jcov.diag();
    for (std::size_t a = 0; a < m; ++a) {
        if (!(diag[a] > 0.0)) {
            throw DomainError("coordinate_descent: score covariance diagonal entry " +
                              std::to_string(a + 1) + " is not positive");
        }
    }

    CdResult out;
    if (w_init.empty()) {
        out.weights.assign(m, 0.0);
    } else {
        out.weights.assign(w_init.begin(), w_init.end());
    }
    check_sizes(out.weights, jcov, s);

    const PenaltyLayout layout(s);
    auto& w = out.weights;
    for (std::size_t a = 0; a < m; ++a)
        if (layout.pinned(a)) w[a] = 0.0;

    const double scale = lambda / static_cast<double>(n);
    while (out.sweeps < cfg.max_sweeps) {
        ++out.sweeps;
        double max_change = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            if (layout.pinned(a)) continue;
            const double jaa = diag[a];
            const double r = diag[a] - (jcov.row_dot(a, w) - jaa * w[a]);
            const double next =
                layout.diagonal[a] ? r / jaa : soft_threshold(r, scale * layout.weight[a]) / jaa;
            max_change = std::max(max_change, std::fabs(next - w[a]));
            w[a] = next;
        }
        if (max_change <= cfg.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<ActiveCoordinate> active_set(std::span<const double> w, const PenaltyLayout& layout) {
    std::vector<ActiveCoordinate> out;
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (w[a] == 0.0) continue;
        const int sign = layout.diagonal[a] ? 0 : (w[a] > 0.0 ? 1 : -1);
        out.push_back({a, sign});
    }
    return out;
}

WeightVector closed_form_restricted(const ScoreCov& jcov, const SymMatrix& s, double lambda,
                                    std::size_t n, std::span<const ActiveCoordinate> support) {
    if (jcov.dim() != s.dim()) {
        throw std::invalid_argument("score covariance and S have different dimensions");
    }
    const PenaltyLayout layout(s);
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd sub(k, k);
    Eigen::VectorXd rhs(k);
    const double scale = lambda / static_cast<double>(n);
    for (Eigen::Index r = 0; r < k; ++r) {
        const auto& ar = support[static_cast<std::size_t>(r)];
        if (ar.offset >= jcov.size()) {
            throw std::invalid_argument("closed_form_restricted: support offset out of range");
        }
        const double eta = layout.diagonal[ar.offset] ? 0.0 : ar.sign * layout.weight[ar.offset];
        rhs(r) = jcov.diag()[ar.offset] - scale * eta;
        for (Eigen::Index c = 0; c < k; ++c) {
            sub(r, c) = jcov.at(ar.offset, support[static_cast<std::size_t>(c)].offset);
        }
    }
    WeightVector w(jcov.size(), 0.0);
    if (k == 0) return w;
    const Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) {
        throw NumericError("closed_form_restricted: restricted score covariance is singular");
    }
    const Eigen::VectorXd sol = llt.solve(rhs);
    for (Eigen::Index r = 0; r < k; ++r) w[support[static_cast<std::size_t>(r)].offset] = sol(r);
    return w;
}

double kkt_residual(std::span<const double> w, const ScoreCov& jcov, const SymMatrix& s,
                    double lambda, std::size_t n) {
    check_sizes(w, jcov, s);
    const PenaltyLayout layout(s);
    const double scale = lambda / static_cast<double>(n);
    double worst = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (layout.pinned(a)) continue;
        const double grad = jcov.row_dot(a, w) - jcov.diag()[a];
        double v;
        if (layout.diagonal[a]) {
            v = std::fabs(grad);
        } else if (w[a] != 0.0) {
            v = std::fabs(grad + scale * (w[a] > 0.0 ? 1.0 : -1.0) * layout.weight[a]);
        } else {
            v = std::max(0.0, std::fabs(grad) - scale * layout.weight[a]);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace tplcov
