#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tplcov/matrix.hpp"
#include "tplcov/scores.hpp"

namespace tplcov {

// Dense length-m weights, one per marginal / pairwise score, in vech order.
using WeightVector = std::vector<double>;

struct OptimizerConfig {
    double tol = 1e-8;              // max |coordinate change| in a sweep
    std::size_t max_sweeps = 10000;
};

// Per-coordinate penalty layout derived from S: diagonal coordinates are
// unpenalized; off-diagonal (j,k) carries weight 1/S_jk^2, which is +inf
// (coordinate pinned at zero) when S_jk == 0.
struct PenaltyLayout {
    std::vector<char> diagonal;
    std::vector<double> weight;

    explicit PenaltyLayout(const SymMatrix& s);

    bool pinned(std::size_t a) const noexcept { return !diagonal[a] && weight[a] == kPinned; }

    static constexpr double kPinned = std::numeric_limits<double>::infinity();
};

inline double soft_threshold(double x, double t) noexcept {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

// 0.5 w^T J w - w^T diag(J) + (lambda/n) sum_{j<k} |w_jk| / S_jk^2.
double objective(std::span<const double> w, const ScoreCov& jcov, const SymMatrix& s,
                 double lambda, std::size_t n);

struct CdResult {
    WeightVector weights;
    std::size_t sweeps = 0;
    bool converged = false;
};

// Cyclic coordinate descent in vech order. Diagonal coordinates take the
// exact minimizer; off-diagonal ones are soft-thresholded at
// lambda / (n S_jk^2) before dividing by J_aa. An empty `w_init` starts
// from zero. Throws DomainError when some J_aa <= 0.
CdResult coordinate_descent(const ScoreCov& jcov, const SymMatrix& s, double lambda,
                            std::size_t n, std::span<const double> w_init,
                            const OptimizerConfig& cfg = {});

struct ActiveCoordinate {
    std::size_t offset;
    int sign;  // +1 / -1 for off-diagonal members, 0 for diagonal ones
};

// Nonzero coordinates of `w` with their signs.
std::vector<ActiveCoordinate> active_set(std::span<const double> w, const PenaltyLayout& layout);

// Solves J_E w_E = diag(J)_E - (lambda/n) eta with eta_a = sign_a / S_a^2
// off the diagonal and 0 on it; w is zero off E. Throws NumericError if
// J_E is not positive definite.
WeightVector closed_form_restricted(const ScoreCov& jcov, const SymMatrix& s, double lambda,
                                    std::size_t n, std::span<const ActiveCoordinate> support);

// Largest violation of the KKT conditions of the penalized objective at w.
double kkt_residual(std::span<const double> w, const ScoreCov& jcov, const SymMatrix& s,
                    double lambda, std::size_t n);

}  // namespace tplcov
