#include "tplcov/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tplcov/errors.hpp"

namespace tplcov {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(master, keys));
}

std::string_view to_string(Structure s) noexcept {
    return s == Structure::block_diagonal ? "block" : "random";
}

std::optional<Structure> parse_structure(std::string_view name) noexcept {
    if (name == "block" || name == "block_diagonal") return Structure::block_diagonal;
    if (name == "random" || name == "sparse_random") return Structure::sparse_random;
    return std::nullopt;
}

void validate(const CovSpec& spec) {
    if (spec.p < 2) throw std::invalid_argument("covariance spec: p must be at least 2");
    if (!(spec.tau > 0.0 && spec.tau < 1.0)) {
        throw std::invalid_argument("covariance spec: tau must lie in (0, 1)");
    }
}

std::size_t block_size_for(std::size_t p, double tau) {
    const double target = (1.0 - tau) * static_cast<double>(p * (p - 1)) / 2.0;
    std::size_t best = 1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t b = 1; b <= p; ++b) {
        const double gap = std::fabs(static_cast<double>(b * (b - 1)) / 2.0 - target);
        if (gap < best_gap) {
            best_gap = gap;
            best = b;
        }
    }
    return best;
}

namespace {

// Multiplies every off-diagonal by `factor` until theta is PD.
void shrink_until_pd(SymMatrix& theta, double factor, int max_rounds) {
    for (int round = 0; !theta.is_pd(); ++round) {
        if (round == max_rounds) {
            throw NumericError("covariance generator: not positive definite after " +
                               std::to_string(max_rounds) + " shrinkage rounds");
        }
        const std::size_t p = theta.dim();
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k) theta(j, k) *= factor;
    }
}

}  // namespace

Truth gen_block_diagonal(const CovSpec& spec, Rng& rng) {
    validate(spec);
    if (spec.structure != Structure::block_diagonal) {
        throw std::invalid_argument("gen_block_diagonal: spec is not block diagonal");
    }
    const std::size_t b = block_size_for(spec.p, spec.tau);
    Truth out{SymMatrix::identity(spec.p), {}};
    std::normal_distribution<double> entry(0.5, 0.05);
    for (std::size_t j = 0; j < b; ++j) {
        for (std::size_t k = j + 1; k < b; ++k) {
            out.theta(j, k) = entry(rng);
            out.support.pairs.emplace_back(j, k);
        }
    }
    shrink_until_pd(out.theta, 0.95, 50);
    return out;
}

Truth gen_sparse_random(const CovSpec& spec, Rng& rng) {
    validate(spec);
    if (spec.structure != Structure::sparse_random) {
        throw std::invalid_argument("gen_sparse_random: spec is not sparse_random");
    }
    Truth out{SymMatrix::identity(spec.p), {}};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(0.3, 0.6);
    const double edge_prob = 1.0 - spec.tau;
    for (std::size_t j = 0; j < spec.p; ++j) {
        for (std::size_t k = j + 1; k < spec.p; ++k) {
            if (unit(rng) >= edge_prob) continue;
            const double v = magnitude(rng);
            out.theta(j, k) = unit(rng) < 0.5 ? -v : v;
            out.support.pairs.emplace_back(j, k);
        }
    }
    shrink_until_pd(out.theta, 0.9, 50);
    return out;
}

Truth generate_truth(const CovSpec& spec, Rng& rng) {
    return spec.structure == Structure::block_diagonal ? gen_block_diagonal(spec, rng)
                                                       : gen_sparse_random(spec, rng);
}

DataMatrix sample_mvn(const SymMatrix& theta, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_mvn: n must be positive");
    const auto chol = cholesky_factor(theta);
    if (!chol) throw DomainError("sample_mvn: covariance is not positive definite");
    const auto p = static_cast<Eigen::Index>(theta.dim());
    std::normal_distribution<double> std_normal(0.0, 1.0);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = std_normal(rng);
    // Row i is (L z_i)^T = z_i^T L^T.
    Eigen::MatrixXd x = z * chol->transpose();
    return DataMatrix(std::move(x));
}

SupportMetrics support_metrics(const std::vector<std::pair<std::size_t, std::size_t>>& estimated,
                               const TruthSupport& truth, std::size_t p) {
    const VechIndex vech(p);
    std::vector<char> in_est(vech.size(), 0);
    std::vector<char> in_truth(vech.size(), 0);
    auto mark = [&](const auto& pairs, std::vector<char>& flags) {
        for (const auto& [j, k] : pairs) {
            if (j >= k || k >= p) {
                throw std::invalid_argument("support_metrics: pair outside the upper triangle");
            }
            flags[vech.offset(j, k)] = 1;
        }
    };
    mark(estimated, in_est);
    mark(truth.pairs, in_truth);

    SupportMetrics out;
    std::size_t m0 = 0;
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) {
            const std::size_t a = vech.offset(j, k);
            m0 += in_truth[a];
            if (in_truth[a] && in_est[a]) ++out.true_pos;
            if (!in_truth[a] && !in_est[a]) ++out.true_neg;
        }
    }
    const std::size_t total = p * (p - 1) / 2;
    if (m0 > 0) out.sn = static_cast<double>(out.true_pos) / static_cast<double>(m0);
    if (m0 < total) out.sp = static_cast<double>(out.true_neg) / static_cast<double>(total - m0);
    out.ac = static_cast<double>(out.true_pos + out.true_neg) / static_cast<double>(total);
    return out;
}

}  // namespace tplcov
