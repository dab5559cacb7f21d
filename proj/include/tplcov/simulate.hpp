#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "tplcov/matrix.hpp"

namespace tplcov {

// Replicate streams: every random quantity comes from a std::mt19937_64
// seeded with derive_seed(master, {keys...}), where derive_seed folds the
// keys into the master seed through SplitMix64. Streams for distinct key
// tuples are independent for practical purposes, and a replicate's stream
// depends only on its keys, never on scheduling.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;
Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

enum class Structure { block_diagonal, sparse_random };

std::string_view to_string(Structure s) noexcept;
// Accepts "block" / "block_diagonal" and "random" / "sparse_random".
std::optional<Structure> parse_structure(std::string_view name) noexcept;

struct CovSpec {
    Structure structure = Structure::block_diagonal;
    std::size_t p = 2;
    double tau = 0.5;  // proportion of zero off-diagonal entries
    std::uint64_t seed = 0;
};

struct TruthSupport {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // 0-based (j,k), j < k, sorted

    std::size_t m0() const noexcept { return pairs.size(); }
};

struct Truth {
    SymMatrix theta;
    TruthSupport support;
};

// Throws std::invalid_argument unless p >= 2 and 0 < tau < 1.
void validate(const CovSpec& spec);

// b minimizing |b(b-1)/2 - (1 - tau) p(p-1)/2| over 1..p, smaller b on ties.
std::size_t block_size_for(std::size_t p, double tau);

// Unit diagonal, a leading b x b block with N(0.5, 0.05^2) off-diagonals.
// Off-diagonals shrink by 0.95 until Cholesky succeeds (at most 50 times);
// NumericError after that.
Truth gen_block_diagonal(const CovSpec& spec, Rng& rng);

// Erdos-Renyi edges with probability 1 - tau, values uniform on
// +-[0.3, 0.6], unit diagonal; off-diagonals shrink by 0.9 per round (at
// most 50) until Cholesky succeeds.
Truth gen_sparse_random(const CovSpec& spec, Rng& rng);

// Dispatches on spec.structure.
Truth generate_truth(const CovSpec& spec, Rng& rng);

// Rows L z_i with L the Cholesky factor of theta. Throws DomainError when
// theta is not PD.
DataMatrix sample_mvn(const SymMatrix& theta, std::size_t n, Rng& rng);

struct SupportMetrics {
    std::optional<double> sn;  // missing when m0 == 0
    std::optional<double> sp;  // missing when every pair is in the truth
    double ac = 0.0;
    std::size_t true_pos = 0;
    std::size_t true_neg = 0;
};

// Off-diagonal support recovery. Both pair lists are 0-based (j,k), j < k.
SupportMetrics support_metrics(const std::vector<std::pair<std::size_t, std::size_t>>& estimated,
                               const TruthSupport& truth, std::size_t p);

}  // namespace tplcov
