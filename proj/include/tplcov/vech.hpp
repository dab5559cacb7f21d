#pragma once

#include <cstddef>
#include <utility>

namespace tplcov {

// Half-vectorization of a symmetric p x p matrix: the upper triangle
// (diagonal included) stacked row by row,
//   (1,1), (1,2), ..., (1,p), (2,2), ..., (p,p).
//
// pair_to_index / index_to_pair use 1-based indices so the position
// formula can be read off directly; VechIndex::offset is the 0-based
// storage form used everywhere else.
class VechIndex {
public:
    explicit VechIndex(std::size_t p);

    std::size_t dim() const noexcept { return p_; }
    std::size_t size() const noexcept { return m_; }

    // 0-based storage offset of (i, j), i <= j, both 0-based.
    std::size_t offset(std::size_t i, std::size_t j) const noexcept {
        return (2 * p_ + 1 - i) * i / 2 + (j - i);
    }

    // 0-based inverse of offset().
    std::pair<std::size_t, std::size_t> pair_at(std::size_t off) const;

private:
    std::size_t p_;
    std::size_t m_;
};

// Position of (j, k), 1 <= j <= k <= p, in 1..p(p+1)/2:
//   (2p + 2 - j)(j - 1)/2 + (k + 1 - j).
// Throws std::invalid_argument when out of range.
std::size_t pair_to_index(std::size_t j, std::size_t k, std::size_t p);

// Inverse of pair_to_index.
std::pair<std::size_t, std::size_t> index_to_pair(std::size_t idx, std::size_t p);

}  // namespace tplcov
