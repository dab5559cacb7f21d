#include "tplcov/vech.hpp"

#include <stdexcept>
#include <string>

namespace tplcov {

VechIndex::VechIndex(std::size_t p) : p_(p), m_(p * (p + 1) / 2) {
    if (p < 1) {
        throw std::invalid_argument("VechIndex: dimension must be positive");
    }
}

std::pair<std::size_t, std::size_t> VechIndex::pair_at(std::size_t off) const {
    if (off >= m_) {
        throw std::invalid_argument("VechIndex: offset " + std::to_string(off) +
                                    " out of range for m=" + std::to_string(m_));
    }
    // Row i holds p - i entries; walk rows until the offset falls inside.
    std::size_t i = 0;
    std::size_t row_start = 0;
    while (off >= row_start + (p_ - i)) {
        row_start += p_ - i;
        ++i;
    }
    return {i, i + (off - row_start)};
}

std::size_t pair_to_index(std::size_t j, std::size_t k, std::size_t p) {
    if (j < 1 || j > k || k > p) {
        throw std::invalid_argument("pair_to_index: need 1 <= j <= k <= p, got (" +
                                    std::to_string(j) + "," + std::to_string(k) +
                                    ") with p=" + std::to_string(p));
    }
    return (2 * p + 2 - j) * (j - 1) / 2 + (k + 1 - j);
}

std::pair<std::size_t, std::size_t> index_to_pair(std::size_t idx, std::size_t p) {
    const VechIndex vech(p);
    if (idx < 1 || idx > vech.size()) {
        throw std::invalid_argument("index_to_pair: index " + std::to_string(idx) +
                                    " outside 1.." + std::to_string(vech.size()));
    }
    auto [i, j] = vech.pair_at(idx - 1);
    return {i + 1, j + 1};
}

}  // namespace tplcov
