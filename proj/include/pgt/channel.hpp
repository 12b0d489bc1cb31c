#ifndef PGT_CHANNEL_HPP
#define PGT_CHANNEL_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgt/bitvec.hpp"
#include "pgt/design.hpp"
#include "pgt/random.hpp"

namespace pgt {

// Test-outcome vector. `flips` records which rows were corrupted after the
// clean OR computation (empty for a clean syndrome).
struct Syndrome {
    BitVec bits;
    std::vector<std::size_t> flips;

    std::string to_string() const { return bits.to_string(); }
};

// Boolean OR of the matrix columns indexed by the defective set.
inline Syndrome syndrome(const TestMatrix& mat, std::span<const std::size_t> defectives) {
    Syndrome out;
    out.bits = BitVec(mat.rows());
    const std::size_t W = mat.col_word_count();
    for (std::size_t j : defectives) {
        if (j >= mat.cols()) throw std::domain_error("syndrome: defective index out of range");
        const std::uint64_t* col = mat.col_words(j);
        for (std::size_t w = 0; w < W; ++w) out.bits.words()[w] |= col[w];
    }
    return out;
}

enum class ErrorMode { ExactlyV, UpToV };

// Flip v (ExactlyV) or a uniform count in [0, v] (UpToV) distinct rows.
inline Syndrome inject_errors(const Syndrome& s, std::size_t v, ErrorMode mode, Rng& rng) {
    const std::size_t m = s.bits.size();
    if (v > m) throw std::domain_error("inject_errors: v exceeds syndrome length");
    std::size_t count = v;
    if (mode == ErrorMode::UpToV) {
        count = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(v) + 1));
    }
    Syndrome out = s;
    if (count == 0) return out;
    out.flips = rng.distinct_subset(m, count);
    for (std::size_t row : out.flips) out.bits.flip(row);
    return out;
}

}  // namespace pgt

#endif
