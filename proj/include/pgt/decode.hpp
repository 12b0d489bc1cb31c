#ifndef PGT_DECODE_HPP
#define PGT_DECODE_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pgt/channel.hpp"
#include "pgt/design.hpp"
#include "pgt/errors.hpp"

namespace pgt {

enum class DecodeStatus { Unique, Ambiguous, NoConsistentSet };

inline const char* decode_status_tag(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::Unique:          return "unique";
        case DecodeStatus::Ambiguous:       return "ambiguous";
        case DecodeStatus::NoConsistentSet: return "none";
    }
    return "unique";
}

struct DecodeResult {
    std::vector<std::size_t> recovered;  // sorted column indices
    DecodeStatus status = DecodeStatus::Unique;
};

namespace detail {

// An all-zero column is untestable: when the syndrome is the zero vector it
// cannot be told apart from a non-defective, so it is never reported then.
inline bool column_admissible(const TestMatrix& mat, std::size_t j, bool y_is_zero) {
    if (!y_is_zero) return true;
    return mat.column_weight(j) != 0;
}

}  // namespace detail

// Support-inclusion decoder: every column whose support lies inside the
// syndrome's support is declared defective. O(mn) bit operations.
inline DecodeResult decode_support(const TestMatrix& mat, const Syndrome& y) {
    if (y.bits.size() != mat.rows()) throw std::invalid_argument("decode_support: dimension mismatch");
    const bool y_zero = y.bits.none();
    const std::size_t W = mat.col_word_count();
    DecodeResult out;
    for (std::size_t j = 0; j < mat.cols(); ++j) {
        const std::uint64_t* col = mat.col_words(j);
        bool subset = true;
        for (std::size_t w = 0; w < W; ++w) {
            if (col[w] & ~y.bits.words()[w]) { subset = false; break; }
        }
        if (subset && detail::column_admissible(mat, j, y_zero)) out.recovered.push_back(j);
    }
    out.status = DecodeStatus::Unique;
    return out;
}

// Threshold decoder for noisy syndromes: column j is declared defective when
// N_j = #{rows where the column has 1 but the syndrome has 0} is at most v.
inline DecodeResult decode_threshold(const TestMatrix& mat, const Syndrome& y, std::size_t v) {
    if (y.bits.size() != mat.rows()) throw std::invalid_argument("decode_threshold: dimension mismatch");
    const bool y_zero = y.bits.none();
    const std::size_t W = mat.col_word_count();
    DecodeResult out;
    for (std::size_t j = 0; j < mat.cols(); ++j) {
        const std::uint64_t* col = mat.col_words(j);
        std::size_t nj = 0;
        for (std::size_t w = 0; w < W; ++w) {
            nj += static_cast<std::size_t>(std::popcount(col[w] & ~y.bits.words()[w]));
            if (nj > v) break;
        }
        if (nj <= v && detail::column_admissible(mat, j, y_zero)) out.recovered.push_back(j);
    }
    out.status = DecodeStatus::Unique;
    return out;
}

inline constexpr std::uint64_t kDefaultMlBudget = 10'000'000;

// Noiseless maximum-likelihood decoding reduces to OR-consistency: enumerate
// candidate sets of size <= d_max and keep the inclusion-minimal consistent
// ones. Exactly one minimal set -> Unique; several incomparable minimal sets
// -> Ambiguous (ties count as errors); none -> NoConsistentSet. The reported
// set for Ambiguous is the first minimal set in (size, lexicographic) order.
inline DecodeResult decode_ml(const TestMatrix& mat, const Syndrome& y, std::size_t d_max,
                              std::uint64_t budget = kDefaultMlBudget) {
    if (y.bits.size() != mat.rows()) throw std::invalid_argument("decode_ml: dimension mismatch");
    const std::size_t n = mat.cols();
    d_max = std::min(d_max, n);

    double work = 1.0, binom = 1.0;
    for (std::size_t k = 1; k <= d_max; ++k) {
        binom *= static_cast<double>(n - k + 1) / static_cast<double>(k);
        work += binom;
        if (work > static_cast<double>(budget)) {
            throw BudgetExceeded("decode_ml: subset enumeration exceeds budget");
        }
    }

    DecodeResult out;
    if (y.bits.none()) {
        // The empty set explains a zero syndrome and is contained in every
        // other candidate, so it is the unique minimal consistent set.
        out.status = DecodeStatus::Unique;
        return out;
    }

    // Only nonzero columns inside the syndrome support can appear in a
    // minimal consistent set.
    std::vector<std::size_t> cand;
    const std::size_t W = mat.col_word_count();
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t* col = mat.col_words(j);
        bool subset = true, nonzero = false;
        for (std::size_t w = 0; w < W; ++w) {
            if (col[w] & ~y.bits.words()[w]) { subset = false; break; }
            if (col[w]) nonzero = true;
        }
        if (subset && nonzero) cand.push_back(j);
    }

    std::vector<std::vector<std::size_t>> minimal;
    const auto contains_some_minimal = [&](const std::vector<std::size_t>& set) {
        for (const auto& ms : minimal) {
            if (std::includes(set.begin(), set.end(), ms.begin(), ms.end())) return true;
        }
        return false;
    };

    std::vector<std::uint64_t> acc(W);
    std::vector<std::size_t> pick;
    const std::size_t c = cand.size();
    for (std::size_t k = 1; k <= std::min(d_max, c); ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            pick.clear();
            for (std::size_t i = 0; i < k; ++i) pick.push_back(cand[idx[i]]);
            std::fill(acc.begin(), acc.end(), 0);
            for (std::size_t j : pick) {
                const std::uint64_t* col = mat.col_words(j);
                for (std::size_t w = 0; w < W; ++w) acc[w] |= col[w];
            }
            bool consistent = true;
            for (std::size_t w = 0; w < W; ++w) {
                if (acc[w] != y.bits.words()[w]) { consistent = false; break; }
            }
            if (consistent && !contains_some_minimal(pick)) minimal.push_back(pick);

            std::size_t pos = k;
            while (pos-- > 0) {
                if (idx[pos] != pos + c - k) break;
                if (pos == 0) goto size_done;
            }
            ++idx[pos];
            for (std::size_t i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
    size_done:;
    }

    if (minimal.empty()) {
        out.status = DecodeStatus::NoConsistentSet;
    } else if (minimal.size() == 1) {
        out.status = DecodeStatus::Unique;
        out.recovered = minimal.front();
    } else {
        out.status = DecodeStatus::Ambiguous;
        out.recovered = minimal.front();
    }
    return out;
}

}  // namespace pgt

#endif
