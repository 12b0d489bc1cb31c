#ifndef PGT_DESIGN_HPP
#define PGT_DESIGN_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgt/bitvec.hpp"
#include "pgt/dist.hpp"
#include "pgt/errors.hpp"
#include "pgt/random.hpp"

namespace pgt {

enum class MatrixMethod { Bernoulli, ChengDu, Identity, External };

inline std::string method_tag(MatrixMethod m) {
    switch (m) {
        case MatrixMethod::Bernoulli: return "bernoulli";
        case MatrixMethod::ChengDu:   return "chengdu";
        case MatrixMethod::Identity:  return "identity";
        case MatrixMethod::External:  return "external";
    }
    return "external";
}

inline MatrixMethod method_from_tag(const std::string& tag) {
    if (tag == "bernoulli") return MatrixMethod::Bernoulli;
    if (tag == "chengdu")   return MatrixMethod::ChengDu;
    if (tag == "identity")  return MatrixMethod::Identity;
    if (tag == "external")  return MatrixMethod::External;
    throw std::invalid_argument("unknown matrix method tag: " + tag);
}

struct MatrixMeta {
    MatrixMethod method = MatrixMethod::External;
    double p = 0.0;            // Bernoulli entry rate, or Cheng-Du success target
    std::size_t delta = 0;     // Delta the construction was sized for, if any
    std::uint64_t seed = 0;
    bool has_zero_column = false;  // untestable subjects present
};

// Binary m x n pooling design, kept in both row-major and column-major
// packed form so syndromes and decoders run word-wise.
class TestMatrix {
public:
    TestMatrix(std::size_t m, std::size_t n)
        : m_(m), n_(n),
          row_words_((n + 63) / 64),
          col_words_((m + 63) / 64),
          rows_(m * ((n + 63) / 64), 0),
          cols_(n * ((m + 63) / 64), 0) {
        if (m < 1 || n < 1) throw std::domain_error("TestMatrix: dimensions must be >= 1");
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    bool get(std::size_t i, std::size_t j) const {
        return (rows_[i * row_words_ + (j >> 6)] >> (j & 63)) & 1ULL;
    }

    void set(std::size_t i, std::size_t j, bool value) {
        const std::uint64_t rmask = 1ULL << (j & 63);
        const std::uint64_t cmask = 1ULL << (i & 63);
        auto& rw = rows_[i * row_words_ + (j >> 6)];
        auto& cw = cols_[j * col_words_ + (i >> 6)];
        if (value) { rw |= rmask; cw |= cmask; }
        else       { rw &= ~rmask; cw &= ~cmask; }
    }

    // Column j as m packed bits.
    const std::uint64_t* col_words(std::size_t j) const { return cols_.data() + j * col_words_; }
    std::size_t col_word_count() const { return col_words_; }
    const std::uint64_t* row_words(std::size_t i) const { return rows_.data() + i * row_words_; }
    std::size_t row_word_count() const { return row_words_; }

    std::size_t column_weight(std::size_t j) const {
        std::size_t c = 0;
        const std::uint64_t* w = col_words(j);
        for (std::size_t k = 0; k < col_words_; ++k) c += std::popcount(w[k]);
        return c;
    }

    BitVec column(std::size_t j) const {
        BitVec v(m_);
        for (std::size_t k = 0; k < col_words_; ++k) v.words()[k] = col_words(j)[k];
        return v;
    }

    const MatrixMeta& meta() const { return meta_; }
    MatrixMeta& meta() { return meta_; }

    void refresh_zero_column_flag() {
        meta_.has_zero_column = false;
        for (std::size_t j = 0; j < n_; ++j) {
            if (column_weight(j) == 0) { meta_.has_zero_column = true; return; }
        }
    }

    bool operator==(const TestMatrix& other) const {
        return m_ == other.m_ && n_ == other.n_ && rows_ == other.rows_;
    }

    // Text form: header "m n method seed", then m rows of '0'/'1'.
    void save_text(std::ostream& os) const {
        os << m_ << ' ' << n_ << ' ' << method_tag(meta_.method) << ' ' << meta_.seed << '\n';
        std::string line(n_, '0');
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) line[j] = get(i, j) ? '1' : '0';
            os << line << '\n';
        }
    }

    void save_text(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        save_text(os);
    }

    static TestMatrix load_text(std::istream& is) {
        std::size_t m = 0, n = 0;
        std::string tag;
        std::uint64_t seed = 0;
        if (!(is >> m >> n >> tag >> seed)) {
            throw std::runtime_error("matrix text header malformed (want: m n method seed)");
        }
        TestMatrix out(m, n);
        out.meta_.method = method_from_tag(tag);
        out.meta_.seed = seed;
        std::string line;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(is >> line) || line.size() != n) {
                throw std::runtime_error("matrix text body malformed at row " + std::to_string(i));
            }
            for (std::size_t j = 0; j < n; ++j) {
                const char c = line[j];
                if (c != '0' && c != '1') throw std::runtime_error("matrix entries must be '0' or '1'");
                if (c == '1') out.set(i, j, true);
            }
        }
        out.refresh_zero_column_flag();
        return out;
    }

    static TestMatrix load_text(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open for reading: " + path);
        return load_text(is);
    }

    // Packed form: four little-endian u64 header fields (m, n, method code,
    // seed) followed by the row-major words of each row, little-endian.
    void save_packed(std::ostream& os) const {
        write_u64(os, m_);
        write_u64(os, n_);
        write_u64(os, static_cast<std::uint64_t>(meta_.method));
        write_u64(os, meta_.seed);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::uint64_t* w = row_words(i);
            for (std::size_t k = 0; k < row_words_; ++k) write_u64(os, w[k]);
        }
    }

    void save_packed(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        save_packed(os);
    }

    static TestMatrix load_packed(std::istream& is) {
        const std::uint64_t m = read_u64(is);
        const std::uint64_t n = read_u64(is);
        const std::uint64_t method = read_u64(is);
        const std::uint64_t seed = read_u64(is);
        if (method > 3) throw std::runtime_error("matrix packed header: bad method code");
        TestMatrix out(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
        out.meta_.method = static_cast<MatrixMethod>(method);
        out.meta_.seed = seed;
        for (std::size_t i = 0; i < out.m_; ++i) {
            for (std::size_t k = 0; k < out.row_words_; ++k) {
                const std::uint64_t w = read_u64(is);
                for (int b = 0; b < 64; ++b) {
                    const std::size_t j = k * 64 + static_cast<std::size_t>(b);
                    if (j < out.n_ && ((w >> b) & 1ULL)) out.set(i, j, true);
                }
            }
        }
        out.refresh_zero_column_flag();
        return out;
    }

    static TestMatrix load_packed(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open for reading: " + path);
        return load_packed(is);
    }

private:
    static void write_u64(std::ostream& os, std::uint64_t v) {
        char buf[8];
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
        os.write(buf, 8);
    }

    static std::uint64_t read_u64(std::istream& is) {
        char buf[8];
        if (!is.read(buf, 8)) throw std::runtime_error("matrix packed data truncated");
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * b);
        }
        return v;
    }

    std::size_t m_, n_;
    std::size_t row_words_, col_words_;
    std::vector<std::uint64_t> rows_;
    std::vector<std::uint64_t> cols_;
    MatrixMeta meta_;
};

// i.i.d. Bernoulli(p) entries, reproducible from the seed.
inline TestMatrix bernoulli_matrix(std::size_t m, std::size_t n, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("bernoulli_matrix: p must be in (0, 1)");
    TestMatrix out(m, n);
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (rng.bernoulli(p)) out.set(i, j, true);
        }
    }
    out.meta().method = MatrixMethod::Bernoulli;
    out.meta().p = p;
    out.meta().seed = seed;
    out.refresh_zero_column_flag();
    return out;
}

inline TestMatrix identity_matrix(std::size_t n) {
    TestMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out.set(i, i, true);
    out.meta().method = MatrixMethod::Identity;
    return out;
}

struct Method1Params {
    double p = 0.0;        // Bernoulli entry rate, 1/(Delta+1)
    std::size_t m = 0;     // sufficient test count
    std::size_t delta = 0; // tail cut used
};

// Test count sized so a Bernoulli(p) matrix is Delta-disjunct (v = 0) or
// v-error-tolerant Delta-disjunct (v > 0) with high probability.
inline Method1Params method1_params(const TruncatedPoissonModel& model,
                                    const RegimeSpec& regime, std::size_t v) {
    if (model.n() < 2) throw std::domain_error("method1_params: n must be >= 2");
    const std::size_t delta = select_delta(model, regime);
    const double d1 = static_cast<double>(delta) + 1.0;
    const double ln_n = std::log(static_cast<double>(model.n()));
    const double e = std::numbers::e;
    Method1Params out;
    out.delta = delta;
    out.p = 1.0 / d1;
    if (v == 0) {
        out.m = static_cast<std::size_t>(std::ceil(e * d1 * d1 * ln_n));
    } else {
        out.m = static_cast<std::size_t>(
            std::ceil(2.0 * e * d1 * d1 * ln_n + 4.0 * e * static_cast<double>(v) * d1));
    }
    return out;
}

// Shape of the two-step construction: t rows over an alphabet of q = 3 Delta
// symbols, expanded into q binary indicator rows per q-ary row. With
// t = ceil(log3(n / (1 - p_success))), a fixed defective set of size at most
// Delta escapes exact decoding with probability at most
// n (Delta/q)^t = n 3^(-t) <= 1 - p_success, and the total row count
// m = q t stays within ceil(3 Delta / log2 3 (log2 n + log2 1/(1-p))) + q.
struct ChengDuShape {
    std::size_t q = 3;
    std::size_t t = 1;
    std::size_t m = 3;
};

inline ChengDuShape chengdu_shape(std::size_t delta, std::size_t n, double p_success) {
    if (delta < 1) throw std::domain_error("chengdu_matrix: delta must be >= 1");
    if (!(p_success > 0.0 && p_success < 1.0)) {
        throw std::domain_error("chengdu_matrix: p_success must be in (0, 1)");
    }
    ChengDuShape shape;
    shape.q = 3 * delta;
    const double rows = std::ceil(std::log(static_cast<double>(n) / (1.0 - p_success)) /
                                  std::log(3.0));
    shape.t = static_cast<std::size_t>(std::max(rows, 1.0));
    shape.m = shape.q * shape.t;
    return shape;
}

// Expansion step: draw a t x n matrix with i.i.d. uniform entries over
// [0, q) and turn each q-ary row into q binary indicator rows (row qr+s has
// a one in column j iff entry (r, j) equals s). Every column of the result
// has weight exactly t; the entries are not i.i.d.
inline TestMatrix chengdu_matrix_from_rows(std::size_t q, std::size_t t, std::size_t n,
                                           std::uint64_t seed) {
    if (q < 2) throw std::domain_error("chengdu_matrix: alphabet needs at least 2 symbols");
    if (t < 1) throw std::domain_error("chengdu_matrix: need at least one q-ary row");
    TestMatrix out(q * t, n);
    Rng rng(seed);
    for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t s = static_cast<std::size_t>(rng.below(q));
            out.set(q * r + s, j, true);
        }
    }
    out.meta().method = MatrixMethod::ChengDu;
    out.meta().seed = seed;
    return out;
}

inline TestMatrix chengdu_matrix(std::size_t delta, std::size_t n, double p_success,
                                 std::uint64_t seed) {
    const ChengDuShape shape = chengdu_shape(delta, n, p_success);
    TestMatrix out = chengdu_matrix_from_rows(shape.q, shape.t, n, seed);
    out.meta().p = p_success;
    out.meta().delta = delta;
    return out;
}

namespace detail {

// Work estimate for the brute-force disjunctness check: (delta+1) * C(n, delta+1),
// saturating instead of overflowing.
inline double disjunct_check_cost(std::size_t n, std::size_t delta) {
    double c = 1.0;
    for (std::size_t k = 1; k <= delta + 1; ++k) {
        c *= static_cast<double>(n - k + 1) / static_cast<double>(k);
        if (c > 1e18) return 1e18;
    }
    return c * static_cast<double>(delta + 1);
}

// Minimum over all (delta+1)-subsets and members of the number of rows where
// the member has a 1 and every other subset column has 0. Early-exits once a
// member falls below `need`.
inline bool disjunct_private_rows_at_least(const TestMatrix& mat, std::size_t delta,
                                           std::size_t need, double budget) {
    const std::size_t n = mat.cols();
    const std::size_t k = delta + 1;
    if (k > n) throw std::domain_error("disjunct check: delta + 1 must be <= n");
    if (disjunct_check_cost(n, delta) > budget) {
        throw BudgetExceeded("disjunct check: (delta+1) * C(n, delta+1) exceeds budget");
    }
    const std::size_t W = mat.col_word_count();

    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    // prefix[i]: union of columns idx[0..i-1]; suffix[i]: union of idx[i+1..k-1]
    std::vector<std::uint64_t> prefix((k + 1) * W, 0), suffix((k + 1) * W, 0);

    for (;;) {
        std::fill(prefix.begin(), prefix.begin() + W, 0);
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t* col = mat.col_words(idx[i]);
            for (std::size_t w = 0; w < W; ++w) {
                prefix[(i + 1) * W + w] = prefix[i * W + w] | col[w];
            }
        }
        std::fill(suffix.begin() + k * W, suffix.begin() + (k + 1) * W, 0);
        for (std::size_t i = k; i-- > 0;) {
            const std::uint64_t* col = mat.col_words(idx[i]);
            for (std::size_t w = 0; w < W; ++w) {
                suffix[i * W + w] = suffix[(i + 1) * W + w] | col[w];
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t* col = mat.col_words(idx[i]);
            std::size_t priv = 0;
            for (std::size_t w = 0; w < W; ++w) {
                const std::uint64_t others = prefix[i * W + w] | suffix[(i + 1) * W + w];
                priv += static_cast<std::size_t>(std::popcount(col[w] & ~others));
                if (priv >= need) break;
            }
            if (priv < need) return false;
        }
        // next combination in lexicographic order
        std::size_t pos = k;
        while (pos-- > 0) {
            if (idx[pos] != pos + n - k) break;
            if (pos == 0) return true;
        }
        ++idx[pos];
        for (std::size_t i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
}

}  // namespace detail

inline constexpr double kDefaultDisjunctBudget = 1e8;

// Exhaustive check of the Delta-disjunct property: for every (Delta+1)-subset
// and every member column, some row separates the member from the rest.
inline bool is_disjunct(const TestMatrix& mat, std::size_t delta,
                        double budget = kDefaultDisjunctBudget) {
    return detail::disjunct_private_rows_at_least(mat, delta, 1, budget);
}

// Error-tolerant variant: each member keeps at least 2v+1 separating rows.
inline bool is_error_tolerant_disjunct(const TestMatrix& mat, std::size_t delta, std::size_t v,
                                       double budget = kDefaultDisjunctBudget) {
    return detail::disjunct_private_rows_at_least(mat, delta, 2 * v + 1, budget);
}

}  // namespace pgt

#endif
