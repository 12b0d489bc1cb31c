#ifndef PGT_BITVEC_HPP
#define PGT_BITVEC_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgt {

// Fixed-length bit vector packed into 64-bit words, little-endian bit order
// within a word (bit i lives in word i/64 at position i%64).
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    std::size_t word_count() const { return w_.size(); }

    bool get(std::size_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1ULL;
    }

    void set(std::size_t i, bool value) {
        const std::uint64_t mask = 1ULL << (i & 63);
        if (value) w_[i >> 6] |= mask;
        else       w_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { w_[i >> 6] ^= 1ULL << (i & 63); }

    const std::uint64_t* words() const { return w_.data(); }
    std::uint64_t* words() { return w_.data(); }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (std::uint64_t w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const {
        for (std::uint64_t w : w_) if (w != 0) return false;
        return true;
    }
    bool any() const { return !none(); }

    void or_assign(const BitVec& other) {
        check_same_size(other);
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= other.w_[k];
    }

    // True iff this vector's support is contained in other's.
    bool is_subset_of(const BitVec& other) const {
        check_same_size(other);
        for (std::size_t k = 0; k < w_.size(); ++k) {
            if (w_[k] & ~other.w_[k]) return false;
        }
        return true;
    }

    // popcount(this & ~other)
    std::size_t count_and_not(const BitVec& other) const {
        check_same_size(other);
        std::size_t c = 0;
        for (std::size_t k = 0; k < w_.size(); ++k) {
            c += static_cast<std::size_t>(std::popcount(w_[k] & ~other.w_[k]));
        }
        return c;
    }

    bool operator==(const BitVec& other) const {
        return n_ == other.n_ && w_ == other.w_;
    }
    bool operator!=(const BitVec& other) const { return !(*this == other); }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

private:
    void check_same_size(const BitVec& other) const {
        if (n_ != other.n_) throw std::invalid_argument("BitVec: size mismatch");
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace pgt

#endif
