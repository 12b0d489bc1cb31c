#ifndef PGT_RANDOM_HPP
#define PGT_RANDOM_HPP

#include <algorithm>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pgt {

// SplitMix64 step; used for seeding and counter-based stream derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from (seed, stream). Order-independent
// across streams, so trials can run in any order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0xd1b54a32d192ed03ULL));
}

// xoshiro256** with SplitMix64 seeding. Self-contained so that output is
// byte-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) {
            x = splitmix64(x);
            w = x;
        }
    }

    static Rng from_stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix_seed(seed, stream));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Floyd's algorithm: k distinct values from [0, n), returned sorted.
    std::vector<std::size_t> distinct_subset(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("Rng::distinct_subset: k > n");
        std::vector<std::size_t> chosen;
        chosen.reserve(k);
        for (std::size_t j = n - k; j < n; ++j) {
            const std::size_t t = static_cast<std::size_t>(below(j + 1));
            bool seen = false;
            for (std::size_t c : chosen) {
                if (c == t) { seen = true; break; }
            }
            chosen.push_back(seen ? j : t);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
};

}  // namespace pgt

#endif
