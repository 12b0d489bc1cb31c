#ifndef PGT_DIST_HPP
#define PGT_DIST_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgt/random.hpp"

namespace pgt {

// K-fold iterated natural logarithm. Throws if any intermediate value is
// nonpositive (the iterate would leave the domain) or the result is <= 0.
inline double iterated_log(double n, int k_folds) {
    if (k_folds < 1) throw std::domain_error("iterated_log: K must be >= 1");
    double x = n;
    for (int k = 0; k < k_folds; ++k) {
        if (x <= 0.0) throw std::domain_error("iterated_log: iterate hit a nonpositive value");
        x = std::log(x);
    }
    if (x <= 0.0) throw std::domain_error("iterated_log: result is nonpositive");
    return x;
}

// Which asymptotic regime the tail-cut and test-count formulas assume:
// lambda growing without bound (epsilon powers) or bounded lambda
// (iterated-log inflation factor beta(n)).
struct RegimeSpec {
    enum class Kind { UnboundedLambda, BoundedLambda };

    Kind kind = Kind::UnboundedLambda;
    double epsilon = 0.1;  // UnboundedLambda only
    int k_folds = 2;       // BoundedLambda only

    static RegimeSpec unbounded(double epsilon = 0.1) {
        if (!(epsilon > 0.0)) throw std::domain_error("RegimeSpec: epsilon must be > 0");
        RegimeSpec r;
        r.kind = Kind::UnboundedLambda;
        r.epsilon = epsilon;
        return r;
    }

    static RegimeSpec bounded(int k_folds = 2) {
        if (k_folds < 2) throw std::domain_error("RegimeSpec: K must be >= 2");
        RegimeSpec r;
        r.kind = Kind::BoundedLambda;
        r.k_folds = k_folds;
        return r;
    }

    double beta(std::size_t n) const {
        if (kind != Kind::BoundedLambda) {
            throw std::logic_error("RegimeSpec::beta: only defined for the bounded regime");
        }
        return iterated_log(static_cast<double>(n), k_folds);
    }

    std::string describe() const {
        if (kind == Kind::UnboundedLambda) {
            return "unbounded-lambda regime (epsilon=" + std::to_string(epsilon) + ")";
        }
        return "bounded-lambda regime (K=" + std::to_string(k_folds) + ")";
    }
};

// Poisson law conditioned on the count not exceeding n, renormalized by c(n).
// All internal computation runs in log space; the model is immutable after
// construction and safe to share across threads.
class TruncatedPoissonModel {
public:
    TruncatedPoissonModel(double lambda, std::size_t n) : lambda_(lambda), n_(n) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw std::domain_error("TruncatedPoissonModel: lambda must be positive and finite");
        }
        if (n < 1) throw std::domain_error("TruncatedPoissonModel: n must be >= 1");
        log_lambda_ = std::log(lambda);
        // log c(n) = lambda - log sum_{d=0}^{n} lambda^d / d!
        log_c_ = lambda_ - log_sum_terms(0, n);
        build_cdf();
    }

    double lambda() const { return lambda_; }
    std::size_t n() const { return n_; }

    double log_normalizer() const { return log_c_; }
    // c(n); may overflow to +inf for extreme (lambda, n) combinations, the
    // log form above is always finite.
    double normalizer() const { return std::exp(log_c_); }

    double log_pmf(long d) const {
        if (d < 0 || static_cast<std::size_t>(d) > n_) {
            return -std::numeric_limits<double>::infinity();
        }
        return log_c_ + static_cast<double>(d) * log_lambda_ - lambda_ -
               std::lgamma(static_cast<double>(d) + 1.0);
    }

    double pmf(long d) const {
        if (d < 0 || static_cast<std::size_t>(d) > n_) return 0.0;
        return std::exp(log_pmf(d));
    }

    // Mean of the truncated law: lambda * (1 - pmf(n)).
    double mean() const {
        return lambda_ * (-std::expm1(log_pmf(static_cast<long>(n_))));
    }

    // P(D > delta), summed in log space so tiny tails keep full precision.
    double tail_exact(long delta) const {
        if (delta >= static_cast<long>(n_)) return 0.0;
        const long lo = std::max(0L, delta + 1);
        const double log_sum = log_sum_terms(static_cast<std::size_t>(lo), n_);
        const double t = std::exp(log_c_ - lambda_ + log_sum);
        return std::min(t, 1.0);
    }

    // Inverse-CDF sampling over the cached cumulative table.
    long sample(Rng& rng) const {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
        return static_cast<long>(idx);
    }

    // Last d for which the cached CDF holds mass; beyond it pmf(d) is below
    // double resolution relative to 1.
    std::size_t upper_support() const { return cdf_.size() - 1; }

private:
    // log sum_{d=lo}^{hi} lambda^d / d!, swept outward from the mode with
    // geometric early exit. Truncation error below 1e-19 relative.
    double log_sum_terms(std::size_t lo, std::size_t hi) const {
        const std::size_t mode = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::floor(lambda_)), lo, hi);
        const auto term = [this](std::size_t d) {
            return static_cast<double>(d) * log_lambda_ -
                   std::lgamma(static_cast<double>(d) + 1.0);
        };
        const double t_max = term(mode);
        double sum = 0.0;
        constexpr double kCut = 1e-25;
        for (std::size_t d = mode + 1;; ++d) {
            if (d > hi) break;
            const double t = std::exp(term(d) - t_max);
            sum += t;
            if (t < kCut) break;
        }
        for (std::size_t d = mode;; --d) {
            const double t = std::exp(term(d) - t_max);
            sum += t;
            if (t < kCut || d == lo) break;
        }
        return t_max + std::log(sum);
    }

    void build_cdf() {
        const std::size_t mode =
            std::min(n_, static_cast<std::size_t>(std::floor(lambda_)));
        double acc = 0.0;
        cdf_.reserve(64);
        for (std::size_t d = 0; d <= n_; ++d) {
            const double p = pmf(static_cast<long>(d));
            acc += p;
            cdf_.push_back(std::min(acc, 1.0));
            if (d > mode && (acc >= 1.0 || p < 1e-20)) break;
        }
        cdf_.back() = 1.0;
    }

    double lambda_;
    std::size_t n_;
    double log_lambda_;
    double log_c_;
    std::vector<double> cdf_;
};

// Tail-cut Delta for the given regime, clamped to [0, n]. The raw formulas
// can fall below 0 or exceed n at small parameter values.
inline std::size_t select_delta(const TruncatedPoissonModel& model, const RegimeSpec& regime) {
    double raw;
    if (regime.kind == RegimeSpec::Kind::UnboundedLambda) {
        raw = std::ceil(std::pow(model.lambda(), 1.0 + regime.epsilon)) - 1.0;
    } else {
        raw = std::ceil(regime.beta(model.n()) * model.lambda()) - 1.0;
    }
    const double clamped = std::clamp(raw, 0.0, static_cast<double>(model.n()));
    return static_cast<std::size_t>(clamped);
}

// exp(-(lambda+a) ln((lambda+a)/lambda) + a); dominates the untruncated
// Poisson upper tail P(D >= lambda + a).
inline double chernoff_tail_bound(double lambda, double a) {
    if (!(lambda > 0.0)) throw std::domain_error("chernoff_tail_bound: lambda must be > 0");
    if (a < 0.0) throw std::domain_error("chernoff_tail_bound: a must be >= 0");
    if (a == 0.0) return 1.0;
    return std::exp(-(lambda + a) * std::log((lambda + a) / lambda) + a);
}

// 2 * sum p_i^2: upper bound on the distance between a Bernoulli-sum law
// and the Poisson law with the same mean.
inline double lecam_gap_bound(std::span<const double> p_list) {
    double acc = 0.0;
    for (double p : p_list) {
        if (p < 0.0 || p > 1.0) {
            throw std::domain_error("lecam_gap_bound: probabilities must lie in [0, 1]");
        }
        acc += p * p;
    }
    return 2.0 * acc;
}

}  // namespace pgt

#endif
