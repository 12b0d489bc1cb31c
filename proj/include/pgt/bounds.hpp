#ifndef PGT_BOUNDS_HPP
#define PGT_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgt/dist.hpp"
#include "pgt/errors.hpp"

namespace pgt {

enum class BoundUnit { Tests, Bits, Nats, Probability };

inline const char* unit_tag(BoundUnit u) {
    switch (u) {
        case BoundUnit::Tests:       return "tests";
        case BoundUnit::Bits:        return "bits";
        case BoundUnit::Nats:        return "nats";
        case BoundUnit::Probability: return "probability";
    }
    return "tests";
}

struct BoundReport {
    std::string name;
    double value = 0.0;
    BoundUnit unit = BoundUnit::Tests;
    std::vector<std::string> assumptions;
};

inline std::string to_csv_row(const BoundReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    std::string row = r.name;
    row += ',';
    row += buf;
    row += ',';
    row += unit_tag(r.unit);
    row += ',';
    for (std::size_t i = 0; i < r.assumptions.size(); ++i) {
        if (i) row += "; ";
        row += r.assumptions[i];
    }
    return row;
}

namespace detail {

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log2_binomial(double n, double k) {
    return log_binomial(n, k) / std::numbers::ln2;
}

// Note attached to evaluators whose statements assume lambda small next to n.
inline void append_smallness_note(std::vector<std::string>& assumptions, double lambda,
                                  std::size_t n) {
    if (2.0 * lambda >= static_cast<double>(n)) {
        assumptions.push_back("warning: lambda is not small relative to n");
    }
}

}  // namespace detail

// Information-theoretic floor on the nonadaptive test count: the asymptotic
// form (1-eps) lambda log2 n and the sharper finite-n form log2 C(n, ceil((1-eps) lambda)).
inline std::vector<BoundReport> fano_lower_bound(double lambda, std::size_t n, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::domain_error("fano_lower_bound: epsilon must be in (0, 1)");
    }
    if (!(lambda > 0.0)) throw std::domain_error("fano_lower_bound: lambda must be > 0");
    const double reduced = (1.0 - epsilon) * lambda;
    if (reduced > static_cast<double>(n) / 2.0) {
        throw std::domain_error("fano_lower_bound: requires (1-eps) lambda <= n/2");
    }
    std::vector<std::string> notes{"epsilon=" + std::to_string(epsilon)};
    detail::append_smallness_note(notes, lambda, n);

    BoundReport asym{"fano_lb_asymptotic",
                     reduced * std::log2(static_cast<double>(n)), BoundUnit::Tests, notes};
    const double k = std::ceil(reduced);
    BoundReport finite{"fano_lb_finite",
                       detail::log2_binomial(static_cast<double>(n), k), BoundUnit::Tests, notes};
    finite.assumptions.push_back("k=" + std::to_string(static_cast<long long>(k)));
    return {asym, finite};
}

// Finite-n test counts of the constructive nonadaptive schemes, one row per
// sizing rule applicable under the given regime.
inline std::vector<BoundReport> constructive_upper_bounds(const TruncatedPoissonModel& model,
                                                          const RegimeSpec& regime,
                                                          std::size_t v) {
    if (model.n() < 2) throw std::domain_error("constructive_upper_bounds: n must be >= 2");
    const std::size_t delta = select_delta(model, regime);
    const double d1 = static_cast<double>(delta) + 1.0;
    const double n = static_cast<double>(model.n());
    const double e = std::numbers::e;

    std::vector<std::string> notes{regime.describe(), "delta=" + std::to_string(delta)};
    detail::append_smallness_note(notes, model.lambda(), model.n());

    std::vector<BoundReport> out;
    out.push_back({"method1_m", std::ceil(e * d1 * d1 * std::log(n)), BoundUnit::Tests, notes});

    auto noisy_notes = notes;
    noisy_notes.push_back("v=" + std::to_string(v));
    out.push_back({"method1_noisy_m",
                   std::ceil(2.0 * e * d1 * d1 * std::log(n) + 4.0 * e * static_cast<double>(v) * d1),
                   BoundUnit::Tests, noisy_notes});

    out.push_back({"method2_m", std::ceil(3.0 / std::log2(3.0) * d1 * std::log2(n)),
                   BoundUnit::Tests, notes});
    return out;
}

namespace detail {

// log2 of the per-pattern source probability P(w_d) = pmf(d) / C(n, d).
inline double log2_pattern_prob(const TruncatedPoissonModel& model, std::size_t d) {
    const double lp = model.log_pmf(static_cast<long>(d)) -
                      log_binomial(static_cast<double>(model.n()), static_cast<double>(d));
    return lp / std::numbers::ln2;
}

}  // namespace detail

// Shannon entropy of the defective-pattern source, in bits.
inline BoundReport source_entropy(const TruncatedPoissonModel& model) {
    double h = 0.0;
    const std::size_t hi = model.upper_support();
    for (std::size_t d = 0; d <= hi; ++d) {
        const double p = model.pmf(static_cast<long>(d));
        if (p == 0.0) continue;
        h -= p * detail::log2_pattern_prob(model, d);
    }
    BoundReport out{"source_entropy", h, BoundUnit::Bits, {}};
    detail::append_smallness_note(out.assumptions, model.lambda(), model.n());
    return out;
}

// Expected length of the exact Huffman code over all 2^n defective patterns.
// Computed with the sorted two-queue construction; the expected length is
// the sum of the merge weights and is invariant under tie-breaking.
inline BoundReport huffman_expected_length(const TruncatedPoissonModel& model) {
    const std::size_t n = model.n();
    if (n > 20) throw SizeError("huffman_expected_length: n > 20 (2^n symbols)");

    std::vector<double> probs;
    probs.reserve(std::size_t{1} << n);
    for (std::size_t d = 0; d <= n; ++d) {
        const double pw = std::exp2(detail::log2_pattern_prob(model, d));
        std::uint64_t count = 1;
        for (std::size_t k = 1; k <= d; ++k) count = count * (n - k + 1) / k;
        for (std::uint64_t c = 0; c < count; ++c) probs.push_back(pw);
    }
    std::sort(probs.begin(), probs.end());

    double expected = 0.0;
    std::deque<double> merged;
    std::size_t li = 0;
    const auto take_min = [&]() {
        if (li < probs.size() && (merged.empty() || probs[li] <= merged.front())) {
            return probs[li++];
        }
        const double v = merged.front();
        merged.pop_front();
        return v;
    };
    while (probs.size() - li + merged.size() >= 2) {
        const double a = take_min();
        const double b = take_min();
        merged.push_back(a + b);
        expected += a + b;
    }
    if (probs.size() == 1) expected = 0.0;  // single-symbol source needs no bits

    return {"huffman_expected_length", expected, BoundUnit::Bits, {}};
}

// Floor on the expected number of adaptive tests:
// lambda log2(n/lambda) - log2(e) lambda^4 / n^2.
inline BoundReport adaptive_lower_bound(double lambda, std::size_t n) {
    if (!(lambda > 0.0) || lambda >= static_cast<double>(n)) {
        throw std::domain_error("adaptive_lower_bound: requires 0 < lambda < n");
    }
    const double nn = static_cast<double>(n);
    const double main_term = lambda * std::log2(nn / lambda);
    const double correction = std::log2(std::numbers::e) * std::pow(lambda, 4.0) / (nn * nn);
    BoundReport out{"adaptive_lb", main_term - correction, BoundUnit::Tests, {}};
    detail::append_smallness_note(out.assumptions, lambda, n);
    if (out.value < 0.0) {
        out.value = 0.0;
        out.assumptions.push_back("clamped to 0 (correction term dominates)");
    }
    return out;
}

// Ceiling on the expected test count of the s-stage algorithm:
// (e / log2 e) lambda_bar log2(n / lambda_bar).
inline BoundReport semiadaptive_upper_bound(double lambda_bar, std::size_t n) {
    if (!(lambda_bar > 0.0) || lambda_bar >= static_cast<double>(n)) {
        throw std::domain_error("semiadaptive_upper_bound: requires 0 < lambda_bar < n");
    }
    const double factor = std::numbers::e / std::log2(std::numbers::e);
    BoundReport out{"semiadaptive_ub",
                    factor * lambda_bar * std::log2(static_cast<double>(n) / lambda_bar),
                    BoundUnit::Tests, {}};
    detail::append_smallness_note(out.assumptions, lambda_bar, n);
    return out;
}

struct ExponentPoint {
    double rho = 0.0;
    std::size_t i = 0;
    std::size_t d = 0;
    double p = 0.0;
    double value = 0.0;  // nats
};

// Gallager-style error exponent for a single Bernoulli(p) test row, with the
// defective set split into i swapped and d-i fixed subjects. The sums over
// the row patterns collapse: with q1 = (1-p)^i and q2 = (1-p)^(d-i),
//   E_o = -ln( (1-q2) + q2 (q1^(1+rho) + (1-q1)^(1+rho)) ).
// Evaluated through expm1/log1p so small exponents keep full precision.
inline ExponentPoint error_exponent(double rho, std::size_t i, std::size_t d, double p) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("error_exponent: rho must be in [0, 1]");
    if (i < 1 || i > d) throw std::domain_error("error_exponent: need 1 <= i <= d");
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("error_exponent: p must be in [0, 1)");

    const double log_q1 = static_cast<double>(i) * std::log1p(-p);
    const double q1 = std::exp(log_q1);
    const double q2 = std::exp(static_cast<double>(d - i) * std::log1p(-p));
    // q1^(1+rho) + (1-q1)^(1+rho) - 1, written as a sum of two expm1 terms.
    double shrink = q1 * std::expm1(rho * log_q1);
    if (q1 < 1.0) {
        const double one_minus_q1 = -std::expm1(log_q1);
        shrink += one_minus_q1 * std::expm1(rho * std::log(one_minus_q1));
    }
    ExponentPoint out{rho, i, d, p, -std::log1p(q2 * shrink)};
    if (out.value < 0.0) out.value = 0.0;  // guard against -0 rounding
    return out;
}

// I(T1; Y | T2) = (1-p)^(d-i) h_b((1-p)^i) in nats; equals dE_o/drho at 0.
inline double mutual_info_t1(std::size_t i, std::size_t d, double p) {
    if (i < 1 || i > d) throw std::domain_error("mutual_info_t1: need 1 <= i <= d");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("mutual_info_t1: p must be in [0, 1]");
    const double q1 = std::pow(1.0 - p, static_cast<double>(i));
    const double q2 = std::pow(1.0 - p, static_cast<double>(d - i));
    if (q1 <= 0.0 || q1 >= 1.0) return 0.0;
    const double h = -q1 * std::log(q1) - (1.0 - q1) * std::log(1.0 - q1);
    return q2 * h;
}

// Per-(i, d) error bound of the ML decoder:
// 2^{-(m E_o_bits - rho log2(C(n-d, i) C(d, i)))}, clamped to [0, 1].
inline double ml_error_bound(std::size_t m, double rho, std::size_t i, std::size_t d,
                             std::size_t n, double p) {
    if (d > n || i > n - d) throw std::domain_error("ml_error_bound: need i <= n - d");
    const double eo_bits = error_exponent(rho, i, d, p).value / std::numbers::ln2;
    const double comb_bits =
        detail::log2_binomial(static_cast<double>(n - d), static_cast<double>(i)) +
        detail::log2_binomial(static_cast<double>(d), static_cast<double>(i));
    const double exponent = static_cast<double>(m) * eo_bits - rho * comb_bits;
    return std::clamp(std::exp2(-exponent), 0.0, 1.0);
}

// Total ML error bound: the weighted double sum over d <= Delta with a
// per-(i, d) rho optimized on the grid {0.01, ..., 1.00}, plus the exact
// lambda-weighted tail mass above Delta.
inline BoundReport nonadaptive_ml_total_bound(const TruncatedPoissonModel& model, std::size_t m,
                                              double p, const RegimeSpec& regime) {
    if (m < 1) throw std::domain_error("nonadaptive_ml_total_bound: m must be >= 1");
    const std::size_t n = model.n();
    const std::size_t delta = select_delta(model, regime);

    double pe1 = 0.0;
    for (std::size_t d = 1; d <= delta && d <= n; ++d) {
        const double w = model.pmf(static_cast<long>(d));
        if (w == 0.0) continue;
        double inner = 0.0;
        const std::size_t i_max = std::min(d, n - d);
        for (std::size_t i = 1; i <= i_max; ++i) {
            double best = 1.0;
            for (int g = 1; g <= 100; ++g) {
                best = std::min(best, ml_error_bound(m, 0.01 * g, i, d, n, p));
            }
            inner += best;
        }
        pe1 += w * inner;
    }

    // sum_{d > Delta} d pmf(d) = lambda (P(D >= Delta) - pmf(n))
    double pe2 = 0.0;
    if (delta < n) {
        const double head = (delta >= 1)
                                ? model.tail_exact(static_cast<long>(delta) - 1)
                                : 1.0;
        pe2 = model.lambda() * std::max(head - model.pmf(static_cast<long>(n)), 0.0);
    }

    BoundReport out{"nonadaptive_ml_total_bound", std::clamp(pe1 + pe2, 0.0, 1.0),
                    BoundUnit::Probability,
                    {regime.describe(), "delta=" + std::to_string(delta),
                     "m=" + std::to_string(m), "rho grid 0.01..1.00"}};
    detail::append_smallness_note(out.assumptions, model.lambda(), model.n());
    return out;
}

}  // namespace pgt

#endif
