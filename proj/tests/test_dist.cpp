#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pgt/dist.hpp"

using pgt::RegimeSpec;
using pgt::Rng;
using pgt::TruncatedPoissonModel;

namespace {

const double kGridLambda[] = {0.5, 1.0, 5.0, 50.0};
const std::size_t kGridN[] = {1, 10, 1000, 1000000};

// Oracle: untruncated Poisson upper tail P(D >= k) by forward series
// summation in extended precision.
long double poisson_tail_from(double lambda, long k) {
    long double term = expl(static_cast<long double>(k) * logl(lambda) - lambda -
                            lgammal(static_cast<long double>(k) + 1.0L));
    long double sum = 0.0L;
    for (long d = k;; ++d) {
        sum += term;
        term *= static_cast<long double>(lambda) / static_cast<long double>(d + 1);
        if (term < 1e-30L * sum && d > static_cast<long>(lambda) + 10) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("pmf matches hand-derived values") {
    // lambda=1, n=1: c = e/2, pmf(0) = 1/2
    TruncatedPoissonModel m11(1.0, 1);
    CHECK(m11.pmf(0) == Catch::Approx(0.5).margin(1e-14));
    CHECK(m11.pmf(1) == Catch::Approx(0.5).margin(1e-14));
    CHECK(m11.pmf(2) == 0.0);
    CHECK(m11.pmf(-1) == 0.0);

    // lambda=2, n=2: c = e^2/5, pmf(2) = 2/5
    TruncatedPoissonModel m22(2.0, 2);
    CHECK(m22.pmf(2) == Catch::Approx(0.4).margin(1e-14));
    CHECK(m22.pmf(0) == Catch::Approx(0.2).margin(1e-14));
}

TEST_CASE("normalizer stays finite in log space and is >= 1") {
    for (double lambda : {0.5, 50.0, 10000.0}) {
        for (std::size_t n : {std::size_t{1}, std::size_t{100}, std::size_t{100000}}) {
            TruncatedPoissonModel m(lambda, n);
            CHECK(std::isfinite(m.log_normalizer()));
            // log c >= 0 up to lgamma roundoff, which scales with lambda
            CHECK(m.log_normalizer() >= -1e-9);
        }
    }
}

TEST_CASE("pmf normalization on the full grid") {
    for (double lambda : kGridLambda) {
        for (std::size_t n : kGridN) {
            TruncatedPoissonModel m(lambda, n);
            double sum = 0.0;
            for (std::size_t d = 0; d <= n; ++d) {
                const double p = m.pmf(static_cast<long>(d));
                sum += p;
                if (d > m.upper_support() && p == 0.0) break;
            }
            INFO("lambda=" << lambda << " n=" << n);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("mean closed form equals weighted sum over the grid") {
    for (double lambda : kGridLambda) {
        for (std::size_t n : kGridN) {
            TruncatedPoissonModel m(lambda, n);
            double sum = 0.0;
            for (std::size_t d = 0; d <= n; ++d) {
                const double p = m.pmf(static_cast<long>(d));
                sum += static_cast<double>(d) * p;
                if (d > m.upper_support() && p == 0.0) break;
            }
            INFO("lambda=" << lambda << " n=" << n);
            CHECK(std::abs(m.mean() - sum) <= 1e-10);
        }
    }
}

TEST_CASE("mean examples") {
    CHECK(TruncatedPoissonModel(1.0, 1).mean() == Catch::Approx(0.5).margin(1e-14));
    CHECK(TruncatedPoissonModel(2.0, 2).mean() == Catch::Approx(1.2).margin(1e-14));
    // truncation mass is negligible at n = 10^6
    CHECK(std::abs(TruncatedPoissonModel(3.0, 1000000).mean() - 3.0) <= 1e-9);
}

TEST_CASE("tail_exact matches direct sums") {
    TruncatedPoissonModel m22(2.0, 2);
    CHECK(m22.tail_exact(2) == 0.0);
    CHECK(m22.tail_exact(1) == Catch::Approx(0.4).margin(1e-14));
    TruncatedPoissonModel m11(1.0, 1);
    CHECK(m11.tail_exact(0) == Catch::Approx(0.5).margin(1e-14));

    // complement identity on a mid-sized case
    TruncatedPoissonModel m(5.0, 40);
    for (long delta : {0L, 3L, 7L, 20L}) {
        double head = 0.0;
        for (long d = 0; d <= delta; ++d) head += m.pmf(d);
        CHECK(m.tail_exact(delta) == Catch::Approx(1.0 - head).margin(1e-12));
    }
}

TEST_CASE("select_delta per regime") {
    // ceil(100^1.1) - 1 = 158
    TruncatedPoissonModel m100(100.0, 10000);
    CHECK(pgt::select_delta(m100, RegimeSpec::unbounded(0.1)) == 158);

    // beta(10^6, K=2) = ln ln 10^6 = 2.6258, ceil(3 beta) - 1 = 7
    TruncatedPoissonModel m3(3.0, 1000000);
    CHECK(pgt::select_delta(m3, RegimeSpec::bounded(2)) == 7);

    // the raw formula cannot go below 0 after clamping
    TruncatedPoissonModel m1(1.0, 10);
    for (double eps : {0.01, 0.5, 3.0}) {
        CHECK(pgt::select_delta(m1, RegimeSpec::unbounded(eps)) <= 10);
    }

    // clamp to n when the formula overshoots the population
    TruncatedPoissonModel small(50.0, 10);
    CHECK(pgt::select_delta(small, RegimeSpec::unbounded(0.1)) == 10);
}

TEST_CASE("iterated log domain errors") {
    CHECK_THROWS_AS(pgt::iterated_log(2.0, 2), std::domain_error);
    CHECK_THROWS_AS(pgt::iterated_log(1.0, 2), std::domain_error);
    CHECK(pgt::iterated_log(10.0, 2) == Catch::Approx(std::log(std::log(10.0))));
    TruncatedPoissonModel m(1.0, 2);
    CHECK_THROWS_AS(pgt::select_delta(m, RegimeSpec::bounded(2)), std::domain_error);
    CHECK_THROWS_AS(RegimeSpec::unbounded(0.0), std::domain_error);
    CHECK_THROWS_AS(RegimeSpec::bounded(1), std::domain_error);
}

TEST_CASE("Markov tail inequality holds at the selected delta") {
    for (double lambda : kGridLambda) {
        for (std::size_t n : kGridN) {
            TruncatedPoissonModel m(lambda, n);
            const double mean = m.mean();

            // the inequality can be an exact equality (e.g. support {0,1}),
            // so allow one part in 10^12 for the two computation routes
            const std::size_t d_unb = pgt::select_delta(m, RegimeSpec::unbounded(0.1));
            INFO("lambda=" << lambda << " n=" << n << " delta=" << d_unb);
            CHECK(m.tail_exact(static_cast<long>(d_unb)) <=
                  mean / (static_cast<double>(d_unb) + 1.0) * (1.0 + 1e-12));

            if (n >= 10) {  // beta(n, 2) needs ln ln n > 0
                const std::size_t d_b = pgt::select_delta(m, RegimeSpec::bounded(2));
                CHECK(m.tail_exact(static_cast<long>(d_b)) <=
                      mean / (static_cast<double>(d_b) + 1.0) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("chernoff bound value and dominance") {
    // exp(-2 ln 2 + 1) = e/4
    CHECK(pgt::chernoff_tail_bound(1.0, 1.0) ==
          Catch::Approx(0.67957045711476131).margin(1e-15));
    CHECK(pgt::chernoff_tail_bound(7.0, 0.0) == 1.0);

    // exact Poisson(1) tail P(D >= 2) = 1 - 2/e
    const double exact = static_cast<double>(poisson_tail_from(1.0, 2));
    CHECK(exact == Catch::Approx(0.26424111765711534).margin(1e-12));
    CHECK(exact <= pgt::chernoff_tail_bound(1.0, 1.0));

    for (double lambda : kGridLambda) {
        for (double a : {0.0, 1.0, lambda, 5.0 * lambda}) {
            const long k = static_cast<long>(std::ceil(lambda + a));
            const double tail = static_cast<double>(poisson_tail_from(lambda, k));
            INFO("lambda=" << lambda << " a=" << a);
            CHECK(tail <= pgt::chernoff_tail_bound(lambda, a) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("le cam gap bound") {
    CHECK(pgt::lecam_gap_bound(std::vector<double>{}) == 0.0);
    const std::vector<double> half{0.5, 0.5};
    CHECK(pgt::lecam_gap_bound(half) == Catch::Approx(1.0).margin(1e-15));

    // p_i = 0.1/i: the partial sums 2 sum p_i^2 climb to 0.02 zeta(2).
    std::vector<double> ps;
    ps.reserve(1000000);
    for (std::size_t i = 1; i <= 1000000; ++i) ps.push_back(0.1 / static_cast<double>(i));
    const double val = pgt::lecam_gap_bound(ps);
    CHECK(val == Catch::Approx(0.032898681336964525).margin(1e-6));
    CHECK(val < 0.032898681336964525);  // partial sums approach the limit from below

    const std::vector<double> bad{0.5, 1.5};
    CHECK_THROWS_AS(pgt::lecam_gap_bound(bad), std::domain_error);
}

TEST_CASE("sampling: support, determinism, empirical mean") {
    TruncatedPoissonModel m(1.0, 1);
    Rng rng(123);
    for (int k = 0; k < 200; ++k) {
        const long d = m.sample(rng);
        CHECK((d == 0 || d == 1));
    }

    Rng a(7), b(7);
    TruncatedPoissonModel m5(5.0, 30);
    for (int k = 0; k < 500; ++k) REQUIRE(m5.sample(a) == m5.sample(b));

    // 1e5 samples at (lambda=2, n=2): mean 1.2, sd of the sample mean
    // sqrt(0.56/1e5) = 0.0023666; allow 3 sigma.
    TruncatedPoissonModel m22(2.0, 2);
    Rng r(2024);
    double sum = 0.0;
    const int kSamples = 100000;
    for (int k = 0; k < kSamples; ++k) sum += static_cast<double>(m22.sample(r));
    CHECK(std::abs(sum / kSamples - 1.2) <= 3.0 * 0.0023666);
}

TEST_CASE("sampling: chi-square goodness of fit at significance 0.001") {
    const int kSamples = 100000;

    {
        TruncatedPoissonModel m(2.0, 2);
        Rng r(99);
        std::size_t counts[3] = {};
        for (int k = 0; k < kSamples; ++k) ++counts[m.sample(r)];
        double stat = 0.0;
        for (long d = 0; d <= 2; ++d) {
            const double expect = m.pmf(d) * kSamples;
            const double diff = static_cast<double>(counts[d]) - expect;
            stat += diff * diff / expect;
        }
        CHECK(stat <= 13.815510557964274);  // chi2(df=2, 0.999)
    }

    {
        TruncatedPoissonModel m(5.0, 10);
        Rng r(100);
        std::size_t counts[11] = {};
        for (int k = 0; k < kSamples; ++k) ++counts[m.sample(r)];
        double stat = 0.0;
        for (long d = 0; d <= 10; ++d) {
            const double expect = m.pmf(d) * kSamples;
            REQUIRE(expect >= 5.0);
            const double diff = static_cast<double>(counts[d]) - expect;
            stat += diff * diff / expect;
        }
        CHECK(stat <= 29.588298445074422);  // chi2(df=10, 0.999)
    }
}

TEST_CASE("model construction rejects bad parameters") {
    CHECK_THROWS_AS(TruncatedPoissonModel(0.0, 5), std::domain_error);
    CHECK_THROWS_AS(TruncatedPoissonModel(-1.0, 5), std::domain_error);
    CHECK_THROWS_AS(TruncatedPoissonModel(1.0, 0), std::domain_error);
}
