// End-to-end walkthrough: size a pooling design for a Poisson defective
// model, screen a simulated batch, and compare the test budget against the
// information-theoretic floor and the semi-adaptive alternative.

#include <cstdio>

#include "pgt/pgt.hpp"

int main() {
    const double lambda = 3.0;
    const std::size_t n = 200;
    pgt::TruncatedPoissonModel model(lambda, n);
    const auto regime = pgt::RegimeSpec::unbounded(0.1);

    std::printf("population n=%zu, expected defectives %.3f\n", n, model.mean());
    for (const auto& row : pgt::constructive_upper_bounds(model, regime, 0)) {
        std::printf("  %-16s %8.0f tests\n", row.name.c_str(), row.value);
    }
    std::printf("  %-16s %8.1f tests (floor)\n", "fano_lb_finite",
                pgt::fano_lower_bound(lambda, n, 0.1)[1].value);

    // one nonadaptive screening round with the ternary-expansion design
    pgt::Rng rng(2024);
    const std::size_t delta = pgt::select_delta(model, regime);
    const auto matrix = pgt::chengdu_matrix(delta, n, 1.0 - 1.0 / std::log(double(n)), 7);
    const auto d = static_cast<std::size_t>(model.sample(rng));
    const auto defectives = rng.distinct_subset(n, d);
    const auto decoded = pgt::decode_support(matrix, pgt::syndrome(matrix, defectives));
    std::printf("nonadaptive round: m=%zu tests, %zu defectives, recovered %s\n",
                matrix.rows(), defectives.size(),
                decoded.recovered == defectives ? "exactly" : "with errors");

    // the semi-adaptive alternative on the same batch
    const auto plan = pgt::stage_plan(n, model.mean());
    pgt::Rng stage_rng(99);
    const auto trace = pgt::run_stages(plan, defectives, stage_rng);
    std::printf("semi-adaptive: %zu stages, %zu tests (bound %zu), zero error\n", plan.s,
                trace.total_tests, pgt::per_realization_test_bound(plan, defectives.size()));
    std::printf("expected-test window: [%.1f, %.1f]\n",
                pgt::adaptive_lower_bound(lambda, n).value,
                pgt::semiadaptive_upper_bound(model.mean(), n).value);
    return 0;
}
