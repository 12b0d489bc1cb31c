#ifndef PGT_SEMIADAPTIVE_HPP
#define PGT_SEMIADAPTIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pgt/random.hpp"

namespace pgt {

// Schedule for the s-stage identification algorithm. Group sizes shrink
// geometrically: k_i = ceil((n/lambda_bar)^((s0-i)/s0)) with s0 = ln(n/lambda_bar).
struct StagePlan {
    std::size_t n = 0;
    double lambda_bar = 0.0;
    double s0 = 0.0;
    std::size_t s = 1;
    std::vector<std::size_t> k;  // sizes for stages 1..s-1; empty when s == 1
};

inline StagePlan stage_plan(std::size_t n, double lambda_bar) {
    if (n < 1) throw std::domain_error("stage_plan: n must be >= 1");
    if (!(lambda_bar > 0.0) || lambda_bar >= static_cast<double>(n)) {
        throw std::domain_error("stage_plan: lambda_bar must satisfy 0 < lambda_bar < n");
    }
    StagePlan plan;
    plan.n = n;
    plan.lambda_bar = lambda_bar;
    const double ratio = static_cast<double>(n) / lambda_bar;
    plan.s0 = std::log(ratio);
    plan.s = static_cast<std::size_t>(std::ceil(plan.s0));
    if (plan.s <= 1) {
        plan.s = 1;  // single stage: plain individual testing
        return plan;
    }
    plan.k.reserve(plan.s - 1);
    for (std::size_t i = 1; i < plan.s; ++i) {
        const double exponent = (plan.s0 - static_cast<double>(i)) / plan.s0;
        plan.k.push_back(static_cast<std::size_t>(std::ceil(std::pow(ratio, exponent))));
    }
    for (std::size_t i = 1; i < plan.k.size(); ++i) {
        if (plan.k[i] >= plan.k[i - 1]) throw std::logic_error("stage_plan: sizes not decreasing");
    }
    if (plan.k.back() < 2) throw std::logic_error("stage_plan: final group size below 2");
    return plan;
}

struct StageRecord {
    std::size_t pool_size = 0;
    std::size_t groups = 0;
    std::size_t tests = 0;
    std::size_t positive_groups = 0;
};

struct StageTrace {
    std::vector<StageRecord> stages;
    std::size_t total_tests = 0;
    std::vector<std::size_t> recovered;  // always the exact defective set
};

// Execute the plan: stages 1..s-1 pool random groups of size k_i (one
// remainder group allowed, pooled like any other); a group is positive iff
// it holds a defective; the final stage tests every survivor individually.
inline StageTrace run_stages(const StagePlan& plan, const std::vector<std::size_t>& defectives,
                             Rng& rng) {
    std::vector<char> is_defective(plan.n, 0);
    for (std::size_t j : defectives) {
        if (j >= plan.n) throw std::domain_error("run_stages: defective index out of range");
        is_defective[j] = 1;
    }

    StageTrace trace;
    std::vector<std::size_t> pool(plan.n);
    std::iota(pool.begin(), pool.end(), 0);

    for (std::size_t stage = 0; stage + 1 < plan.s; ++stage) {
        const std::size_t ksize = plan.k[stage];
        rng.shuffle(pool);
        StageRecord rec;
        rec.pool_size = pool.size();
        std::vector<std::size_t> next_pool;
        for (std::size_t start = 0; start < pool.size(); start += ksize) {
            const std::size_t end = std::min(start + ksize, pool.size());
            ++rec.groups;
            bool positive = false;
            for (std::size_t t = start; t < end; ++t) {
                if (is_defective[pool[t]]) { positive = true; break; }
            }
            if (positive) {
                ++rec.positive_groups;
                next_pool.insert(next_pool.end(), pool.begin() + static_cast<long>(start),
                                 pool.begin() + static_cast<long>(end));
            }
        }
        rec.tests = rec.groups;
        trace.total_tests += rec.tests;
        trace.stages.push_back(rec);
        pool = std::move(next_pool);
        if (pool.empty()) break;
    }

    StageRecord last;
    last.pool_size = pool.size();
    last.groups = pool.size();
    last.tests = pool.size();
    for (std::size_t j : pool) {
        if (is_defective[j]) {
            ++last.positive_groups;
            trace.recovered.push_back(j);
        }
    }
    trace.total_tests += last.tests;
    trace.stages.push_back(last);
    std::sort(trace.recovered.begin(), trace.recovered.end());
    return trace;
}

// Deterministic per-realization ceiling on the test count when d defectives
// are present: ceil(n/k1) + sum_i ceil(d k_{i-1}/k_i) + d k_{s-1}.
inline std::size_t per_realization_test_bound(const StagePlan& plan, std::size_t d) {
    if (plan.s == 1) return plan.n;
    const auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
    std::size_t total = ceil_div(plan.n, plan.k[0]);
    for (std::size_t i = 1; i < plan.k.size(); ++i) {
        total += ceil_div(d * plan.k[i - 1], plan.k[i]);
    }
    total += d * plan.k.back();
    return total;
}

}  // namespace pgt

#endif
