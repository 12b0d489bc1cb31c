#ifndef PGT_HARNESS_HPP
#define PGT_HARNESS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pgt/bounds.hpp"
#include "pgt/channel.hpp"
#include "pgt/decode.hpp"
#include "pgt/design.hpp"
#include "pgt/dist.hpp"
#include "pgt/semiadaptive.hpp"

namespace pgt {

enum class Scheme { Method1, Method1Noisy, Method2, SemiAdaptive };

inline std::string scheme_tag(Scheme s) {
    switch (s) {
        case Scheme::Method1:      return "method1";
        case Scheme::Method1Noisy: return "method1-noisy";
        case Scheme::Method2:      return "method2";
        case Scheme::SemiAdaptive: return "semiadaptive";
    }
    return "method1";
}

inline Scheme scheme_from_tag(const std::string& tag) {
    if (tag == "method1")       return Scheme::Method1;
    if (tag == "method1-noisy") return Scheme::Method1Noisy;
    if (tag == "method2")       return Scheme::Method2;
    if (tag == "semiadaptive")  return Scheme::SemiAdaptive;
    throw std::invalid_argument("unknown scheme: " + tag);
}

struct ExperimentConfig {
    double lambda = 1.0;
    std::size_t n = 1;
    Scheme scheme = Scheme::Method1;
    std::size_t v = 0;  // error budget for the noisy scheme
    RegimeSpec regime = RegimeSpec::unbounded();
    std::optional<std::size_t> m_override;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    ErrorMode error_mode = ErrorMode::ExactlyV;
    // When set, every trial reuses this one design instead of drawing a
    // fresh matrix; used to study a single fixed pooling design.
    std::shared_ptr<const TestMatrix> fixed_matrix;
    unsigned threads = 0;  // 0 = pick automatically
};

struct TrialReport {
    std::size_t trial_id = 0;
    std::size_t d_true = 0;
    bool recovered_ok = false;
    std::size_t tests_used = 0;
    DecodeStatus status = DecodeStatus::Unique;
    std::vector<std::size_t> flips;
    std::string syndrome;  // '0'/'1' string; nonadaptive trials only
};

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval at 95%; behaves well when the error count is small.
inline ConfidenceInterval wilson_interval(std::size_t successes, std::size_t total) {
    if (total == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(total);
    const double ph = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (ph + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
    ConfidenceInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    // the edges are exact at degenerate counts; clear the roundoff
    if (successes == 0) ci.lo = 0.0;
    if (successes == total) ci.hi = 1.0;
    return ci;
}

struct AggregateReport {
    std::string scheme;
    double lambda = 0.0;
    std::size_t n = 0;
    std::size_t m_design = 0;  // 0 for the semi-adaptive scheme
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    std::size_t errors = 0;
    double error_rate = 0.0;
    ConfidenceInterval error_ci;
    double mean_tests = 0.0;
    ConfidenceInterval mean_tests_ci;

    double fano_lb = 0.0;
    double adaptive_lb = 0.0;
    double semiadaptive_ub = 0.0;

    bool operator==(const AggregateReport& other) const {
        return scheme == other.scheme && lambda == other.lambda && n == other.n &&
               m_design == other.m_design && trials == other.trials && seed == other.seed &&
               errors == other.errors && error_rate == other.error_rate &&
               mean_tests == other.mean_tests;
    }
};

namespace detail {

// Cheng-Du success target used when none is given: 1 - 1/ln n, kept inside (0, 1).
inline double default_chengdu_success(std::size_t n) {
    const double p = 1.0 - 1.0 / std::log(static_cast<double>(n));
    return std::clamp(p, 0.5, 1.0 - 1e-9);
}

inline std::size_t design_m(const ExperimentConfig& cfg, const TruncatedPoissonModel& model) {
    if (cfg.fixed_matrix) return cfg.fixed_matrix->rows();
    switch (cfg.scheme) {
        case Scheme::Method1:
        case Scheme::Method1Noisy: {
            if (cfg.m_override) return *cfg.m_override;
            const std::size_t v = cfg.scheme == Scheme::Method1Noisy ? cfg.v : 0;
            return method1_params(model, cfg.regime, v).m;
        }
        case Scheme::Method2: {
            ChengDuShape shape = chengdu_shape(select_delta(model, cfg.regime), cfg.n,
                                               default_chengdu_success(cfg.n));
            if (cfg.m_override) {
                // round the override up to a whole number of q-ary rows
                shape.t = std::max<std::size_t>(1, (*cfg.m_override + shape.q - 1) / shape.q);
                shape.m = shape.q * shape.t;
            }
            return shape.m;
        }
        case Scheme::SemiAdaptive:
            return 0;
    }
    return 0;
}

inline TestMatrix build_trial_matrix(const ExperimentConfig& cfg,
                                     const TruncatedPoissonModel& model, std::size_t m,
                                     std::uint64_t matrix_seed) {
    if (cfg.scheme == Scheme::Method2) {
        const std::size_t delta = select_delta(model, cfg.regime);
        const std::size_t q = 3 * delta;
        TestMatrix mat = chengdu_matrix_from_rows(q, m / q, cfg.n, matrix_seed);
        mat.meta().delta = delta;
        mat.meta().p = default_chengdu_success(cfg.n);
        return mat;
    }
    const std::size_t v = cfg.scheme == Scheme::Method1Noisy ? cfg.v : 0;
    const Method1Params params = method1_params(model, cfg.regime, v);
    return bernoulli_matrix(m, cfg.n, params.p, matrix_seed);
}

template <class Body>
inline void for_each_trial(std::size_t trials, unsigned threads, Body&& body) {
    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, 8));
    if (workers == 1 || trials < 64) {
        for (std::size_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            try {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= trials) return;
                    body(t);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(trials);  // stop the other workers
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline void attach_bounds(AggregateReport& rep, const TruncatedPoissonModel& model,
                          const ExperimentConfig& cfg) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double eps = cfg.regime.kind == RegimeSpec::Kind::UnboundedLambda
                           ? cfg.regime.epsilon
                           : 0.1;
    try {
        rep.fano_lb = fano_lower_bound(cfg.lambda, cfg.n, eps)[1].value;
    } catch (const std::domain_error&) {
        rep.fano_lb = nan;
    }
    try {
        rep.adaptive_lb = adaptive_lower_bound(cfg.lambda, cfg.n).value;
    } catch (const std::domain_error&) {
        rep.adaptive_lb = nan;
    }
    try {
        rep.semiadaptive_ub = semiadaptive_upper_bound(model.mean(), cfg.n).value;
    } catch (const std::domain_error&) {
        rep.semiadaptive_ub = nan;
    }
}

inline AggregateReport aggregate(const ExperimentConfig& cfg, const TruncatedPoissonModel& model,
                                 const std::vector<TrialReport>& reports, std::size_t m_design) {
    AggregateReport rep;
    rep.scheme = scheme_tag(cfg.scheme);
    rep.lambda = cfg.lambda;
    rep.n = cfg.n;
    rep.m_design = m_design;
    rep.trials = cfg.trials;
    rep.seed = cfg.seed;

    double sum_tests = 0.0;
    for (const TrialReport& tr : reports) {
        if (!tr.recovered_ok) ++rep.errors;
        sum_tests += static_cast<double>(tr.tests_used);
    }
    rep.error_rate = static_cast<double>(rep.errors) / static_cast<double>(cfg.trials);
    rep.error_ci = wilson_interval(rep.errors, cfg.trials);
    rep.mean_tests = sum_tests / static_cast<double>(cfg.trials);
    double ss = 0.0;
    for (const TrialReport& tr : reports) {
        const double dev = static_cast<double>(tr.tests_used) - rep.mean_tests;
        ss += dev * dev;
    }
    const double sd = cfg.trials > 1 ? std::sqrt(ss / static_cast<double>(cfg.trials - 1)) : 0.0;
    const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(cfg.trials));
    rep.mean_tests_ci = {rep.mean_tests - half, rep.mean_tests + half};

    attach_bounds(rep, model, cfg);
    return rep;
}

}  // namespace detail

// Monte Carlo estimate of the error rate of a nonadaptive scheme. Per trial:
// a fresh matrix (unless a fixed one is configured), a defective set drawn
// from the model, the syndrome, optional error injection, and the scheme's
// decoder. Deterministic given the config; trials may run on several threads.
inline AggregateReport run_nonadaptive(const ExperimentConfig& cfg,
                                       std::vector<TrialReport>* trace = nullptr) {
    if (cfg.scheme == Scheme::SemiAdaptive) {
        throw std::invalid_argument("run_nonadaptive: config requests the semi-adaptive scheme");
    }
    if (cfg.trials < 1) throw std::domain_error("run_nonadaptive: trials must be >= 1");
    const TruncatedPoissonModel model(cfg.lambda, cfg.n);
    const std::size_t m = detail::design_m(cfg, model);

    std::vector<TrialReport> reports(cfg.trials);
    detail::for_each_trial(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t trial_master = mix_seed(cfg.seed, t);
        Rng defect_rng = Rng::from_stream(trial_master, 2);

        const long d = model.sample(defect_rng);
        const std::vector<std::size_t> defectives =
            defect_rng.distinct_subset(cfg.n, static_cast<std::size_t>(d));

        TrialReport tr;
        tr.trial_id = t;
        tr.d_true = static_cast<std::size_t>(d);
        tr.tests_used = m;

        const TestMatrix* mat;
        std::optional<TestMatrix> fresh;
        if (cfg.fixed_matrix) {
            mat = cfg.fixed_matrix.get();
        } else {
            fresh.emplace(detail::build_trial_matrix(cfg, model, m, mix_seed(trial_master, 1)));
            mat = &*fresh;
        }

        Syndrome y = syndrome(*mat, defectives);
        DecodeResult result;
        if (cfg.scheme == Scheme::Method1Noisy) {
            Rng err_rng = Rng::from_stream(trial_master, 3);
            y = inject_errors(y, cfg.v, cfg.error_mode, err_rng);
            tr.flips = y.flips;
            result = decode_threshold(*mat, y, cfg.v);
        } else {
            result = decode_support(*mat, y);
        }
        tr.status = result.status;
        tr.recovered_ok =
            result.status == DecodeStatus::Unique && result.recovered == defectives;
        tr.syndrome = y.to_string();
        reports[t] = std::move(tr);
    });

    if (trace) *trace = reports;
    return detail::aggregate(cfg, model, reports, m);
}

// Monte Carlo run of the s-stage algorithm. The plan is derived from the
// model mean; recovery is exact on every trial by construction.
inline AggregateReport run_semiadaptive(const ExperimentConfig& cfg,
                                        std::vector<TrialReport>* trace = nullptr,
                                        std::vector<StageTrace>* stage_traces = nullptr) {
    if (cfg.scheme != Scheme::SemiAdaptive) {
        throw std::invalid_argument("run_semiadaptive: config must request the semi-adaptive scheme");
    }
    if (cfg.trials < 1) throw std::domain_error("run_semiadaptive: trials must be >= 1");
    const TruncatedPoissonModel model(cfg.lambda, cfg.n);
    const StagePlan plan = stage_plan(cfg.n, model.mean());

    std::vector<TrialReport> reports(cfg.trials);
    std::vector<StageTrace> traces(stage_traces ? cfg.trials : 0);
    detail::for_each_trial(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t trial_master = mix_seed(cfg.seed, t);
        Rng defect_rng = Rng::from_stream(trial_master, 2);
        const long d = model.sample(defect_rng);
        const std::vector<std::size_t> defectives =
            defect_rng.distinct_subset(cfg.n, static_cast<std::size_t>(d));

        Rng stage_rng = Rng::from_stream(trial_master, 4);
        StageTrace st = run_stages(plan, defectives, stage_rng);

        TrialReport tr;
        tr.trial_id = t;
        tr.d_true = static_cast<std::size_t>(d);
        tr.tests_used = st.total_tests;
        tr.recovered_ok = st.recovered == defectives;
        tr.status = DecodeStatus::Unique;
        reports[t] = std::move(tr);
        if (stage_traces) traces[t] = std::move(st);
    });

    if (trace) *trace = reports;
    if (stage_traces) *stage_traces = std::move(traces);
    return detail::aggregate(cfg, model, reports, 0);
}

inline AggregateReport run_experiment(const ExperimentConfig& cfg,
                                      std::vector<TrialReport>* trace = nullptr) {
    return cfg.scheme == Scheme::SemiAdaptive ? run_semiadaptive(cfg, trace)
                                              : run_nonadaptive(cfg, trace);
}

inline const char* kSweepCsvHeader =
    "scheme,lambda,n,m,trials,error_rate,ci_lo,ci_hi,mean_tests,"
    "fano_lb,adaptive_lb,semiadaptive_ub,seed";

inline std::string sweep_csv_row(const AggregateReport& rep) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%s,%.17g,%zu,%zu,%zu,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%llu",
                  rep.scheme.c_str(), rep.lambda, rep.n, rep.m_design, rep.trials,
                  rep.error_rate, rep.error_ci.lo, rep.error_ci.hi, rep.mean_tests,
                  rep.fano_lb, rep.adaptive_lb, rep.semiadaptive_ub,
                  static_cast<unsigned long long>(rep.seed));
    return buf;
}

// One CSV row per config. Row i runs with a seed derived from (config seed,
// row index), so repeated configs give independent trials.
inline void sweep(const std::vector<ExperimentConfig>& configs, std::ostream& os) {
    if (configs.empty()) throw std::invalid_argument("sweep: config list is empty");
    os << kSweepCsvHeader << '\n';
    for (std::size_t row = 0; row < configs.size(); ++row) {
        ExperimentConfig cfg = configs[row];
        cfg.seed = mix_seed(cfg.seed, row);
        os << sweep_csv_row(run_experiment(cfg)) << '\n';
    }
}

inline void sweep(const std::vector<ExperimentConfig>& configs, const std::string& output_path) {
    std::ofstream os(output_path);
    if (!os) throw std::runtime_error("sweep: cannot open for writing: " + output_path);
    sweep(configs, os);
    if (!os.good()) throw std::runtime_error("sweep: write failed: " + output_path);
}

}  // namespace pgt

#endif
