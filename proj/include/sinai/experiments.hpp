#ifndef SINAI_EXPERIMENTS_HPP
#define SINAI_EXPERIMENTS_HPP

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sinai/environment.hpp"
#include "sinai/infinite_valley.hpp"
#include "sinai/measures.hpp"
#include "sinai/stats.hpp"

namespace sinai {

// Seed derivation layout: every replicate stream is
//   derive(derive(derive(master, stream_tag), n_index), replicate)
// so results are a pure function of (config, master seed) at any parallelism.
namespace streams {
inline constexpr std::uint64_t kEnv = 0xE14;
inline constexpr std::uint64_t kWalk = 0xA11;
inline constexpr std::uint64_t kSigmaEnv = 0x51E;
inline constexpr std::uint64_t kValley = 0x1F5;
inline constexpr std::uint64_t kGauss = 0x6A0;
inline constexpr std::uint64_t kOracle = 0x0AC;
}  // namespace streams

inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t stream, long n_index, long rep) {
    return rng::derive(rng::derive(rng::derive(master, stream), static_cast<std::uint64_t>(n_index)),
                       static_cast<std::uint64_t>(rep));
}

// f : {-1, +1} -> R identified by its two values.
struct StepFunction {
    double plus = 1.0;
    double minus = 0.0;
    double limit() const { return 0.5 * (plus + minus); }
};

// Acceptance thresholds; defaults are the pinned values of the verification
// protocol and the verdicts evaluate against them.
struct AcceptanceThresholds {
    double lln_final_prob_max = 0.05;
    double deviation_final_factor = 2.0;
    double deviation_final_abs = 0.02;
    double theorem1_inversion_allowance = 0.02;
    double theorem1_required_drop = 0.05;
    double clt_ks_max = 0.08;
    double growth_final_prob_min = 0.95;
    double variance_quantile_max = 0.95;
    double variance_quantile_noise = 0.03;
};

struct RunConfig {
    std::string experiment;
    EnvironmentDistribution dist = EnvironmentDistribution::two_point(0.3);
    std::vector<long> horizons{1000, 10000, 100000, 1000000};
    long replicates = 200;
    long sinfty_replicates = 0;  // 0 = same as replicates
    std::uint64_t master_seed = 20260810;

    std::string function_name = "center";  // cylinder catalog name
    double function_param = 1.0;           // for "constant"
    std::vector<double> table_xs, table_ys;

    StepFunction f;          // lln / clt
    double epsilon = 0.05;   // lln / deviation

    double eta_exp = 0.3;    // growth
    double growth_delta = 0.5;
    std::vector<long> k_grid{1, 2, 4, 8, 16, 32};
    bool growth_left = true;

    double quantile_q = 0.9;  // excursion variance
    long variance_check_excursions = 10000;

    double failure_budget = 0.01;
    long window_coeff = 10;  // walk window [-(m+2), coeff * ln^2 n]
    bool quenched = false;   // diagnostic: freeze the environment per n
    TruncationPolicy trunc;
    double tail_tol = 1e-9;
    AcceptanceThresholds accept;
    bool emit_valleys = true;

    CylinderFunction make_function() const;
    long sinfty_count() const { return sinfty_replicates > 0 ? sinfty_replicates : replicates; }
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CsvRow {
    std::string series;  // "<experiment>/<sub-series>" or the experiment name
    long n = 0;
    long replicate = 0;
    double value = 0.0;
};

struct ValleyRow {
    long n = 0;
    long replicate = 0;
    long bottom = 0;
    long right_edge = 0;
    double v_bottom = 0.0;
    double z_n = 0.0;
};

struct ReplicateFailure {
    long index = 0;
    std::string what;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json summary;  // per-n statistics
    std::vector<CsvRow> rows;
    std::vector<ValleyRow> valleys;
    std::vector<Verdict> verdicts;
    long replicates_requested = 0;
    long failures = 0;
    double failure_rate = 0.0;
    double failure_budget = 0.01;
    long window_doublings = 0;
    std::vector<std::string> events;

    bool verdicts_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
    bool within_budget() const { return failure_rate < failure_budget; }
    bool passed() const { return verdicts_pass() && within_budget(); }
};

// Deterministic parallel map over replicate indices: replicate i depends only
// on i, results land in slot i, and failed replicates are collected against
// the failure budget.  Worker count never changes the outcome.
template <class T>
struct ReplicationOutcome {
    std::vector<std::pair<long, T>> values;  // (replicate, value), ordered
    std::vector<ReplicateFailure> failures;
};

template <class T, class Task>
ReplicationOutcome<T> run_replications(long total, int jobs, Task&& task) {
    if (total < 0) throw DomainError("replicate count must be nonnegative");
    std::vector<std::optional<T>> slots(static_cast<size_t>(total));
    std::vector<std::string> errors(static_cast<size_t>(total));
    std::atomic<long> next{0};

    auto worker = [&]() {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= total) return;
            try {
                slots[static_cast<size_t>(i)] = task(i);
            } catch (const std::exception& e) {
                errors[static_cast<size_t>(i)] = e.what();
            } catch (...) {
                errors[static_cast<size_t>(i)] = "unknown error";
            }
        }
    };

    int nw = std::max(1, jobs);
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nw));
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ReplicationOutcome<T> out;
    for (long i = 0; i < total; ++i) {
        if (slots[static_cast<size_t>(i)])
            out.values.emplace_back(i, std::move(*slots[static_cast<size_t>(i)]));
        else
            out.failures.push_back({i, errors[static_cast<size_t>(i)]});
    }
    return out;
}

const std::vector<std::string>& experiment_names();

ExperimentReport run_lln(const RunConfig& cfg, int jobs);
ExperimentReport run_deviation(const RunConfig& cfg, int jobs);
ExperimentReport run_theorem1(const RunConfig& cfg, int jobs);
ExperimentReport run_clt(const RunConfig& cfg, int jobs);
ExperimentReport run_growth_diagnostic(const RunConfig& cfg, int jobs);
ExperimentReport run_excursion_variance(const RunConfig& cfg, int jobs);

// Dispatch by cfg.experiment.
ExperimentReport run_experiment(const RunConfig& cfg, int jobs);

// Walk/valley environment window for horizon n (margin covers cylinder radius).
Window walk_window(long n, long coeff, int margin);

// Max over x in [-b_n, c_n - b_n] of the partial exponential sums
//   A(x) = sum_{j=b}^{b+x-1} e^{V(j) - V(b+x-1)}   (x > 0)
//   A(x) = sum_{j=b+x}^{b-1} e^{V(j) - V(b+x)}     (x < 0),  A(0) = 0,
// evaluated with running log-sum-exp shifts.
double max_excursion_sum(const Potential& pot, const Valley& valley);

}  // namespace sinai

#endif
