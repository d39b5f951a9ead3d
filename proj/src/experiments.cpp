#include "sinai/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sinai/valley.hpp"
#include "sinai/walk.hpp"

namespace sinai {

using nlohmann::json;

namespace {

constexpr int kMaxDoublings = 24;

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Re-sample the environment with a doubled window when the body runs out of
// it; exact under the counter-based site generator, so the retried run
// replays the identical history.
template <class Body>
auto with_env_retry(const EnvironmentDistribution& dist, Window w0, std::uint64_t env_seed,
                    long& doublings, Body&& body) {
    Window w = w0;
    for (int attempt = 0;; ++attempt) {
        Environment env = sample_environment(dist, w, env_seed);
        try {
            return body(env);
        } catch (const OutOfWindowError& e) {
            if (attempt >= kMaxDoublings) throw;
            ++doublings;
            if (e.site > w.hi)
                w.hi = 2 * w.hi + 16;
            else
                w.lo = 2 * w.lo - 16;
        }
    }
}

bool non_increasing(const std::vector<double>& xs, double slack = 0.0) {
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        if (xs[i + 1] > xs[i] + slack) return false;
    return true;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct DoublingLog {
    long total = 0;
    std::vector<std::string> events;

    void note(const std::string& experiment, long n, long rep, long count) {
        if (count == 0) return;
        total += count;
        events.push_back(experiment + " n=" + std::to_string(n) + " replicate " + std::to_string(rep) +
                         ": window doubled " + std::to_string(count) + "x");
    }
};

void absorb_failures(ExperimentReport& rep, const std::vector<ReplicateFailure>& fails,
                     const std::string& stage, long n) {
    rep.failures += static_cast<long>(fails.size());
    for (const auto& f : fails)
        rep.events.push_back(stage + " n=" + std::to_string(n) + " replicate " +
                             std::to_string(f.index) + " failed: " + f.what);
}

void finish_report(ExperimentReport& rep, const DoublingLog& log) {
    rep.window_doublings = log.total;
    rep.events.insert(rep.events.end(), log.events.begin(), log.events.end());
    rep.failure_rate =
        rep.replicates_requested > 0
            ? static_cast<double>(rep.failures) / static_cast<double>(rep.replicates_requested)
            : 0.0;
}

}  // namespace

CylinderFunction RunConfig::make_function() const {
    if (function_name == "table") return cylinder_table(table_xs, table_ys);
    return cylinder_from_catalog(function_name, function_param);
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"theorem1", "deviation", "lln",
                                                "clt",      "growth",    "excursion_variance"};
    return names;
}

Window walk_window(long n, long coeff, int margin) {
    double ln = std::log(static_cast<double>(std::max<long>(n, 2)));
    long hi = static_cast<long>(std::ceil(static_cast<double>(coeff) * ln * ln)) + margin + 2;
    return Window{-(static_cast<long>(margin) + 2), hi};
}

double max_excursion_sum(const Potential& pot, const Valley& valley) {
    const long b = valley.bottom;
    const long c = valley.right_edge;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double best = 0.0;
    double lse = neg_inf;  // log sum_{j=b}^{b+x-1} e^{V(j)}
    for (long x = 1; x <= c - b; ++x) {
        double vj = pot.value(b + x - 1);
        lse = logaddexp(lse, vj);
        best = std::max(best, std::exp(lse - vj));
    }
    lse = neg_inf;  // log sum_{j=b+x}^{b-1} e^{V(j)}
    for (long x = -1; x >= -b; --x) {
        double vj = pot.value(b + x);
        lse = logaddexp(lse, vj);
        best = std::max(best, std::exp(lse - vj));
    }
    return best;
}

ExperimentReport run_lln(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "lln";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    const double limit = cfg.f.limit();
    std::vector<double> probs;
    json per_n = json::array();

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, 0);
        auto task = [&, n, ni](long i) {
            std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv,
                                                    static_cast<long>(ni), cfg.quenched ? 0 : i);
            std::uint64_t walk_seed =
                replicate_seed(cfg.master_seed, streams::kWalk, static_cast<long>(ni), i);
            long doublings = 0;
            double mean = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                long up = 0;
                walk_stream(env, n + 1, walk_seed, [&](long k, long from, long to) {
                    if (k >= 1 && to > from) ++up;
                });
                return (cfg.f.plus * static_cast<double>(up) +
                        cfg.f.minus * static_cast<double>(n - up)) /
                       static_cast<double>(n);
            });
            return std::pair<double, long>{mean, doublings};
        };
        auto out = run_replications<std::pair<double, long>>(cfg.replicates, jobs, task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, out.failures, "lln", n);

        long exceed = 0;
        for (const auto& [i, v] : out.values) {
            rep.rows.push_back({"lln", n, i, v.first});
            dlog.note("lln", n, i, v.second);
            if (std::abs(v.first - limit) > cfg.epsilon) ++exceed;
        }
        double prob = out.values.empty()
                          ? 1.0
                          : static_cast<double>(exceed) / static_cast<double>(out.values.size());
        probs.push_back(prob);
        per_n.push_back({{"n", n},
                         {"prob_exceed", prob},
                         {"epsilon", cfg.epsilon},
                         {"limit", limit},
                         {"replicates_ok", out.values.size()}});
    }

    rep.summary["per_n"] = per_n;
    rep.summary["limit"] = limit;
    rep.verdicts.push_back({"deviation_prob_non_increasing", non_increasing(probs),
                            "P(|mean-limit|>eps) per n: " + [&] {
                                std::string s;
                                for (double p : probs) s += fmt(p) + " ";
                                return s;
                            }()});
    rep.verdicts.push_back({"final_prob_below_threshold",
                            !probs.empty() && probs.back() <= cfg.accept.lln_final_prob_max,
                            "final " + fmt(probs.empty() ? 1.0 : probs.back()) +
                                " <= " + fmt(cfg.accept.lln_final_prob_max)});
    finish_report(rep, dlog);
    return rep;
}

ExperimentReport run_deviation(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "deviation";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    const CylinderFunction F = cfg.make_function();
    std::vector<double> probs;
    json per_n = json::array();

    struct Pair {
        double sn, sigma;
        long doublings;
    };

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, F.radius());
        auto task = [&, n, ni](long i) {
            std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv,
                                                    static_cast<long>(ni), cfg.quenched ? 0 : i);
            std::uint64_t walk_seed =
                replicate_seed(cfg.master_seed, streams::kWalk, static_cast<long>(ni), i);
            long doublings = 0;
            auto pr = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                LocalTimeProfile lt = simulate_local_times(env, n, walk_seed);
                double sn = s_n_eval(lt, env, F).value;
                Potential pot = potential(env);
                Valley v = find_valley(pot, n);
                ValleyMeasure mu = mu_n(pot, v);
                double sg = sigma_n_eval(mu, env, F).value;
                return std::pair<double, double>{sn, sg};
            });
            return Pair{pr.first, pr.second, doublings};
        };
        auto out = run_replications<Pair>(cfg.replicates, jobs, task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, out.failures, "deviation", n);

        long exceed = 0;
        for (const auto& [i, v] : out.values) {
            rep.rows.push_back({"deviation/sn", n, i, v.sn});
            rep.rows.push_back({"deviation/sigma_n", n, i, v.sigma});
            rep.rows.push_back({"deviation/absdiff", n, i, std::abs(v.sn - v.sigma)});
            dlog.note("deviation", n, i, v.doublings);
            if (std::abs(v.sn - v.sigma) > cfg.epsilon) ++exceed;
        }
        double prob = out.values.empty()
                          ? 1.0
                          : static_cast<double>(exceed) / static_cast<double>(out.values.size());
        probs.push_back(prob);
        per_n.push_back({{"n", n},
                         {"prob_exceed", prob},
                         {"epsilon", cfg.epsilon},
                         {"replicates_ok", out.values.size()}});
    }

    rep.summary["per_n"] = per_n;
    rep.verdicts.push_back({"deviation_prob_non_increasing", non_increasing(probs), [&] {
                                std::string s = "P(|S_n-Sigma_n|>eps) per n: ";
                                for (double p : probs) s += fmt(p) + " ";
                                return s;
                            }()});
    bool final_ok = false;
    if (!probs.empty()) {
        double first = probs.front(), last = probs.back();
        final_ok = (last <= first / cfg.accept.deviation_final_factor) ||
                   (last <= cfg.accept.deviation_final_abs);
    }
    rep.verdicts.push_back(
        {"final_prob_drop", final_ok,
         "first " + fmt(probs.empty() ? 1.0 : probs.front()) + " -> last " +
             fmt(probs.empty() ? 1.0 : probs.back()) + " (factor " +
             fmt(cfg.accept.deviation_final_factor) + " or <= " + fmt(cfg.accept.deviation_final_abs) + ")"});
    finish_report(rep, dlog);
    return rep;
}

namespace {

// Shared by theorem1/clt: one S_infty functional value per adaptive draw.
std::vector<std::pair<long, double>> draw_s_infty(const RunConfig& cfg, const InfiniteValleySampler& sampler,
                                                  const CylinderFunction& F, long count, long n_index,
                                                  int jobs, ExperimentReport& rep, long n_tag) {
    auto task = [&](long i) {
        auto s = sampler.sample_adaptive(
            replicate_seed(cfg.master_seed, streams::kValley, n_index, i), cfg.trunc);
        return s_infty_eval(s, F).value;
    };
    auto out = run_replications<double>(count, jobs, task);
    rep.replicates_requested += count;
    absorb_failures(rep, out.failures, rep.experiment + "/s_infty", n_tag);
    return out.values;
}

}  // namespace

ExperimentReport run_theorem1(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "theorem1";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    const CylinderFunction F = cfg.make_function();
    InfiniteValleySampler sampler(cfg.dist);

    auto inf_values = draw_s_infty(cfg, sampler, F, cfg.sinfty_count(), 0, jobs, rep, 0);
    for (const auto& [i, v] : inf_values) rep.rows.push_back({"theorem1/s_infty", 0, i, v});
    DistributionSample inf_sample = DistributionSample::from_raw(inf_values);

    std::vector<double> ks_sn_seq, ks_sigma_seq;
    json per_n = json::array();

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, F.radius());

        auto sn_task = [&, n, ni](long i) {
            std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv,
                                                    static_cast<long>(ni), cfg.quenched ? 0 : i);
            std::uint64_t walk_seed =
                replicate_seed(cfg.master_seed, streams::kWalk, static_cast<long>(ni), i);
            long doublings = 0;
            double v = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                LocalTimeProfile lt = simulate_local_times(env, n, walk_seed);
                return s_n_eval(lt, env, F).value;
            });
            return std::pair<double, long>{v, doublings};
        };
        auto sn_out = run_replications<std::pair<double, long>>(cfg.replicates, jobs, sn_task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, sn_out.failures, "theorem1/sn", n);

        auto sigma_task = [&, n, ni](long i) {
            std::uint64_t env_seed =
                replicate_seed(cfg.master_seed, streams::kSigmaEnv, static_cast<long>(ni), i);
            long doublings = 0;
            double v = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                Potential pot = potential(env);
                Valley val = find_valley(pot, n);
                ValleyMeasure mu = mu_n(pot, val);
                return sigma_n_eval(mu, env, F).value;
            });
            return std::pair<double, long>{v, doublings};
        };
        auto sigma_out = run_replications<std::pair<double, long>>(cfg.replicates, jobs, sigma_task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, sigma_out.failures, "theorem1/sigma_n", n);

        std::vector<std::pair<long, double>> sn_raw, sigma_raw;
        for (const auto& [i, v] : sn_out.values) {
            rep.rows.push_back({"theorem1/sn", n, i, v.first});
            dlog.note("theorem1/sn", n, i, v.second);
            sn_raw.emplace_back(i, v.first);
        }
        for (const auto& [i, v] : sigma_out.values) {
            rep.rows.push_back({"theorem1/sigma_n", n, i, v.first});
            dlog.note("theorem1/sigma_n", n, i, v.second);
            sigma_raw.emplace_back(i, v.first);
        }

        DistributionSample sn_sample = DistributionSample::from_raw(sn_raw);
        DistributionSample sigma_sample = DistributionSample::from_raw(sigma_raw);
        double ks_sn = ks_two_sample(sn_sample, inf_sample);
        double ks_sigma = ks_two_sample(sigma_sample, inf_sample);
        ks_sn_seq.push_back(ks_sn);
        ks_sigma_seq.push_back(ks_sigma);

        json row{{"n", n}, {"ks_sn_vs_sinfty", ks_sn}, {"ks_sigma_vs_sinfty", ks_sigma}};
        if (sn_sample.size() == inf_sample.size())
            row["w1_sn_vs_sinfty"] = wasserstein1(sn_sample, inf_sample);
        if (sigma_sample.size() == inf_sample.size())
            row["w1_sigma_vs_sinfty"] = wasserstein1(sigma_sample, inf_sample);
        per_n.push_back(row);
    }

    rep.summary["per_n"] = per_n;

    // Trend gate on the environment-only sequence; the walk sequence is
    // reported alongside.
    auto trend_verdict = [&](const std::vector<double>& ks) {
        int inversions = 0;
        double worst = 0.0;
        for (size_t i = 0; i + 1 < ks.size(); ++i) {
            if (ks[i + 1] > ks[i]) {
                ++inversions;
                worst = std::max(worst, ks[i + 1] - ks[i]);
            }
        }
        return std::pair<bool, std::string>{
            inversions == 0 || (inversions == 1 && worst <= cfg.accept.theorem1_inversion_allowance),
            std::to_string(inversions) + " inversion(s), worst " + fmt(worst)};
    };
    auto [trend_ok, trend_detail] = trend_verdict(ks_sigma_seq);
    rep.verdicts.push_back({"ks_sigma_trend_non_increasing", trend_ok, trend_detail + "; ks_sigma: " + [&] {
                                std::string s;
                                for (double k : ks_sigma_seq) s += fmt(k) + " ";
                                return s;
                            }()});
    bool drop_ok = !ks_sigma_seq.empty() &&
                   ks_sigma_seq.back() <= ks_sigma_seq.front() - cfg.accept.theorem1_required_drop;
    rep.verdicts.push_back({"ks_sigma_final_drop", drop_ok,
                            "first " + fmt(ks_sigma_seq.empty() ? 0.0 : ks_sigma_seq.front()) +
                                " -> last " + fmt(ks_sigma_seq.empty() ? 0.0 : ks_sigma_seq.back()) +
                                " (required drop " + fmt(cfg.accept.theorem1_required_drop) + ")"});
    rep.summary["ks_sn_sequence"] = ks_sn_seq;
    rep.summary["ks_sigma_sequence"] = ks_sigma_seq;
    finish_report(rep, dlog);
    return rep;
}

ExperimentReport run_clt(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "clt";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    InfiniteValleySampler sampler(cfg.dist);
    const CylinderFunction var_f = cylinder_from_catalog("center_variance");
    const double df2 = (cfg.f.plus - cfg.f.minus) * (cfg.f.plus - cfg.f.minus);
    json per_n = json::array();
    std::vector<double> ks_seq;

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, 0);

        auto z_task = [&, n, ni](long i) {
            std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv,
                                                    static_cast<long>(ni), cfg.quenched ? 0 : i);
            std::uint64_t walk_seed =
                replicate_seed(cfg.master_seed, streams::kWalk, static_cast<long>(ni), i);
            long doublings = 0;
            double z = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                std::vector<std::int64_t> xi(64, 0);
                long up = 0;
                walk_stream(env, n + 1, walk_seed, [&](long k, long from, long to) {
                    if (k < n) {
                        if (to >= static_cast<long>(xi.size()))
                            xi.resize(static_cast<size_t>(to) * 2 + 1, 0);
                        ++xi[static_cast<size_t>(to)];
                    }
                    if (k >= 1 && to > from) ++up;
                });
                // Compensator: the true quenched conditional mean of f(dX),
                // which is f(+1) at the reflecting site 0.
                KahanSum comp;
                for (long x = 0; x < static_cast<long>(xi.size()); ++x) {
                    std::int64_t c = xi[static_cast<size_t>(x)];
                    if (c == 0) continue;
                    double p_up = (x == 0) ? 1.0 : env.omega(x);
                    comp.add(static_cast<double>(c) *
                             (cfg.f.plus * p_up + cfg.f.minus * (1.0 - p_up)));
                }
                double raw = cfg.f.plus * static_cast<double>(up) +
                             cfg.f.minus * static_cast<double>(n - up);
                return (raw - comp.value()) / std::sqrt(static_cast<double>(n));
            });
            return std::pair<double, long>{z, doublings};
        };
        auto z_out = run_replications<std::pair<double, long>>(cfg.replicates, jobs, z_task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, z_out.failures, "clt/z_n", n);

        auto mix_task = [&, ni](long i) {
            auto s = sampler.sample_adaptive(
                replicate_seed(cfg.master_seed, streams::kValley, static_cast<long>(ni), i), cfg.trunc);
            double eta2 = df2 * s_infty_eval(s, var_f).value;
            rng::SplitMix64 gauss(
                replicate_seed(cfg.master_seed, streams::kGauss, static_cast<long>(ni), i));
            return std::sqrt(std::max(0.0, eta2)) * gauss.next_normal();
        };
        auto mix_out = run_replications<double>(cfg.replicates, jobs, mix_task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, mix_out.failures, "clt/mixture", n);

        std::vector<std::pair<long, double>> z_raw;
        for (const auto& [i, v] : z_out.values) {
            rep.rows.push_back({"clt/z_n", n, i, v.first});
            dlog.note("clt", n, i, v.second);
            z_raw.emplace_back(i, v.first);
        }
        for (const auto& [i, v] : mix_out.values) rep.rows.push_back({"clt/mixture", n, i, v});

        double ks = ks_two_sample(DistributionSample::from_raw(z_raw),
                                  DistributionSample::from_raw(mix_out.values));
        ks_seq.push_back(ks);
        per_n.push_back({{"n", n},
                         {"ks_z_vs_mixture", ks},
                         {"replicates_ok", z_out.values.size()},
                         {"mixture_ok", mix_out.values.size()}});
    }

    rep.summary["per_n"] = per_n;
    bool all_ok = true;
    for (double k : ks_seq) all_ok = all_ok && (k <= cfg.accept.clt_ks_max);
    rep.verdicts.push_back({"ks_z_vs_mixture_below_threshold", all_ok, [&] {
                                std::string s = "ks per n: ";
                                for (double k : ks_seq) s += fmt(k) + " ";
                                s += "(max " + fmt(cfg.accept.clt_ks_max) + ")";
                                return s;
                            }()});
    finish_report(rep, dlog);
    return rep;
}

ExperimentReport run_growth_diagnostic(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "growth";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    const bool left_side = cfg.growth_left && cfg.dist.arithmetic();
    const size_t nk = cfg.k_grid.size();
    json per_n = json::array();
    bool all_monotone = true, all_final = true;

    struct GrowthOut {
        std::vector<std::uint8_t> right, left;
        ValleyRow valley;
        long doublings;
    };

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, 0);
        auto task = [&, n, ni](long i) {
            std::uint64_t env_seed =
                replicate_seed(cfg.master_seed, streams::kEnv, static_cast<long>(ni), i);
            long doublings = 0;
            GrowthOut g = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                Potential pot = potential(env);
                Valley val = find_valley(pot, n);
                const long b = val.bottom, c = val.right_edge;
                const double vb = pot.value(b);

                // suffix-AND of pointwise bounds so each K reads one flag
                std::vector<std::uint8_t> right_ok(static_cast<size_t>(c - b) + 2, 1);
                for (long x = c - b; x >= 1; --x)
                    right_ok[static_cast<size_t>(x)] =
                        right_ok[static_cast<size_t>(x + 1)] &&
                        (pot.value(b + x) - vb >=
                         cfg.growth_delta * std::pow(static_cast<double>(x), cfg.eta_exp));
                std::vector<std::uint8_t> left_ok(static_cast<size_t>(b) + 2, 1);
                if (left_side)
                    for (long x = b; x >= 1; --x)
                        left_ok[static_cast<size_t>(x)] =
                            left_ok[static_cast<size_t>(x + 1)] &&
                            (pot.value(b - x) - vb >= std::pow(static_cast<double>(x), cfg.eta_exp));

                GrowthOut out;
                for (long k : cfg.k_grid) {
                    out.right.push_back(k > c - b ? 1 : right_ok[static_cast<size_t>(k)]);
                    if (left_side) out.left.push_back(k > b ? 1 : left_ok[static_cast<size_t>(k)]);
                }
                ValleyMeasure mu = mu_n(pot, val);
                out.valley = ValleyRow{n, 0, b, c, vb, mu.z_n};
                return out;
            });
            g.doublings = doublings;
            return g;
        };
        auto out = run_replications<GrowthOut>(cfg.replicates, jobs, task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, out.failures, "growth", n);

        std::vector<long> right_counts(nk, 0), left_counts(nk, 0);
        for (const auto& [i, g] : out.values) {
            dlog.note("growth", n, i, g.doublings);
            if (cfg.emit_valleys) {
                ValleyRow vr = g.valley;
                vr.replicate = i;
                rep.valleys.push_back(vr);
            }
            for (size_t k = 0; k < nk; ++k) {
                right_counts[k] += g.right[k];
                rep.rows.push_back({"growth/right_K" + std::to_string(cfg.k_grid[k]), n, i,
                                    static_cast<double>(g.right[k])});
                if (left_side) {
                    left_counts[k] += g.left[k];
                    rep.rows.push_back({"growth/left_K" + std::to_string(cfg.k_grid[k]), n, i,
                                        static_cast<double>(g.left[k])});
                }
            }
        }
        const double denom = std::max<double>(1.0, static_cast<double>(out.values.size()));
        json row{{"n", n}};
        std::vector<double> right_probs, left_probs;
        for (size_t k = 0; k < nk; ++k) {
            right_probs.push_back(static_cast<double>(right_counts[k]) / denom);
            if (left_side) left_probs.push_back(static_cast<double>(left_counts[k]) / denom);
        }
        row["K"] = cfg.k_grid;
        row["right_prob"] = right_probs;
        if (left_side) row["left_prob"] = left_probs;
        per_n.push_back(row);

        for (size_t k = 0; k + 1 < nk; ++k)
            if (right_probs[k + 1] < right_probs[k]) all_monotone = false;
        if (right_probs.empty() || right_probs.back() < cfg.accept.growth_final_prob_min)
            all_final = false;
    }

    rep.summary["per_n"] = per_n;
    rep.summary["left_side_enabled"] = left_side;
    rep.verdicts.push_back({"right_event_prob_non_decreasing_in_K", all_monotone,
                            "checked on every n of the grid"});
    rep.verdicts.push_back({"right_event_prob_final_K", all_final,
                            "P(K=max) >= " + fmt(cfg.accept.growth_final_prob_min) + " for every n"});
    finish_report(rep, dlog);
    return rep;
}

ExperimentReport run_excursion_variance(const RunConfig& cfg, int jobs) {
    ExperimentReport rep;
    rep.experiment = "excursion_variance";
    rep.failure_budget = cfg.failure_budget;
    DoublingLog dlog;
    json per_n = json::array();
    std::vector<double> quantiles;

    struct Out {
        double log_ratio;
        ValleyRow valley;
        long doublings;
    };

    for (size_t ni = 0; ni < cfg.horizons.size(); ++ni) {
        const long n = cfg.horizons[ni];
        const Window w0 = walk_window(n, cfg.window_coeff, 0);
        auto task = [&, n, ni](long i) {
            std::uint64_t env_seed =
                replicate_seed(cfg.master_seed, streams::kEnv, static_cast<long>(ni), i);
            long doublings = 0;
            Out o = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
                Potential pot = potential(env);
                Valley val = find_valley(pot, n);
                double m = max_excursion_sum(pot, val);
                ValleyMeasure mu = mu_n(pot, val);
                return Out{std::log(std::max(m, 1.0)) / std::log(static_cast<double>(n)),
                           ValleyRow{n, 0, val.bottom, val.right_edge, pot.value(val.bottom), mu.z_n},
                           0};
            });
            o.doublings = doublings;
            return o;
        };
        auto out = run_replications<Out>(cfg.replicates, jobs, task);
        rep.replicates_requested += cfg.replicates;
        absorb_failures(rep, out.failures, "excursion_variance", n);

        std::vector<double> ratios;
        for (const auto& [i, o] : out.values) {
            rep.rows.push_back({"excursion_variance/log_ratio", n, i, o.log_ratio});
            dlog.note("excursion_variance", n, i, o.doublings);
            if (cfg.emit_valleys) {
                ValleyRow vr = o.valley;
                vr.replicate = i;
                rep.valleys.push_back(vr);
            }
            ratios.push_back(o.log_ratio);
        }
        std::sort(ratios.begin(), ratios.end());
        double q = ratios.empty() ? 1.0 : quantile(ratios, cfg.quantile_q);
        quantiles.push_back(q);
        per_n.push_back({{"n", n},
                         {"quantile", cfg.quantile_q},
                         {"log_ratio_quantile", q},
                         {"replicates_ok", out.values.size()}});
    }

    rep.summary["per_n"] = per_n;
    bool below = true;
    for (double q : quantiles) below = below && (q <= cfg.accept.variance_quantile_max);
    rep.verdicts.push_back({"quantile_below_threshold", below, [&] {
                                std::string s = "q" + fmt(cfg.quantile_q) + "(log M_n / log n): ";
                                for (double q : quantiles) s += fmt(q) + " ";
                                s += "(max " + fmt(cfg.accept.variance_quantile_max) + ")";
                                return s;
                            }()});
    rep.verdicts.push_back({"quantile_non_increasing_within_noise",
                            non_increasing(quantiles, cfg.accept.variance_quantile_noise),
                            "noise allowance " + fmt(cfg.accept.variance_quantile_noise)});

    // Spot check Var(Y_x) <= 4/beta(x) by simulating excursions of the
    // doubly-reflected chain from b_n, at one interior site.
    if (cfg.variance_check_excursions > 0 && !cfg.horizons.empty()) {
        const long n = cfg.horizons.back();
        std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv,
                                                static_cast<long>(cfg.horizons.size()) - 1, 0);
        long doublings = 0;
        const Window w0 = walk_window(n, cfg.window_coeff, 0);
        auto check = with_env_retry(cfg.dist, w0, env_seed, doublings, [&](const Environment& env) {
            Potential pot = potential(env);
            Valley val = find_valley(pot, n);
            const long b = val.bottom, c = val.right_edge;
            const long x_star = b + std::max<long>(1, (c - b) / 4);
            double beta = (1.0 - env.omega(x_star)) *
                          hitting_probability_to_left(pot, x_star - 1, b, x_star);

            rng::SplitMix64 gen(rng::derive(cfg.master_seed, streams::kOracle));
            std::vector<double> ys;
            ys.reserve(static_cast<size_t>(cfg.variance_check_excursions));
            for (long e = 0; e < cfg.variance_check_excursions; ++e) {
                long x = b;
                long visits = 0;
                do {
                    if (x == 0)
                        x = 1;
                    else if (x == c)
                        x = c - 1;
                    else
                        x += (gen.next_unit() < env.omega(x)) ? 1 : -1;
                    if (x == x_star) ++visits;
                } while (x != b);
                ys.push_back(static_cast<double>(visits));
            }
            Moments mo = moments(ys);
            json j{{"x_star_offset", x_star - b},
                   {"beta", beta},
                   {"bound", 4.0 / beta},
                   {"sample_variance", mo.variance},
                   {"variance_std_error", mo.variance_std_error()},
                   {"excursions", cfg.variance_check_excursions}};
            bool ok = mo.variance <= 4.0 / beta + 3.0 * mo.variance_std_error();
            return std::pair<json, bool>{j, ok};
        });
        rep.summary["variance_spot_check"] = check.first;
        rep.verdicts.push_back({"excursion_variance_bound", check.second,
                                "Var(Y_x) vs 4/beta(x) + 3 SE at one interior site"});
    }
    finish_report(rep, dlog);
    return rep;
}

ExperimentReport run_experiment(const RunConfig& cfg, int jobs) {
    if (cfg.experiment == "lln") return run_lln(cfg, jobs);
    if (cfg.experiment == "deviation") return run_deviation(cfg, jobs);
    if (cfg.experiment == "theorem1") return run_theorem1(cfg, jobs);
    if (cfg.experiment == "clt") return run_clt(cfg, jobs);
    if (cfg.experiment == "growth") return run_growth_diagnostic(cfg, jobs);
    if (cfg.experiment == "excursion_variance") return run_excursion_variance(cfg, jobs);
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace sinai
