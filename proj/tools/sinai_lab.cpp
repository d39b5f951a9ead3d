// sinai_lab: run the named experiments from a JSON config, emit a report,
// plot-ready CSV data and a text summary.  Exit status: 0 when every
// acceptance verdict passes and the replicate failure budget holds, 1 on a
// failed verdict / budget / runtime error, 2 on config errors.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinai/config.hpp"
#include "sinai/experiments.hpp"
#include "sinai/valley.hpp"
#include "sinai/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

void write_data_csv(const fs::path& p, const sinai::ExperimentReport& rep) {
    std::string s = "experiment,n,replicate,value\n";
    for (const auto& r : rep.rows)
        s += r.series + "," + std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
             fmt_double(r.value) + "\n";
    write_text(p, s);
}

void write_valleys_csv(const fs::path& p, const sinai::ExperimentReport& rep) {
    std::string s = "experiment,n,replicate,b_n,c_n,v_bottom,z_n\n";
    for (const auto& v : rep.valleys)
        s += rep.experiment + "," + std::to_string(v.n) + "," + std::to_string(v.replicate) + "," +
             std::to_string(v.bottom) + "," + std::to_string(v.right_edge) + "," +
             fmt_double(v.v_bottom) + "," + fmt_double(v.z_n) + "\n";
    write_text(p, s);
}

std::string make_summary(const sinai::ExperimentReport& rep, const sinai::ResolvedConfig& rc) {
    std::string s;
    s += "experiment: " + rep.experiment + "\n";
    s += "config_hash: " + rc.hash + "\n";
    s += "master_seed: " + std::to_string(rc.run.master_seed) + "\n";
    s += "distribution: " + rc.run.dist.describe() + "\n";
    s += "replicates_requested: " + std::to_string(rep.replicates_requested) + "\n";
    s += "failures: " + std::to_string(rep.failures) + " (rate " + fmt_double(rep.failure_rate) +
         ", budget " + fmt_double(rep.failure_budget) + ")\n";
    s += "window_doublings: " + std::to_string(rep.window_doublings) + "\n";
    s += "\nverdicts:\n";
    for (const auto& v : rep.verdicts)
        s += std::string(v.pass ? "  [PASS] " : "  [FAIL] ") + v.name + " -- " + v.detail + "\n";
    s += std::string("\noverall: ") + (rep.passed() ? "PASS" : "FAIL") + "\n";
    s += "\nsummary:\n" + rep.summary.dump(2) + "\n";
    return s;
}

// Optional first-replicate dumps; deterministic re-simulation of replicate 0.
void dump_first_replicate(const fs::path& dir, const sinai::ResolvedConfig& rc) {
    using namespace sinai;
    const RunConfig& cfg = rc.run;
    const bool walks = cfg.experiment == "lln" || cfg.experiment == "deviation" ||
                       cfg.experiment == "theorem1" || cfg.experiment == "clt";
    if (walks) {
        long n = cfg.horizons.front();
        std::uint64_t env_seed = replicate_seed(cfg.master_seed, streams::kEnv, 0, 0);
        std::uint64_t walk_seed = replicate_seed(cfg.master_seed, streams::kWalk, 0, 0);
        Window w = walk_window(n, cfg.window_coeff, 2);
        Environment env = sample_environment(cfg.dist, w, env_seed);
        Trajectory traj = simulate(env, n, walk_seed);
        std::string t = "k,x\n";
        for (long k = 0; k <= n; ++k)
            t += std::to_string(k) + "," + std::to_string(traj.steps[static_cast<size_t>(k)]) + "\n";
        write_text(dir / "trajectory.csv", t);
        LocalTimeProfile lt = local_times(traj);
        std::string l = "x,count\n";
        for (long x = lt.x_lo; x <= lt.x_hi(); ++x)
            if (lt.at(x) > 0) l += std::to_string(x) + "," + std::to_string(lt.at(x)) + "\n";
        write_text(dir / "local_times.csv", l);
    }
    if (cfg.experiment == "theorem1" || cfg.experiment == "clt") {
        InfiniteValleySampler sampler(cfg.dist);
        auto s = sampler.sample_adaptive(replicate_seed(cfg.master_seed, streams::kValley, 0, 0),
                                         cfg.trunc);
        TildeNu nu = tilde_nu(s, cfg.tail_tol);
        std::string d = "x,v,omega,nu\n";
        for (long x = s.win.lo + 1; x <= s.win.hi; ++x)
            d += std::to_string(x) + "," + fmt_double(s.value(x)) + "," +
                 fmt_double(tilde_omega(s, x)) + "," + fmt_double(nu.at(x)) + "\n";
        write_text(dir / "sample.csv", d);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sinai walk environment-measure laboratory"};
    std::string config_path;
    std::vector<std::string> overrides;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
    std::string out_dir = "out";
    bool list_only = false, validate_only = false;

    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--set", overrides, "override config entries, key=value (repeatable)");
    app.add_option("--jobs", jobs, "worker threads (does not affect results)");
    app.add_option("--out", out_dir, "output directory root");
    app.add_flag("--list", list_only, "list experiment names and exit");
    app.add_flag("--validate", validate_only, "validate the config and exit");
    CLI11_PARSE(app, argc, argv);

    if (list_only) {
        for (const auto& name : sinai::experiment_names()) std::cout << name << "\n";
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "error: --config is required (or use --list)\n";
        return 2;
    }

    json cfg;
    try {
        cfg = sinai::parse_config_file(config_path);
        for (const auto& ov : overrides) sinai::apply_override(cfg, ov);
        if (const char* env_seed = std::getenv("SINAI_LAB_SEED"))
            cfg["master_seed"] = std::stoull(env_seed);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (validate_only) {
        auto diags = sinai::validate_config(cfg);
        if (diags.empty()) {
            sinai::ResolvedConfig rc = sinai::resolve_config(cfg);
            std::cout << "ok\n" << rc.resolved.dump(2) << "\n";
            return 0;
        }
        for (const auto& d : diags) std::cout << d.path << ": " << d.message << "\n";
        return 2;
    }

    sinai::ResolvedConfig rc;
    try {
        rc = sinai::resolve_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        auto t0 = std::chrono::system_clock::now();
        auto clock0 = std::chrono::steady_clock::now();
        sinai::ExperimentReport rep = sinai::run_experiment(rc.run, jobs);
        auto t1 = std::chrono::system_clock::now();
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();

        fs::path dir = fs::path(out_dir) / rep.experiment / rc.hash;
        fs::create_directories(dir);

        json verdicts = json::array();
        for (const auto& v : rep.verdicts)
            verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
        json report{{"experiment", rep.experiment},
                    {"config", rc.resolved},
                    {"config_hash", rc.hash},
                    {"master_seed", rc.run.master_seed},
                    {"summary", rep.summary},
                    {"verdicts", verdicts},
                    {"failures",
                     {{"count", rep.failures},
                      {"rate", rep.failure_rate},
                      {"budget", rep.failure_budget},
                      {"requested", rep.replicates_requested}}},
                    {"window_doublings", rep.window_doublings},
                    {"events", rep.events},
                    {"passed", rep.passed()}};
        write_text(dir / "report.json", report.dump(2) + "\n");
        write_data_csv(dir / "data.csv", rep);
        if (!rep.valleys.empty()) write_valleys_csv(dir / "valleys.csv", rep);
        write_text(dir / "summary.txt", make_summary(rep, rc));

        auto stamp = [](std::chrono::system_clock::time_point tp) {
            return std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
        };
        json meta{{"started_at_ms", stamp(t0)},
                  {"finished_at_ms", stamp(t1)},
                  {"duration_seconds", seconds},
                  {"jobs", jobs},
                  {"config_hash", rc.hash}};
        write_text(dir / "meta.json", meta.dump(2) + "\n");

        if (rc.resolved["outputs"].value("dump_first_replicate", false)) dump_first_replicate(dir, rc);

        std::cout << make_summary(rep, rc);
        std::cout << "outputs: " << dir.string() << "\n";
        return rep.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 1;
    }
}
