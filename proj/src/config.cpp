#include "sinai/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sinai {

using nlohmann::json;

json parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset into line:column
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                          e.what());
    }
}

json default_config(const std::string& experiment) {
    json cfg{
        {"experiment", experiment},
        {"distribution", {{"kind", "two_point"}, {"a", 0.3}}},
        {"master_seed", 20260810},
        {"failure_budget", 0.01},
        {"window_coeff", 10},
        {"quenched", false},
        {"tail_tol", 1e-9},
        {"truncation",
         {{"initial_half_width", 64}, {"tail_window", 32}, {"tail_rel_tol", 1e-10}, {"max_half_width", 10000}}},
        {"outputs", {{"valleys", true}, {"dump_first_replicate", false}}},
    };
    if (experiment == "lln") {
        cfg["horizons"] = {1000, 10000, 100000, 1000000};
        cfg["replicates"] = 200;
        cfg["f"] = {{"plus", 1.0}, {"minus", 0.0}};
        cfg["epsilon"] = 0.05;
        cfg["acceptance"] = {{"final_prob_max", 0.05}};
    } else if (experiment == "deviation") {
        cfg["horizons"] = {1000, 10000, 100000, 1000000};
        cfg["replicates"] = 200;
        cfg["function"] = {{"name", "center"}};
        cfg["epsilon"] = 0.1;
        cfg["acceptance"] = {{"final_factor", 2.0}, {"final_abs", 0.02}};
    } else if (experiment == "theorem1") {
        cfg["horizons"] = {1000, 10000, 100000, 1000000};
        cfg["replicates"] = 1000;
        cfg["sinfty_replicates"] = 0;
        cfg["function"] = {{"name", "center_variance"}};
        cfg["acceptance"] = {{"inversion_allowance", 0.02}, {"required_drop", 0.05}};
    } else if (experiment == "clt") {
        cfg["horizons"] = {100000};
        cfg["replicates"] = 2000;
        cfg["f"] = {{"plus", 1.0}, {"minus", 0.0}};
        cfg["acceptance"] = {{"ks_max", 0.08}};
    } else if (experiment == "growth") {
        cfg["horizons"] = {10000, 100000};
        cfg["replicates"] = 500;
        cfg["growth"] = {{"eta_exp", 0.3}, {"delta", 0.5}, {"k_grid", {1, 2, 4, 8, 16, 32}}, {"left", true}};
        cfg["acceptance"] = {{"final_prob_min", 0.95}};
    } else if (experiment == "excursion_variance") {
        cfg["horizons"] = {10000, 100000, 1000000};
        cfg["replicates"] = 500;
        cfg["excursion"] = {{"quantile", 0.9}, {"check_excursions", 10000}};
        cfg["acceptance"] = {{"quantile_max", 0.95}, {"quantile_noise", 0.03}};
    }
    return cfg;
}

void apply_override(json& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    std::string pointer = "/";
    for (char c : key) pointer += (c == '.') ? '/' : c;
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string
    }
    cfg[json::json_pointer(pointer)] = parsed;
}

namespace {

// Merge defaults into cfg without overwriting user keys.
void merge_defaults(json& cfg, const json& defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        if (!cfg.contains(it.key())) {
            cfg[it.key()] = it.value();
        } else if (it.value().is_object() && cfg[it.key()].is_object()) {
            merge_defaults(cfg[it.key()], it.value());
        }
    }
}

EnvironmentDistribution build_distribution(const json& d) {
    std::string kind = d.at("kind").get<std::string>();
    if (kind == "two_point") return EnvironmentDistribution::two_point(d.at("a").get<double>());
    if (kind == "finite_support") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : d.at("atoms"))
            atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        std::optional<double> span;
        if (d.contains("span")) span = d.at("span").get<double>();
        return EnvironmentDistribution::finite_support(atoms, d.at("delta0").get<double>(), span);
    }
    throw ConfigError("distribution.kind must be 'two_point' or 'finite_support'");
}

bool needs_arithmetic(const std::string& exp) {
    // Only the right-side growth event (Prop main i) is meaningful without
    // Assumption 3; everything else rests on the arithmetic-only theorems.
    return exp == "theorem1" || exp == "clt" || exp == "lln" || exp == "deviation" ||
           exp == "excursion_variance";
}

}  // namespace

std::vector<Diagnostic> validate_config(const json& cfg) {
    std::vector<Diagnostic> out;
    auto fail = [&](const std::string& path, const std::string& msg) { out.push_back({path, msg}); };

    std::string exp;
    if (!cfg.contains("experiment") || !cfg.at("experiment").is_string()) {
        fail("/experiment", "missing experiment name");
        return out;
    }
    exp = cfg.at("experiment").get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), exp) == names.end()) {
        fail("/experiment", "unknown experiment '" + exp + "'");
        return out;
    }

    json full = cfg;
    merge_defaults(full, default_config(exp));

    bool arithmetic = false;
    try {
        auto dist = build_distribution(full.at("distribution"));
        arithmetic = dist.arithmetic();
        if (needs_arithmetic(exp) && !arithmetic)
            fail("/distribution",
                 "log rho is not arithmetic (Assumption 3); experiment '" + exp +
                     "' requires it -- only the growth diagnostic (right side, Prop main i) "
                     "accepts non-arithmetic laws");
    } catch (const std::exception& e) {
        fail("/distribution", e.what());
    }

    try {
        if (full.contains("horizons")) {
            auto hs = full.at("horizons").get<std::vector<long>>();
            if (hs.empty()) fail("/horizons", "at least one horizon required");
            for (size_t i = 0; i < hs.size(); ++i) {
                if (hs[i] < 2) fail("/horizons", "horizons must be >= 2");
                if (i > 0 && hs[i] <= hs[i - 1]) fail("/horizons", "horizons must be strictly increasing");
            }
        }
        long r = full.value("replicates", 2L);
        if (r < 2) fail("/replicates", "replicates must be >= 2");
        if (!(full.value("failure_budget", 0.01) > 0.0))
            fail("/failure_budget", "failure budget must be positive");
        if (!(full.value("tail_tol", 1e-9) > 0.0)) fail("/tail_tol", "tail tolerance must be positive");
        if (full.contains("epsilon") && !(full.at("epsilon").get<double>() > 0.0))
            fail("/epsilon", "epsilon must be positive");
        if (full.value("window_coeff", 10L) < 1) fail("/window_coeff", "window_coeff must be >= 1");

        if (full.contains("function")) {
            const auto& f = full.at("function");
            std::string name = f.value("name", "center");
            if (name == "table") {
                if (!f.contains("xs") || !f.contains("ys"))
                    fail("/function", "table function needs xs and ys");
                else
                    cylinder_table(f.at("xs").get<std::vector<double>>(),
                                   f.at("ys").get<std::vector<double>>());
            } else {
                cylinder_from_catalog(name, f.value("c", 1.0));
            }
        }

        if (exp == "growth") {
            const auto& g = full.at("growth");
            double eta = g.value("eta_exp", 0.3);
            bool left = g.value("left", true);
            if (!(eta > 0.0 && eta < 0.5))
                fail("/growth/eta_exp", "right-side growth exponent must lie in (0, 1/2)");
            if (left && arithmetic && !(eta < 1.0 / 3.0))
                fail("/growth/eta_exp", "left-side growth event needs eta_exp < 1/3");
            if (!(g.value("delta", 0.5) > 0.0)) fail("/growth/delta", "delta must be positive");
            auto ks = g.value("k_grid", std::vector<long>{});
            if (ks.empty()) fail("/growth/k_grid", "k_grid must be non-empty");
            for (size_t i = 0; i < ks.size(); ++i) {
                if (ks[i] < 1) fail("/growth/k_grid", "K values must be >= 1");
                if (i > 0 && ks[i] <= ks[i - 1]) fail("/growth/k_grid", "K grid must be increasing");
            }
        }
        if (exp == "excursion_variance") {
            double q = full.at("excursion").value("quantile", 0.9);
            if (!(q > 0.0 && q < 1.0)) fail("/excursion/quantile", "quantile must lie in (0,1)");
        }
        if (full.contains("truncation")) {
            const auto& t = full.at("truncation");
            if (t.value("initial_half_width", 64L) < 8)
                fail("/truncation/initial_half_width", "initial half width must be >= 8");
            if (!(t.value("tail_rel_tol", 1e-10) > 0.0))
                fail("/truncation/tail_rel_tol", "tail_rel_tol must be positive");
        }
    } catch (const std::exception& e) {
        fail("/", std::string("malformed config: ") + e.what());
    }
    return out;
}

ResolvedConfig resolve_config(const json& cfg_in) {
    json cfg = cfg_in;
    if (!cfg.contains("experiment") || !cfg.at("experiment").is_string())
        throw ConfigError("/experiment: missing experiment name");
    merge_defaults(cfg, default_config(cfg.at("experiment").get<std::string>()));

    auto diags = validate_config(cfg);
    if (!diags.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& d : diags) os << "\n  " << d.path << ": " << d.message;
        throw ConfigError(os.str());
    }

    ResolvedConfig rc;
    rc.run.experiment = cfg.at("experiment").get<std::string>();
    rc.run.dist = build_distribution(cfg.at("distribution"));
    rc.run.horizons = cfg.at("horizons").get<std::vector<long>>();
    rc.run.replicates = cfg.at("replicates").get<long>();
    rc.run.sinfty_replicates = cfg.value("sinfty_replicates", 0L);
    rc.run.master_seed = cfg.at("master_seed").get<std::uint64_t>();
    rc.run.failure_budget = cfg.at("failure_budget").get<double>();
    rc.run.window_coeff = cfg.at("window_coeff").get<long>();
    rc.run.quenched = cfg.at("quenched").get<bool>();
    rc.run.tail_tol = cfg.at("tail_tol").get<double>();

    if (cfg.contains("function")) {
        const auto& f = cfg.at("function");
        rc.run.function_name = f.value("name", "center");
        rc.run.function_param = f.value("c", 1.0);
        if (rc.run.function_name == "table") {
            rc.run.table_xs = f.at("xs").get<std::vector<double>>();
            rc.run.table_ys = f.at("ys").get<std::vector<double>>();
        }
    }
    if (cfg.contains("f")) {
        rc.run.f.plus = cfg.at("f").value("plus", 1.0);
        rc.run.f.minus = cfg.at("f").value("minus", 0.0);
    }
    if (cfg.contains("epsilon")) rc.run.epsilon = cfg.at("epsilon").get<double>();
    if (cfg.contains("growth")) {
        const auto& g = cfg.at("growth");
        rc.run.eta_exp = g.value("eta_exp", 0.3);
        rc.run.growth_delta = g.value("delta", 0.5);
        rc.run.k_grid = g.value("k_grid", std::vector<long>{1, 2, 4, 8, 16, 32});
        rc.run.growth_left = g.value("left", true);
    }
    if (cfg.contains("excursion")) {
        rc.run.quantile_q = cfg.at("excursion").value("quantile", 0.9);
        rc.run.variance_check_excursions = cfg.at("excursion").value("check_excursions", 10000L);
    }
    if (cfg.contains("truncation")) {
        const auto& t = cfg.at("truncation");
        rc.run.trunc.initial_half_width = t.value("initial_half_width", 64L);
        rc.run.trunc.tail_window = t.value("tail_window", 32L);
        rc.run.trunc.tail_rel_tol = t.value("tail_rel_tol", 1e-10);
        rc.run.trunc.max_half_width = t.value("max_half_width", 10000L);
    }
    if (cfg.contains("acceptance")) {
        const auto& a = cfg.at("acceptance");
        auto& th = rc.run.accept;
        th.lln_final_prob_max = a.value("final_prob_max", th.lln_final_prob_max);
        th.deviation_final_factor = a.value("final_factor", th.deviation_final_factor);
        th.deviation_final_abs = a.value("final_abs", th.deviation_final_abs);
        th.theorem1_inversion_allowance = a.value("inversion_allowance", th.theorem1_inversion_allowance);
        th.theorem1_required_drop = a.value("required_drop", th.theorem1_required_drop);
        th.clt_ks_max = a.value("ks_max", th.clt_ks_max);
        th.growth_final_prob_min = a.value("final_prob_min", th.growth_final_prob_min);
        th.variance_quantile_max = a.value("quantile_max", th.variance_quantile_max);
        th.variance_quantile_noise = a.value("quantile_noise", th.variance_quantile_noise);
    }
    if (cfg.contains("outputs")) rc.run.emit_valleys = cfg.at("outputs").value("valleys", true);

    rc.resolved = cfg;
    rc.hash = config_hash(cfg);
    return rc;
}

std::string config_hash(const json& canonical) {
    std::string dump = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return s;
}

}  // namespace sinai
