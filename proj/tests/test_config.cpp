#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sinai/config.hpp"

using namespace sinai;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& text) {
    static int counter = 0;
    std::string path = "/tmp/sinai_cfg_" + std::to_string(counter++) + ".json";
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("built-in defaults validate for every experiment") {
    for (const auto& name : experiment_names()) {
        auto cfg = default_config(name);
        auto diags = validate_config(cfg);
        for (const auto& d : diags) MESSAGE(d.path, ": ", d.message);
        CHECK(diags.empty());
        auto rc = resolve_config(cfg);
        CHECK(rc.run.experiment == name);
        CHECK(rc.hash.size() == 16);
    }
}

TEST_CASE("two_point(0.5) diagnostic cites Assumption 2(ii)") {
    auto cfg = default_config("lln");
    cfg["distribution"]["a"] = 0.5;
    auto diags = validate_config(cfg);
    REQUIRE_FALSE(diags.empty());
    bool cited = false;
    for (const auto& d : diags)
        if (d.message.find("2(ii)") != std::string::npos) cited = true;
    CHECK(cited);
}

TEST_CASE("non-arithmetic law with theorem1 cites Assumption 3") {
    auto cfg = default_config("theorem1");
    double s2 = std::sqrt(2.0);
    double w1 = 1.0 / (1.0 + s2);
    double v_a = 1.0 / (1.0 + std::exp(s2));
    double v_b = 1.0 / (1.0 + std::exp(-1.0));
    cfg["distribution"] = {{"kind", "finite_support"},
                           {"atoms", {{v_a, w1}, {v_b, 1.0 - w1}}},
                           {"delta0", 0.15}};
    auto diags = validate_config(cfg);
    REQUIRE_FALSE(diags.empty());
    bool cited = false;
    for (const auto& d : diags)
        if (d.message.find("Assumption 3") != std::string::npos) cited = true;
    CHECK(cited);

    // the same law is accepted by the growth experiment (Prop main i only)
    auto growth = default_config("growth");
    growth["distribution"] = cfg["distribution"];
    CHECK(validate_config(growth).empty());
}

TEST_CASE("semantic validation catches the classic mistakes") {
    auto bad = default_config("lln");
    bad["horizons"] = {1000, 1000};
    CHECK_FALSE(validate_config(bad).empty());

    bad = default_config("lln");
    bad["replicates"] = 1;
    CHECK_FALSE(validate_config(bad).empty());

    bad = default_config("deviation");
    bad["epsilon"] = -0.5;
    CHECK_FALSE(validate_config(bad).empty());

    bad = default_config("growth");
    bad["growth"]["eta_exp"] = 0.7;
    CHECK_FALSE(validate_config(bad).empty());

    bad = default_config("growth");
    bad["growth"]["eta_exp"] = 0.4;  // fine for i), too big for the left event
    CHECK_FALSE(validate_config(bad).empty());
    bad["growth"]["left"] = false;
    CHECK(validate_config(bad).empty());
}

TEST_CASE("overrides: nested keys, JSON values, string fallback") {
    auto cfg = default_config("lln");
    apply_override(cfg, "replicates=50");
    apply_override(cfg, "distribution.a=0.25");
    apply_override(cfg, "horizons=[100,200]");
    apply_override(cfg, "function.name=center");
    CHECK(cfg["replicates"] == 50);
    CHECK(cfg["distribution"]["a"] == 0.25);
    CHECK(cfg["horizons"] == json({100, 200}));
    CHECK(cfg["function"]["name"] == "center");
    CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
    auto a = default_config("lln");
    auto b = default_config("lln");
    CHECK(config_hash(a) == config_hash(b));
    b["master_seed"] = 1;
    CHECK(config_hash(a) != config_hash(b));

    // resolution is idempotent: resolving the resolved echo changes nothing
    auto rc = resolve_config(a);
    auto rc2 = resolve_config(rc.resolved);
    CHECK(rc.hash == rc2.hash);
}

TEST_CASE("config file parsing: missing file and line-anchored errors") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/config.json"), ConfigError);

    auto path = write_temp("{\n  \"experiment\": \"lln\",\n  oops\n}\n");
    try {
        parse_config_file(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find(":3:") != std::string::npos);  // the bad token sits on line 3
    }
    std::remove(path.c_str());
}

TEST_CASE("resolve fills typed values") {
    auto cfg = default_config("clt");
    cfg["f"]["plus"] = 2.0;
    cfg["f"]["minus"] = -1.0;
    auto rc = resolve_config(cfg);
    CHECK(rc.run.f.plus == 2.0);
    CHECK(rc.run.f.minus == -1.0);
    CHECK(rc.run.replicates == 2000);
    CHECK(rc.run.horizons == std::vector<long>{100000});
    CHECK(rc.run.accept.clt_ks_max == 0.08);
    CHECK(rc.resolved["acceptance"]["ks_max"] == 0.08);
}
