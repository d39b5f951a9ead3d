#include <doctest.h>

#include <cmath>

#include "sinai/common.hpp"
#include "sinai/environment.hpp"

using namespace sinai;

namespace {

// Three-atom arithmetic law with a symmetric site: log rho in {h, 0, -h}.
EnvironmentDistribution three_atom() {
    double h = std::log(7.0 / 3.0);
    double lo = 1.0 / (1.0 + std::exp(h));   // 0.3
    double hi = 1.0 / (1.0 + std::exp(-h));  // 0.7
    return EnvironmentDistribution::finite_support({{lo, 0.25}, {0.5, 0.5}, {hi, 0.25}}, 0.3);
}

}  // namespace

TEST_CASE("two_point(0.3) yields sites in {0.3, 0.7}") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto env = sample_environment(dist, Window{-3, 3}, 99);
    int seen = 0;
    for (long x = -3; x <= 3; ++x) {
        double w = env.omega(x);
        CHECK((w == 0.3 || w == 0.7));
        ++seen;
    }
    CHECK(seen == 7);
}

TEST_CASE("degenerate distribution is rejected by Assumption 2(ii)") {
    CHECK_THROWS_AS(EnvironmentDistribution::finite_support({{0.5, 1.0}}, 0.4), ConfigError);
    CHECK_THROWS_AS(EnvironmentDistribution::two_point(0.5), ConfigError);
}

TEST_CASE("environment is deterministic in (dist, window, seed)") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto a = sample_environment(dist, Window{-10, 10}, 1234);
    auto b = sample_environment(dist, Window{-10, 10}, 1234);
    for (long x = -10; x <= 10; ++x) CHECK(a.omega(x) == b.omega(x));
}

TEST_CASE("windows are extensible without reshuffling") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto small = sample_environment(dist, Window{-5, 5}, 77);
    auto big = sample_environment(dist, Window{-500, 500}, 77);
    for (long x = -5; x <= 5; ++x) CHECK(small.omega(x) == big.omega(x));
}

TEST_CASE("access outside the window is a hard error") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto env = sample_environment(dist, Window{-2, 2}, 5);
    CHECK_THROWS_AS(env.omega(3), OutOfWindowError);
    CHECK_THROWS_AS(env.omega(-3), OutOfWindowError);
}

TEST_CASE("log_rho values") {
    auto dist = three_atom();
    auto env = sample_environment(dist, Window{-100, 100}, 2024);
    double h = std::log(7.0 / 3.0);
    bool saw_mid = false, saw_lo = false, saw_hi = false;
    for (long x = -100; x <= 100; ++x) {
        double w = env.omega(x);
        double lr = log_rho(env, x);
        if (w == 0.5) {
            CHECK(lr == 0.0);
            saw_mid = true;
        } else if (w < 0.5) {
            CHECK(lr == doctest::Approx(h).epsilon(1e-12));
            saw_lo = true;
        } else {
            CHECK(lr == doctest::Approx(-h).epsilon(1e-12));
            saw_hi = true;
        }
    }
    CHECK(saw_mid);
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("two_point log rho is exactly +-h and mean-zero") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    double h = std::log(7.0 / 3.0);
    CHECK(dist.atom(0).log_rho == h);
    CHECK(dist.atom(1).log_rho == -h);
    CHECK(dist.mean_log_rho() == 0.0);
    CHECK(dist.var_log_rho() > 0.0);
    CHECK(dist.arithmetic());
    CHECK(dist.span() == h);
    auto env = sample_environment(dist, Window{0, 1000}, 3);
    for (long x = 0; x <= 1000; ++x) {
        double lr = log_rho(env, x);
        CHECK((lr == h || lr == -h));  // exact lattice atoms
    }
}

TEST_CASE("potential on a degenerate all-0.5 path is identically zero") {
    auto dist = three_atom();
    // atom index 1 is the 0.5 site
    std::vector<std::uint8_t> atoms(11, 1);
    auto env = Environment::from_atoms(dist, Window{-5, 5}, atoms, 0);
    auto pot = potential(env);
    for (long x = -5; x <= 5; ++x) CHECK(pot.value(x) == 0.0);
}

TEST_CASE("potential: explicit cumulative sums and the sign convention") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    double h = std::log(7.0 / 3.0);
    // atom 0 -> omega 0.3 (log rho +h), atom 1 -> omega 0.7 (log rho -h)
    // window [-2, 2], omega: x=-2..2 = [0.3, 0.3, 0.3, 0.3, 0.7]
    auto env = Environment::from_atoms(dist, Window{-2, 2}, {0, 0, 0, 0, 1}, 0);
    auto pot = potential(env);
    CHECK(pot.value(0) == 0.0);
    CHECK(pot.value(1) == h);       // V(1) = log rho_1
    CHECK(pot.value(2) == 0.0);     // V(2) = log rho_1 + log rho_2 = h - h
    CHECK(pot.value(-1) == -h);     // V(-1) = -log rho_0
    CHECK(pot.value(-2) == -2 * h); // V(-2) = -(log rho_{-1} + log rho_0)

    // brute-force oracle for the defining sums
    for (long x = 1; x <= 2; ++x) {
        double s = 0.0;
        for (long y = 1; y <= x; ++y) s += log_rho(env, y);
        CHECK(pot.value(x) == doctest::Approx(s).epsilon(1e-14));
    }
    for (long x = -2; x < 0; ++x) {
        double s = 0.0;
        for (long y = x + 1; y <= 0; ++y) s += log_rho(env, y);
        CHECK(pot.value(x) == doctest::Approx(-s).epsilon(1e-14));
    }
}

TEST_CASE("telescoping: V(y)-V(x) equals the sum of log rho over (x, y]") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto env = sample_environment(dist, Window{-500000, 500000}, 314159);
    auto pot = potential(env);
    KahanSum acc;
    for (long y = -499999; y <= 500000; ++y) acc.add(log_rho(env, y));
    CHECK(std::abs((pot.value(500000) - pot.value(-500000)) - acc.value()) < 1e-10);
    // lattice coordinates make the same statement exactly
    long units = 0;
    for (long y = -499999; y <= 500000; ++y)
        units += env.dist().atom(env.atom_index(y)).lattice;
    CHECK(pot.lattice_value(500000) - pot.lattice_value(-500000) == units);
}

TEST_CASE("empirical mean of log rho over 1e6 sites is near zero") {
    auto dist = EnvironmentDistribution::two_point(0.3);
    auto env = sample_environment(dist, Window{0, 999999}, 271828);
    KahanSum acc;
    for (long x = 0; x <= 999999; ++x) acc.add(log_rho(env, x));
    double sigma = std::sqrt(dist.var_log_rho());
    CHECK(std::abs(acc.value() / 1e6) < 4.0 * sigma / 1000.0);
}

TEST_CASE("distribution invariant violations are configuration errors") {
    // weights must sum to 1
    CHECK_THROWS_AS(EnvironmentDistribution::finite_support({{0.3, 0.5}, {0.7, 0.4}}, 0.3),
                    ConfigError);
    // ellipticity: atom below delta0
    CHECK_THROWS_AS(EnvironmentDistribution::finite_support({{0.1, 0.5}, {0.9, 0.5}}, 0.2),
                    ConfigError);
    // E[log rho] != 0
    CHECK_THROWS_AS(EnvironmentDistribution::finite_support({{0.3, 0.5}, {0.6, 0.5}}, 0.25),
                    ConfigError);
}

TEST_CASE("arithmetic span detection") {
    // jumps {+2h, -h} with weights (1/3, 2/3): span must come out as h
    double h = 0.5;
    double v_up2 = 1.0 / (1.0 + std::exp(2.0 * h));
    double v_dn1 = 1.0 / (1.0 + std::exp(-h));
    auto d = EnvironmentDistribution::finite_support({{v_up2, 1.0 / 3.0}, {v_dn1, 2.0 / 3.0}}, 0.2);
    CHECK(d.arithmetic());
    CHECK(d.span() == doctest::Approx(h).epsilon(1e-10));
    CHECK(d.atom(0).lattice == 2);
    CHECK(d.atom(1).lattice == -1);

    // incommensurable jumps {sqrt(2), -1} are not arithmetic
    double s2 = std::sqrt(2.0);
    double w1 = 1.0 / (1.0 + s2);  // mean-zero weight on the sqrt(2) jump
    double v_a = 1.0 / (1.0 + std::exp(s2));
    double v_b = 1.0 / (1.0 + std::exp(-1.0));
    auto nd = EnvironmentDistribution::finite_support({{v_a, w1}, {v_b, 1.0 - w1}}, 0.15);
    CHECK_FALSE(nd.arithmetic());
    CHECK_THROWS_AS(nd.span(), DomainError);
}
