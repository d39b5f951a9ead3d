#include <doctest.h>

#include <cmath>

#include "sinai/infinite_valley.hpp"
#include "sinai/rng.hpp"
#include "sinai/stats.hpp"

using namespace sinai;

namespace {

EnvironmentDistribution two_point03() { return EnvironmentDistribution::two_point(0.3); }

// Asymmetric arithmetic law: lattice jumps {+1, -2} with weights (2/3, 1/3),
// mean zero, down-jumps overshoot so the ladder law needs estimation.
EnvironmentDistribution skip_down_two() {
    double h = 0.5;
    double v_up = 1.0 / (1.0 + std::exp(h));
    double v_dn = 1.0 / (1.0 + std::exp(-2.0 * h));
    return EnvironmentDistribution::finite_support({{v_up, 2.0 / 3.0}, {v_dn, 1.0 / 3.0}}, 0.25);
}

}  // namespace

TEST_CASE("ladder renewal closed form for unit down-steps") {
    LadderRenewal m({1.0}, 100);
    for (long u = 0; u <= 100; ++u) CHECK(m.at(u) == doctest::Approx(u + 1.0).epsilon(1e-14));
    CHECK(m.at(-1) == 0.0);
    CHECK(m.at(-5) == 0.0);
}

TEST_CASE("h-transform forces the first step up on both sides") {
    InfiniteValleySampler sampler(two_point03());
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto s = sampler.sample(Window{-1, 1}, seed);
        CHECK(s.unit(0) == 0);
        CHECK(s.unit(1) == 1);   // down would leave [0, inf)
        CHECK(s.unit(-1) == 1);  // left side must be strictly positive
    }
}

TEST_CASE("h-transform kernel from one lattice unit is 3/4 up, 1/4 down") {
    InfiniteValleySampler sampler(two_point03());
    int up = 0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) {
        auto s = sampler.sample(Window{0, 2}, static_cast<std::uint64_t>(i));
        REQUIRE(s.unit(1) == 1);
        up += (s.unit(2) == 2);
    }
    double freq = static_cast<double>(up) / reps;
    CHECK(std::abs(freq - 0.75) < 4.0 * std::sqrt(0.1875 / reps));
}

TEST_CASE("rejection oracle at depth 1 is fully forced") {
    auto dist = two_point03();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = sample_tilde_v_rejection(dist, Window{-1, 1}, 1, seed);
        CHECK(s.unit(0) == 0);
        CHECK(s.unit(1) == 1);
        CHECK(s.unit(-1) == 1);
    }
}

TEST_CASE("rejection oracle at depth 2 matches the hand enumeration") {
    // Of the 16 sign patterns only (right up-up, up-down) x (left up-up)
    // are accepted: V(-1)=+h, V(-2)=+2h always; V(1)=+h; V(2) in {0, 2h}.
    auto dist = two_point03();
    int v2_zero = 0;
    const int reps = 4000;
    for (int i = 0; i < reps; ++i) {
        auto s = sample_tilde_v_rejection(dist, Window{-2, 2}, 2, static_cast<std::uint64_t>(i));
        CHECK(s.unit(-1) == 1);
        CHECK(s.unit(-2) == 2);
        CHECK(s.unit(1) == 1);
        CHECK((s.unit(2) == 0 || s.unit(2) == 2));
        v2_zero += (s.unit(2) == 0);
    }
    double freq = static_cast<double>(v2_zero) / reps;
    CHECK(std::abs(freq - 0.5) < 4.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("h-transform matches the rejection oracle in distribution (two_point)") {
    auto dist = two_point03();
    InfiniteValleySampler sampler(dist);
    const int draws = 4000;
    const Window win{-3, 3};
    std::vector<std::vector<double>> ht(7), rj(7);
    for (int i = 0; i < draws; ++i) {
        auto a = sampler.sample(win, rng::derive(7100, i));
        auto b = sample_tilde_v_rejection(dist, win, 11, rng::derive(7200, i));
        for (long x = -3; x <= 3; ++x) {
            ht[static_cast<size_t>(x + 3)].push_back(a.value(x));
            rj[static_cast<size_t>(x + 3)].push_back(b.value(x));
        }
    }
    for (size_t c = 0; c < 7; ++c) CHECK(ks_two_sample(ht[c], rj[c]) < 0.08);
}

TEST_CASE("h-transform matches the rejection oracle for an overshooting law") {
    auto dist = skip_down_two();
    InfiniteValleySampler sampler(dist, 400000, 0xbeef);
    const int draws = 3000;
    const Window win{-2, 3};
    std::vector<std::vector<double>> ht(6), rj(6);
    for (int i = 0; i < draws; ++i) {
        auto a = sampler.sample(win, rng::derive(8100, i));
        auto b = sample_tilde_v_rejection(dist, win, 11, rng::derive(8200, i));
        for (long x = -2; x <= 3; ++x) {
            ht[static_cast<size_t>(x + 2)].push_back(a.value(x));
            rj[static_cast<size_t>(x + 2)].push_back(b.value(x));
        }
    }
    // wider allowance: the renewal function is Monte Carlo estimated and the
    // oracle carries finite-depth bias
    for (size_t c = 0; c < 6; ++c) CHECK(ks_two_sample(ht[c], rj[c]) < 0.1);
}

TEST_CASE("positivity pattern and lattice increments are exact") {
    InfiniteValleySampler sampler(two_point03());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = sampler.sample(Window{-40, 40}, seed);
        for (long x = -40; x <= 40; ++x) {
            if (x >= 0) CHECK(s.unit(x) >= 0);
            if (x < 0) CHECK(s.unit(x) >= 1);
            if (x > -40) CHECK(std::abs(s.unit(x) - s.unit(x - 1)) == 1);
        }
    }
}

TEST_CASE("tilde_omega formula values") {
    InfiniteValleySample s;
    s.win = Window{0, 3};
    s.units = {0, 1, 2, 1};
    s.span = std::log(7.0 / 3.0);
    CHECK(tilde_omega(s, 1) == doctest::Approx(0.3).epsilon(1e-14));   // up-step
    CHECK(tilde_omega(s, 3) == doctest::Approx(0.7).epsilon(1e-14));   // down-step
    InfiniteValleySample flat;
    flat.win = Window{0, 1};
    flat.units = {0, 0};
    flat.span = 1.0;
    CHECK(tilde_omega(flat, 1) == 0.5);  // equal neighboring values
    // monotone: larger tilde V(x) at fixed tilde V(x-1) lowers omega
    InfiniteValleySample hi;
    hi.win = Window{0, 1};
    hi.units = {0, 2};
    hi.span = 0.5;
    CHECK(tilde_omega(hi, 1) < tilde_omega(flat, 1));
}

TEST_CASE("tilde_nu on the degenerate single-site window") {
    InfiniteValleySample s;
    s.win = Window{0, 0};
    s.units = {0};
    s.span = 1.0;
    s.tail_mass_bound = 0.0;
    auto nu = tilde_nu(s);
    CHECK(nu.at(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nu.at(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nu.normalizer == doctest::Approx(2.0));
}

TEST_CASE("tilde_nu: normalization, reversibility, truncation guard") {
    InfiniteValleySampler sampler(two_point03());
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto s = sampler.sample_adaptive(seed);
        auto nu = tilde_nu(s);
        double total = 0.0;
        for (long x = nu.support.lo; x <= nu.support.hi; ++x) total += nu.at(x);
        CHECK(std::abs(total - 1.0) < 1e-9);

        // nu(x-1) omega(x-1) = nu(x)(1 - omega(x)); the common value is the
        // edge conductance e^{-V(x-1)} over the normalizer
        for (long x = s.win.lo + 2; x <= s.win.hi; ++x) {
            double lhs = nu.at(x - 1) * tilde_omega(s, x - 1);
            double rhs = nu.at(x) * (1.0 - tilde_omega(s, x));
            double ref = std::exp(-s.value(x - 1)) / nu.normalizer;
            CHECK(std::abs(lhs - rhs) < 1e-12);
            CHECK(std::abs(lhs - ref) < 1e-12);
        }
    }

    // a short window cannot claim nu converged
    InfiniteValleySampler sampler2(two_point03());
    auto small = sampler2.sample(Window{-4, 4}, 9);
    CHECK_THROWS_AS(tilde_nu(small), TruncationError);
}

TEST_CASE("adaptive truncation terminates within the caps and meets its tolerance") {
    InfiniteValleySampler sampler(two_point03());
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
        auto s = sampler.sample_adaptive(seed);
        CHECK(s.win.lo >= -10000);
        CHECK(s.win.hi <= 10000);
        CHECK(s.win.lo <= -64);
        CHECK(s.win.hi >= 64);
        double total = 0.0;
        for (long x = s.win.lo; x <= s.win.hi; ++x) total += std::exp(-s.value(x));
        CHECK(s.tail_mass_bound / (2.0 * total) <= 1e-9);
    }
}

TEST_CASE("adaptive windows extend the fixed-window sample exactly") {
    InfiniteValleySampler sampler(two_point03());
    auto a = sampler.sample(Window{-16, 16}, 42);
    auto b = sampler.sample_adaptive(42);
    for (long x = -16; x <= 16; ++x) CHECK(a.unit(x) == b.unit(x));
}

TEST_CASE("environment_from_sample snaps to exact atoms") {
    auto dist = two_point03();
    InfiniteValleySampler sampler(dist);
    auto s = sampler.sample(Window{-10, 10}, 77);
    auto env = environment_from_sample(s, dist);
    CHECK(env.window().lo == -9);
    CHECK(env.window().hi == 10);
    for (long x = -9; x <= 10; ++x) CHECK((env.omega(x) == 0.3 || env.omega(x) == 0.7));
}

TEST_CASE("non-arithmetic laws are rejected by the conditioned samplers") {
    double s2 = std::sqrt(2.0);
    double w1 = 1.0 / (1.0 + s2);
    double v_a = 1.0 / (1.0 + std::exp(s2));
    double v_b = 1.0 / (1.0 + std::exp(-1.0));
    auto nd = EnvironmentDistribution::finite_support({{v_a, w1}, {v_b, 1.0 - w1}}, 0.15);
    CHECK_THROWS_AS(InfiniteValleySampler{nd}, ConfigError);
    CHECK_THROWS_AS(sample_tilde_v_rejection(nd, Window{-1, 1}, 2, 1), ConfigError);
}
