#include <doctest.h>

#include <cmath>

#include "sinai/common.hpp"
#include "sinai/rng.hpp"
#include "sinai/stats.hpp"

using namespace sinai;

TEST_CASE("ks_two_sample: pinned values") {
    CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(ks_two_sample({0.0, 0.0}, {1.0, 1.0}) == 1.0);
    CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5, 3.5}) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, {1.0}), DomainError);
}

TEST_CASE("ks_two_sample: symmetry, range, unequal lengths, ties") {
    rng::SplitMix64 gen(3);
    std::vector<double> a, b;
    for (int i = 0; i < 257; ++i) a.push_back(gen.next_unit());
    for (int i = 0; i < 123; ++i) b.push_back(gen.next_unit() * 0.8 + 0.1);
    double d1 = ks_two_sample(a, b);
    double d2 = ks_two_sample(b, a);
    CHECK(d1 == d2);
    CHECK(d1 >= 0.0);
    CHECK(d1 <= 1.0);

    // heavy ties: both samples concentrated on {0, 1}
    CHECK(ks_two_sample({0.0, 0.0, 1.0, 1.0}, {0.0, 1.0, 1.0, 1.0}) == doctest::Approx(0.25));
}

TEST_CASE("wasserstein1: pinned values and the length contract") {
    CHECK(wasserstein1({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(wasserstein1({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}) == 1.0);
    CHECK(wasserstein1({0.0, 1.0}, {0.0, 3.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(wasserstein1({1.0}, {1.0, 2.0}), DomainError);

    rng::SplitMix64 gen(5);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) {
        a.push_back(gen.next_unit());
        b.push_back(gen.next_unit());
    }
    CHECK(wasserstein1(a, b) == wasserstein1(b, a));
    CHECK(wasserstein1(a, b) >= 0.0);
}

TEST_CASE("distribution sample keeps replicate provenance sorted by value") {
    auto s = DistributionSample::from_raw({{0, 3.0}, {1, 1.0}, {2, 2.0}});
    CHECK(s.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.replicate_of == std::vector<long>{1, 2, 0});
}

TEST_CASE("empirical quantile: inverse CDF convention") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    CHECK(quantile(xs, 0.9) == 9.0);
    CHECK(quantile(xs, 1.0) == 10.0);
    CHECK(quantile(xs, 0.05) == 1.0);
    CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
}

TEST_CASE("moments and the variance standard error") {
    std::vector<double> xs{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    auto m = moments(xs);
    CHECK(m.mean == doctest::Approx(5.0));
    CHECK(m.variance == doctest::Approx(32.0 / 7.0));
    CHECK(m.variance_std_error() > 0.0);

    // SE magnitude sanity on a normal sample: Var(s^2) ~ 2 sigma^4 / n
    rng::SplitMix64 gen(17);
    std::vector<double> zs;
    for (int i = 0; i < 20000; ++i) zs.push_back(gen.next_normal());
    auto mz = moments(zs);
    CHECK(std::abs(mz.variance - 1.0) < 0.05);
    CHECK(mz.variance_std_error() == doctest::Approx(std::sqrt(2.0 / 20000.0)).epsilon(0.2));
}
