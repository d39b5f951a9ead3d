#include <doctest.h>

#include <cmath>
#include <set>

#include "sinai/rng.hpp"

using namespace sinai;

TEST_CASE("counter access is pure and order-free") {
    CHECK(rng::at(42, 7) == rng::at(42, 7));
    CHECK(rng::at(42, 7) != rng::at(42, 8));
    CHECK(rng::at(42, 7) != rng::at(43, 7));

    // random access equals sequential traversal of the same stream
    rng::SplitMix64 seq(42);
    for (std::uint64_t k = 0; k < 100; ++k) CHECK(seq.next() == rng::at(42, k));
}

TEST_CASE("derive produces distinct child streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 1000; ++tag) seen.insert(rng::derive(123, tag));
    CHECK(seen.size() == 1000);
}

TEST_CASE("zigzag is injective over small sites") {
    std::set<std::uint64_t> seen;
    for (long x = -500; x <= 500; ++x) seen.insert(rng::zigzag(x));
    CHECK(seen.size() == 1001);
}

TEST_CASE("unit draws look uniform") {
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    rng::SplitMix64 gen(7);
    for (int i = 0; i < n; ++i) {
        double u = gen.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal draws have the right first moments") {
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    rng::SplitMix64 gen(11);
    for (int i = 0; i < n; ++i) {
        double z = gen.next_normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}
