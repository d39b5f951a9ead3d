#include "sinai/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sinai {

long step_site(const Environment& env, long x, double u) {
    if (x < 0) throw DomainError("walk site must be nonnegative");
    if (x == 0) return 1;
    return (u < env.omega(x)) ? x + 1 : x - 1;
}

Trajectory simulate(const Environment& env, long n, std::uint64_t seed) {
    if (n < 1) throw DomainError("horizon must be >= 1");
    Trajectory t;
    t.n = n;
    t.env_seed = env.seed();
    t.seed = seed;
    t.steps.reserve(static_cast<size_t>(n) + 1);
    t.steps.push_back(0);
    walk_stream(env, n, seed, [&](long, long, long to) { t.steps.push_back(to); });
    return t;
}

LocalTimeProfile local_times(const Trajectory& traj) {
    LocalTimeProfile lt;
    lt.n = traj.n;
    lt.env_seed = traj.env_seed;
    lt.walk_seed = traj.seed;
    long hi = 0;
    for (size_t k = 1; k < traj.steps.size(); ++k) hi = std::max(hi, traj.steps[k]);
    lt.x_lo = 0;
    lt.counts.assign(static_cast<size_t>(hi) + 1, 0);
    for (size_t k = 1; k < traj.steps.size(); ++k) ++lt.counts[static_cast<size_t>(traj.steps[k])];
    return lt;
}

LocalTimeProfile simulate_local_times(const Environment& env, long n, std::uint64_t seed) {
    if (n < 1) throw DomainError("horizon must be >= 1");
    LocalTimeProfile lt;
    lt.n = n;
    lt.env_seed = env.seed();
    lt.walk_seed = seed;
    lt.x_lo = 0;
    lt.counts.assign(static_cast<size_t>(std::min<long>(env.window().hi, 64)) + 1, 0);
    walk_stream(env, n, seed, [&](long, long, long to) {
        if (to >= static_cast<long>(lt.counts.size())) lt.counts.resize(static_cast<size_t>(to) * 2 + 1, 0);
        ++lt.counts[static_cast<size_t>(to)];
    });
    // Trim the unvisited top range.
    size_t hi = lt.counts.size();
    while (hi > 1 && lt.counts[hi - 1] == 0) --hi;
    lt.counts.resize(hi);
    return lt;
}

std::optional<long> hitting_time(const Trajectory& traj, long target, long after) {
    if (target < 0) throw DomainError("hitting target must be nonnegative");
    for (long k = std::max<long>(1, after + 1); k < static_cast<long>(traj.steps.size()); ++k)
        if (traj.steps[static_cast<size_t>(k)] == target) return k;
    return std::nullopt;  // censored at horizon
}

namespace {

// prefix = sum_{j=left}^{a-1} e^{V(j) - M}, suffix = sum_{j=a}^{right-1},
// with M = max V over [left, right-1].
void stable_scale_sums(const Potential& pot, long a, long left, long right,
                       double& prefix, double& suffix) {
    double m = -std::numeric_limits<double>::infinity();
    for (long j = left; j < right; ++j) m = std::max(m, pot.value(j));
    prefix = 0.0;
    suffix = 0.0;
    for (long j = left; j < a; ++j) prefix += std::exp(pot.value(j) - m);
    for (long j = a; j < right; ++j) suffix += std::exp(pot.value(j) - m);
}

}  // namespace

double hitting_probability(const Potential& pot, long a, long left, long right) {
    if (!(left <= a && a <= right && left < right))
        throw DomainError("hitting_probability needs left <= a <= right with left < right");
    if (a == left) return 0.0;
    if (a == right) return 1.0;
    double prefix, suffix;
    stable_scale_sums(pot, a, left, right, prefix, suffix);
    return prefix / (prefix + suffix);
}

double hitting_probability_to_left(const Potential& pot, long a, long left, long right) {
    if (!(left <= a && a <= right && left < right))
        throw DomainError("hitting_probability needs left <= a <= right with left < right");
    if (a == left) return 1.0;
    if (a == right) return 0.0;
    double prefix, suffix;
    stable_scale_sums(pot, a, left, right, prefix, suffix);
    return suffix / (prefix + suffix);
}

}  // namespace sinai
