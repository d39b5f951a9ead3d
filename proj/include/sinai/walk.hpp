#ifndef SINAI_WALK_HPP
#define SINAI_WALK_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sinai/environment.hpp"
#include "sinai/rng.hpp"

namespace sinai {

// Quenched chain on Z_+ reflected at 0: p(0,1) = 1, else up with probability
// omega(x).  Walk randomness is a stream separate from the environment
// stream; step k consumes counter k, so a re-run over a wider window replays
// the identical trajectory.

struct Trajectory {
    std::vector<long> steps;  // X_0 .. X_n
    long n = 0;
    std::uint64_t env_seed = 0;
    std::uint64_t seed = 0;
};

struct LocalTimeProfile {
    long n = 0;  // horizon; counts cover visits at times k = 1..n
    long x_lo = 0;
    std::vector<std::int64_t> counts;  // dense over [x_lo, x_lo + size - 1]
    std::uint64_t env_seed = 0;
    std::uint64_t walk_seed = 0;

    long x_hi() const { return x_lo + static_cast<long>(counts.size()) - 1; }
    std::int64_t at(long x) const {
        if (x < x_lo || x > x_hi()) return 0;
        return counts[static_cast<size_t>(x - x_lo)];
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

// One transition of the quenched kernel given a uniform variate.
long step_site(const Environment& env, long x, double u);

// Streaming driver: calls on_step(k, from, to) for transitions k = 0..n-1,
// i.e. X_k -> X_{k+1}.  Throws OutOfWindowError if the walk enters a site
// outside the environment window.
template <class OnStep>
void walk_stream(const Environment& env, long n_transitions, std::uint64_t seed, OnStep&& on_step) {
    const Window w = env.window();
    const double* omega = env.omega_data() - w.lo;
    long x = 0;
    if (!w.contains(0)) throw OutOfWindowError("walk start outside window", 0);
    for (long k = 0; k < n_transitions; ++k) {
        long next;
        if (x == 0) {
            next = 1;  // reflection
        } else {
            double u = rng::to_unit(rng::at(seed, static_cast<std::uint64_t>(k)));
            next = (u < omega[x]) ? x + 1 : x - 1;
        }
        if (next > w.hi) throw OutOfWindowError("walk left environment window", next);
        on_step(k, x, next);
        x = next;
    }
}

Trajectory simulate(const Environment& env, long n, std::uint64_t seed);

LocalTimeProfile local_times(const Trajectory& traj);

// Streaming variant: local times without materializing the trajectory.
LocalTimeProfile simulate_local_times(const Environment& env, long n, std::uint64_t seed);

// First k > after with X_k = target; nullopt when censored at the horizon.
std::optional<long> hitting_time(const Trajectory& traj, long target, long after = 0);

// Exact probability, started from a, of hitting `right` before `left` for the
// birth-death chain with conductances C(x, x+1) = exp[-V(x)]:
//     P = sum_{j=left}^{a-1} e^{V(j)} / sum_{j=left}^{right-1} e^{V(j)},
// evaluated with a max-shift so that spans of e^V up to e^{+-700} stay exact
// in relative terms.
double hitting_probability(const Potential& pot, long a, long left, long right);

// Complementary direction (hit `left` before `right`), same stabilized sums.
double hitting_probability_to_left(const Potential& pot, long a, long left, long right);

}  // namespace sinai

#endif
