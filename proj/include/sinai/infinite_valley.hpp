#ifndef SINAI_INFINITE_VALLEY_HPP
#define SINAI_INFINITE_VALLEY_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "sinai/environment.hpp"

namespace sinai {

enum class ValleySamplerKind { HTransform, RejectionOracle };

// Truncated realization of the infinite-valley potential: V conditioned to
// stay nonnegative for x >= 0 and strictly positive for x < 0 (on a lattice,
// "> 0" means ">= one lattice step").  Convention: tilde V(0) = 0; the two
// sides are sampled independently.  Values are carried as integer lattice
// units so positivity and increment checks are exact.
struct InfiniteValleySample {
    Window win;
    std::vector<long> units;  // tilde V(x) / span, index x - win.lo
    double span = 0.0;
    // Declared upper estimate of sum of e^{-tilde V} outside the window; the
    // adaptive sampler sets it to the trailing in-window mass at the stopping
    // scale.
    double tail_mass_bound = 0.0;
    ValleySamplerKind sampler = ValleySamplerKind::HTransform;
    std::uint64_t seed = 0;

    long unit(long x) const {
        if (!win.contains(x)) throw OutOfWindowError("infinite-valley access outside window", x);
        return units[static_cast<size_t>(x - win.lo)];
    }
    double value(long x) const { return span * static_cast<double>(unit(x)); }
};

// Window-extension policy: start at [-initial, +initial], double a side while
// its last tail_window sites contribute more than tail_rel_tol of the total
// sum of e^{-tilde V}, hard error past max_half_width.
struct TruncationPolicy {
    long initial_half_width = 64;
    long tail_window = 32;
    double tail_rel_tol = 1e-10;
    long max_half_width = 10000;
};

// Renewal function of the strict descending ladder heights of a lattice walk;
// the Doob harmonic function used to condition the walk to stay nonnegative.
// q[j-1] = P(first ladder height = j units).  The table is precomputed to a
// fixed horizon at construction so instances are safely shared across threads.
class LadderRenewal {
  public:
    LadderRenewal(std::vector<double> q, long horizon = 1 << 16);
    double at(long u) const;  // m(u); 0 for u < 0
    long horizon() const { return static_cast<long>(m_.size()) - 1; }

  private:
    std::vector<double> q_;
    std::vector<double> m_;
};

// Conditioned sampler for tilde V.  For distributions whose down-steps span a
// single lattice unit (e.g. two_point) the ladder law is {1} exactly and the
// renewal function is the closed form u + 1; otherwise the ladder law is
// estimated by Monte Carlo (ladder_samples draws, plateau-detected) and the
// residual estimation error is a documented bias -- the rejection oracle
// stays the ground truth for validation.
class InfiniteValleySampler {
  public:
    explicit InfiniteValleySampler(const EnvironmentDistribution& dist,
                                   long ladder_samples = 1000000,
                                   std::uint64_t ladder_seed = 0x1adde5);

    InfiniteValleySample sample(Window win, std::uint64_t seed) const;
    InfiniteValleySample sample_adaptive(std::uint64_t seed, const TruncationPolicy& policy = {}) const;

    const EnvironmentDistribution& dist() const { return dist_; }

  private:
    struct Side {
        std::vector<long> jumps;     // lattice jumps per atom (left side mirrored)
        std::vector<double> weights;
        std::shared_ptr<const LadderRenewal> renewal;
        long harmonic_shift = 0;  // 0: condition >= 0; 1: condition >= 1
    };
    long step(const Side& side, long u, double uniform) const;
    void extend_right(std::vector<long>& path, long upto, std::uint64_t seed) const;
    void extend_left(std::vector<long>& path, long upto, std::uint64_t seed) const;

    EnvironmentDistribution dist_;
    Side right_, left_;
};

// One-shot conveniences (the sampler construction is cheap for two_point but
// runs the ladder Monte Carlo for general arithmetic laws; reuse the class
// when drawing many samples).
InfiniteValleySample sample_tilde_v_htransform(const EnvironmentDistribution& dist, Window win,
                                               std::uint64_t seed);

// Finite-depth positivity oracle: proposes unconditioned potentials on
// [-depth, depth] and accepts iff V >= 0 on [0, depth] and V > 0 on
// [-depth, -1].  Fidi laws converge to the h-transform's as depth grows;
// validation use only.  Throws OracleInfeasibleError after 10^7 proposals.
InfiniteValleySample sample_tilde_v_rejection(const EnvironmentDistribution& dist, Window win,
                                              long depth, std::uint64_t seed);

// omega tilde(x) = e^{-tilde V(x)} / (e^{-tilde V(x)} + e^{-tilde V(x-1)}),
// evaluated through the lattice increment (two terms, no overflow possible).
double tilde_omega(const InfiniteValleySample& s, long x);

// nu tilde over [win.lo, win.hi + 1], normalized by 2 sum of e^{-tilde V}
// over the window (out-of-window terms enter as zero):
//   nu(x) = (e^{-tilde V(x-1)} + e^{-tilde V(x)}) / normalizer.
struct TildeNu {
    Window support;
    std::vector<double> weights;
    double normalizer = 0.0;
    double tail_mass_bound = 0.0;

    double at(long x) const {
        if (!support.contains(x)) return 0.0;
        return weights[static_cast<size_t>(x - support.lo)];
    }
};

TildeNu tilde_nu(const InfiniteValleySample& s, double tail_tol = 1e-9);

// Environment governed by omega tilde on [win.lo + 1, win.hi]; atoms are
// snapped to the generating distribution through the lattice increments.
Environment environment_from_sample(const InfiniteValleySample& s, const EnvironmentDistribution& dist);

}  // namespace sinai

#endif
