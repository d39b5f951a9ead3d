#include "sinai/infinite_valley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sinai/rng.hpp"

namespace sinai {

namespace {

constexpr std::uint64_t kRightStream = 0x5157;
constexpr std::uint64_t kLeftStream = 0x1EF7;
constexpr long kMaxRejectionProposals = 10000000;

// Estimate the strict descending ladder height law by simulating the lattice
// walk until it first goes negative.  Draws are capped in length; capped
// draws are redrawn, which conditions on tau < cap (tiny, documented bias).
std::vector<double> estimate_ladder_mc(const std::vector<long>& jumps, const std::vector<double>& weights,
                                       long max_down, long samples, std::uint64_t seed) {
    std::vector<double> counts(static_cast<size_t>(max_down), 0.0);
    std::vector<double> cumw(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumw.begin());
    cumw.back() = 1.0;

    rng::SplitMix64 gen(seed);
    constexpr long kStepCap = 1 << 21;
    long done = 0;
    std::vector<double> prev_q;
    while (done < samples) {
        long batch = std::min<long>(samples - done, 20000);
        for (long i = 0; i < batch; ++i) {
            long s = 0;
            long steps = 0;
            while (steps++ < kStepCap) {
                double u = gen.next_unit();
                size_t a = 0;
                while (a + 1 < cumw.size() && u >= cumw[a]) ++a;
                s += jumps[a];
                if (s < 0) {
                    counts[static_cast<size_t>(-s - 1)] += 1.0;
                    break;
                }
            }
            // cap hit: drop the draw and try again
        }
        done += batch;
        std::vector<double> q(counts);
        double tot = std::accumulate(q.begin(), q.end(), 0.0);
        if (tot > 0.0)
            for (auto& v : q) v /= tot;
        if (!prev_q.empty()) {
            double delta = 0.0;
            for (size_t j = 0; j < q.size(); ++j) delta = std::max(delta, std::abs(q[j] - prev_q[j]));
            if (delta < 1e-4 && done >= 100000) return q;  // plateau reached
        }
        prev_q = q;
    }
    return prev_q;
}

}  // namespace

LadderRenewal::LadderRenewal(std::vector<double> q, long horizon) : q_(std::move(q)) {
    if (q_.empty()) throw DomainError("ladder law must have at least one height");
    m_.resize(static_cast<size_t>(horizon) + 1);
    // m(u) = 1 + sum_j q_j m(u - j), m < 0 of the argument contributing zero.
    for (long u = 0; u <= horizon; ++u) {
        double v = 1.0;
        for (size_t j = 0; j < q_.size(); ++j) {
            long prev = u - static_cast<long>(j) - 1;
            if (prev >= 0) v += q_[j] * m_[static_cast<size_t>(prev)];
        }
        m_[static_cast<size_t>(u)] = v;
    }
}

double LadderRenewal::at(long u) const {
    if (u < 0) return 0.0;
    if (u >= static_cast<long>(m_.size()))
        throw TruncationError("ladder renewal horizon exceeded at u=" + std::to_string(u));
    return m_[static_cast<size_t>(u)];
}

InfiniteValleySampler::InfiniteValleySampler(const EnvironmentDistribution& dist, long ladder_samples,
                                             std::uint64_t ladder_seed)
    : dist_(dist) {
    if (!dist.arithmetic())
        throw ConfigError("infinite-valley sampler requires an arithmetic distribution (Assumption 3)");

    auto build_side = [&](bool mirrored, long shift) {
        Side side;
        long max_down = 0;
        for (int i = 0; i < dist.atom_count(); ++i) {
            long j = dist.atom(i).lattice;
            if (mirrored) j = -j;
            side.jumps.push_back(j);
            side.weights.push_back(dist.atom(i).weight);
            if (j < 0) max_down = std::max(max_down, -j);
        }
        side.harmonic_shift = shift;
        if (max_down == 0) throw ConfigError("lattice walk has no down-steps; not recurrent");
        if (max_down == 1) {
            // Down-steps cannot overshoot: ladder height is one unit surely,
            // renewal function is the closed form u + 1.
            side.renewal = std::make_shared<const LadderRenewal>(std::vector<double>{1.0});
        } else {
            auto q = estimate_ladder_mc(side.jumps, side.weights, max_down, ladder_samples,
                                        rng::derive(ladder_seed, mirrored ? 2 : 1));
            side.renewal = std::make_shared<const LadderRenewal>(std::move(q));
        }
        return side;
    };
    // Right side: increments log rho, conditioned >= 0.
    // Left side (as a walk in y = -x): increments -log rho, conditioned >= 1;
    // its harmonic function is the renewal function shifted by one unit.
    right_ = build_side(false, 0);
    left_ = build_side(true, 1);
}

long InfiniteValleySampler::step(const Side& side, long u, double uniform) const {
    // kernel(u -> u + j_i)  proportional to  w_i * m(u + j_i - shift),
    // normalized numerically (exact when m is exactly harmonic).
    double total = 0.0;
    size_t n = side.jumps.size();
    double w[256];
    for (size_t i = 0; i < n; ++i) {
        long v = u + side.jumps[i];
        double h = side.renewal->at(v - side.harmonic_shift);
        w[i] = side.weights[i] * h;
        total += w[i];
    }
    if (total <= 0.0) throw DomainError("conditioned kernel has no admissible move");
    double target = uniform * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
        acc += w[i];
        if (target < acc) return u + side.jumps[i];
    }
    return u + side.jumps[n - 1];
}

void InfiniteValleySampler::extend_right(std::vector<long>& path, long upto, std::uint64_t seed) const {
    std::uint64_t stream = rng::derive(seed, kRightStream);
    for (long x = static_cast<long>(path.size()); x <= upto; ++x)
        path.push_back(step(right_, path[static_cast<size_t>(x - 1)],
                            rng::to_unit(rng::at(stream, static_cast<std::uint64_t>(x)))));
}

void InfiniteValleySampler::extend_left(std::vector<long>& path, long upto, std::uint64_t seed) const {
    std::uint64_t stream = rng::derive(seed, kLeftStream);
    for (long y = static_cast<long>(path.size()); y <= upto; ++y)
        path.push_back(step(left_, path[static_cast<size_t>(y - 1)],
                            rng::to_unit(rng::at(stream, static_cast<std::uint64_t>(y)))));
}

InfiniteValleySample InfiniteValleySampler::sample(Window win, std::uint64_t seed) const {
    if (!win.valid() || !win.contains(0)) throw DomainError("sample window must contain 0");
    std::vector<long> right{0}, left{0};  // right[x] = units(x); left[y] = units(-y)
    extend_right(right, win.hi, seed);
    extend_left(left, -win.lo, seed);

    InfiniteValleySample s;
    s.win = win;
    s.span = dist_.span();
    s.sampler = ValleySamplerKind::HTransform;
    s.seed = seed;
    s.units.resize(static_cast<size_t>(win.size()));
    for (long x = win.lo; x <= win.hi; ++x)
        s.units[static_cast<size_t>(x - win.lo)] =
            (x >= 0) ? right[static_cast<size_t>(x)] : left[static_cast<size_t>(-x)];

    // Edge-mass proxy over the outermost tail_window-like band (32 sites).
    double h = s.span;
    double tail = 0.0;
    for (long x = std::max(win.lo, win.hi - 31); x <= win.hi; ++x)
        tail += std::exp(-h * static_cast<double>(s.unit(x)));
    for (long x = win.lo; x <= std::min(win.hi, win.lo + 31); ++x)
        tail += std::exp(-h * static_cast<double>(s.unit(x)));
    s.tail_mass_bound = tail;
    return s;
}

InfiniteValleySample InfiniteValleySampler::sample_adaptive(std::uint64_t seed,
                                                            const TruncationPolicy& policy) const {
    const double h = dist_.span();
    std::vector<long> right{0}, left{0};
    long r = policy.initial_half_width, l = policy.initial_half_width;
    extend_right(right, r, seed);
    extend_left(left, l, seed);

    auto side_mass = [&](const std::vector<long>& path) {
        double tot = 0.0;
        for (long u : path) tot += std::exp(-h * static_cast<double>(u));
        return tot;
    };
    auto side_tail = [&](const std::vector<long>& path) {
        double t = 0.0;
        long n = static_cast<long>(path.size());
        for (long i = std::max<long>(0, n - policy.tail_window); i < n; ++i)
            t += std::exp(-h * static_cast<double>(path[static_cast<size_t>(i)]));
        return t;
    };

    double right_tail, left_tail;
    for (;;) {
        double total = side_mass(right) + side_mass(left) - 1.0;  // site 0 counted once
        right_tail = side_tail(right);
        left_tail = side_tail(left);
        bool grow_r = right_tail > policy.tail_rel_tol * total;
        bool grow_l = left_tail > policy.tail_rel_tol * total;
        if (!grow_r && !grow_l) break;
        if (grow_r) {
            r *= 2;
            if (r > policy.max_half_width)
                throw TruncationError("right side exceeded truncation cap " +
                                      std::to_string(policy.max_half_width));
            extend_right(right, r, seed);
        }
        if (grow_l) {
            l *= 2;
            if (l > policy.max_half_width)
                throw TruncationError("left side exceeded truncation cap " +
                                      std::to_string(policy.max_half_width));
            extend_left(left, l, seed);
        }
    }

    InfiniteValleySample s;
    s.win = Window{-l, r};
    s.span = h;
    s.sampler = ValleySamplerKind::HTransform;
    s.seed = seed;
    s.units.resize(static_cast<size_t>(s.win.size()));
    for (long x = -l; x <= r; ++x)
        s.units[static_cast<size_t>(x + l)] =
            (x >= 0) ? right[static_cast<size_t>(x)] : left[static_cast<size_t>(-x)];
    s.tail_mass_bound = right_tail + left_tail;
    return s;
}

InfiniteValleySample sample_tilde_v_htransform(const EnvironmentDistribution& dist, Window win,
                                               std::uint64_t seed) {
    InfiniteValleySampler sampler(dist);
    return sampler.sample(win, seed);
}

InfiniteValleySample sample_tilde_v_rejection(const EnvironmentDistribution& dist, Window win,
                                              long depth, std::uint64_t seed) {
    if (!dist.arithmetic())
        throw ConfigError("rejection oracle requires an arithmetic distribution");
    if (!win.valid() || !win.contains(0)) throw DomainError("sample window must contain 0");
    if (depth < std::max(win.hi, -win.lo)) throw DomainError("rejection depth must cover the window");

    std::vector<long> units(static_cast<size_t>(2 * depth + 1));
    auto u_at = [&](long x) -> long& { return units[static_cast<size_t>(x + depth)]; };

    for (long attempt = 0; attempt < kMaxRejectionProposals; ++attempt) {
        std::uint64_t attempt_seed = rng::derive(seed, static_cast<std::uint64_t>(attempt));
        // Unconditioned lattice potential: site atoms drawn i.i.d.
        u_at(0) = 0;
        bool ok = true;
        for (long x = 1; x <= depth && ok; ++x) {
            int a = dist.sample_atom(attempt_seed, x);
            u_at(x) = u_at(x - 1) + dist.atom(a).lattice;
            if (u_at(x) < 0) ok = false;
        }
        for (long x = -1; x >= -depth && ok; --x) {
            int a = dist.sample_atom(attempt_seed, x + 1);
            u_at(x) = u_at(x + 1) - dist.atom(a).lattice;
            if (u_at(x) < 1) ok = false;
        }
        if (!ok) continue;

        InfiniteValleySample s;
        s.win = win;
        s.span = dist.span();
        s.sampler = ValleySamplerKind::RejectionOracle;
        s.seed = seed;
        s.units.resize(static_cast<size_t>(win.size()));
        for (long x = win.lo; x <= win.hi; ++x)
            s.units[static_cast<size_t>(x - win.lo)] = u_at(x);
        s.tail_mass_bound = std::exp(-s.span * static_cast<double>(u_at(win.lo))) +
                            std::exp(-s.span * static_cast<double>(u_at(win.hi)));
        return s;
    }
    throw OracleInfeasibleError("rejection oracle: no acceptance in " +
                                std::to_string(kMaxRejectionProposals) + " proposals");
}

double tilde_omega(const InfiniteValleySample& s, long x) {
    long delta = s.unit(x) - s.unit(x - 1);  // log rho / span at x
    // exp(-V(x)) / (exp(-V(x)) + exp(-V(x-1))) == 1 / (1 + e^{span*delta}),
    // which is exactly the atom value carrying this lattice increment.
    return 1.0 / (1.0 + std::exp(s.span * static_cast<double>(delta)));
}

TildeNu tilde_nu(const InfiniteValleySample& s, double tail_tol) {
    const Window w = s.win;
    std::vector<double> e(static_cast<size_t>(w.size()));
    double total = 0.0;
    for (long x = w.lo; x <= w.hi; ++x) {
        e[static_cast<size_t>(x - w.lo)] = std::exp(-s.span * static_cast<double>(s.unit(x)));
        total += e[static_cast<size_t>(x - w.lo)];
    }
    double normalizer = 2.0 * total;
    if (!(s.tail_mass_bound / normalizer <= tail_tol))
        throw TruncationError("tilde_nu: window tail mass " + std::to_string(s.tail_mass_bound) +
                              " exceeds tolerance; extend the window");

    TildeNu nu;
    nu.support = Window{w.lo, w.hi + 1};
    nu.normalizer = normalizer;
    nu.tail_mass_bound = s.tail_mass_bound;
    nu.weights.resize(static_cast<size_t>(w.size()) + 1);
    auto e_at = [&](long x) {
        if (x < w.lo || x > w.hi) return 0.0;
        return e[static_cast<size_t>(x - w.lo)];
    };
    for (long x = w.lo; x <= w.hi + 1; ++x)
        nu.weights[static_cast<size_t>(x - w.lo)] = (e_at(x - 1) + e_at(x)) / normalizer;
    return nu;
}

Environment environment_from_sample(const InfiniteValleySample& s, const EnvironmentDistribution& dist) {
    if (!dist.arithmetic()) throw ConfigError("environment_from_sample needs the arithmetic law");
    if (s.win.size() < 2) throw DomainError("sample window too small to derive an environment");
    Window env_win{s.win.lo + 1, s.win.hi};
    std::vector<std::uint8_t> atoms(static_cast<size_t>(env_win.size()));
    for (long x = env_win.lo; x <= env_win.hi; ++x) {
        long delta = s.unit(x) - s.unit(x - 1);
        auto a = dist.atom_for_lattice(delta);
        if (!a) throw DomainError("sample increment does not match any atom of the distribution");
        atoms[static_cast<size_t>(x - env_win.lo)] = static_cast<std::uint8_t>(*a);
    }
    return Environment::from_atoms(dist, env_win, std::move(atoms), s.seed);
}

}  // namespace sinai
