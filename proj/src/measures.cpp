#include "sinai/measures.hpp"

#include <algorithm>
#include <cmath>

#include "sinai/common.hpp"
#include "sinai/rng.hpp"

namespace sinai {

CylinderFunction::CylinderFunction(std::string name, int radius, double sup_bound, Eval eval)
    : name_(std::move(name)), radius_(radius), sup_bound_(sup_bound), eval_(std::move(eval)) {
    if (radius_ < 0) throw ConfigError("cylinder radius must be nonnegative");
    if (!(sup_bound_ >= 0.0)) throw ConfigError("cylinder sup bound must be nonnegative");
}

double CylinderFunction::at_shift(const Environment& env, long x) const {
    const int m = radius_;
    double buf[33];
    std::vector<double> heap;
    double* c = buf;
    if (2 * m + 1 > 33) {
        heap.resize(static_cast<size_t>(2 * m + 1));
        c = heap.data();
    }
    for (int i = -m; i <= m; ++i) c[i + m] = env.omega(x + i);
    return eval_(std::span<const double>(c, static_cast<size_t>(2 * m + 1)));
}

CylinderFunction cylinder_from_catalog(const std::string& name, double c) {
    if (name == "constant")
        return CylinderFunction("constant", 0, std::abs(c),
                                [c](std::span<const double>) { return c; });
    if (name == "center")
        return CylinderFunction("center", 0, 1.0, [](std::span<const double> w) { return w[0]; });
    if (name == "drift")
        return CylinderFunction("drift", 0, 1.0,
                                [](std::span<const double> w) { return 2.0 * w[0] - 1.0; });
    if (name == "center_variance")
        return CylinderFunction("center_variance", 0, 0.25,
                                [](std::span<const double> w) { return w[0] * (1.0 - w[0]); });
    if (name == "adjacent_product")
        return CylinderFunction("adjacent_product", 1, 1.0,
                                [](std::span<const double> w) { return w[1] * w[2]; });
    throw ConfigError("unknown cylinder function '" + name + "'");
}

CylinderFunction cylinder_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ConfigError("table function needs matching xs/ys with at least two points");
    if (!std::is_sorted(xs.begin(), xs.end())) throw ConfigError("table xs must be sorted");
    double sup = 0.0;
    for (double y : ys) sup = std::max(sup, std::abs(y));
    auto eval = [xs = std::move(xs), ys = std::move(ys)](std::span<const double> w) {
        double v = w[w.size() / 2];
        if (v <= xs.front()) return ys.front();
        if (v >= xs.back()) return ys.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), v);
        size_t i = static_cast<size_t>(it - xs.begin());
        double t = (v - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + t * (ys[i] - ys[i - 1]);
    };
    return CylinderFunction("table", 0, sup, std::move(eval));
}

bool check_cylinder_bound(const CylinderFunction& f, int samples, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<double> w(static_cast<size_t>(2 * f.radius() + 1));
    for (int s = 0; s < samples; ++s) {
        for (auto& v : w) v = gen.next_unit();
        if (std::abs(f(std::span<const double>(w))) > f.sup_bound() + 1e-12) return false;
    }
    return true;
}

MeasureEvaluation s_n_eval(const LocalTimeProfile& lt, const Environment& env, const CylinderFunction& f) {
    KahanSum acc;
    const double n = static_cast<double>(lt.n);
    for (long x = lt.x_lo; x <= lt.x_hi(); ++x) {
        std::int64_t c = lt.at(x);
        if (c == 0) continue;
        acc.add(f.at_shift(env, x) * (static_cast<double>(c) / n));
    }
    return {acc.value(), MeasureKind::SN, lt.n, env.seed(), lt.walk_seed};
}

MeasureEvaluation s_n_eval_temporal(const Trajectory& traj, const Environment& env,
                                    const CylinderFunction& f) {
    KahanSum acc;
    const double inv_n = 1.0 / static_cast<double>(traj.n);
    for (long k = 1; k <= traj.n; ++k)
        acc.add(f.at_shift(env, traj.steps[static_cast<size_t>(k)]) * inv_n);
    return {acc.value(), MeasureKind::SN, traj.n, env.seed(), traj.seed};
}

MeasureEvaluation sigma_n_eval(const ValleyMeasure& mu, const Environment& env,
                               const CylinderFunction& f) {
    KahanSum acc;
    for (long x = 0; x <= mu.right_edge; ++x) acc.add(mu.at(x) * f.at_shift(env, x));
    return {acc.value(), MeasureKind::SigmaN, mu.n, env.seed(), 0};
}

namespace {

// nu-weighted sum of site functionals over the largest sub-window where the
// functional is computable; pad = how many extra omega~ shifts it needs.
template <class SiteFn>
SInftyDraw nu_weighted_sum(const InfiniteValleySample& s, const TildeNu& nu, double sup_bound, int pad,
                           SiteFn&& site_value) {
    const long x_lo = s.win.lo + 1 + pad;  // omega~(y) needs tilde V(y-1)
    const long x_hi = s.win.hi - pad;
    KahanSum acc;
    double used_mass = 0.0;
    for (long x = x_lo; x <= x_hi; ++x) {
        double w = nu.at(x);
        acc.add(w * site_value(x));
        used_mass += w;
    }
    double neglected = std::max(0.0, 1.0 - used_mass) + nu.tail_mass_bound / nu.normalizer;
    return {acc.value(), neglected * sup_bound};
}

}  // namespace

SInftyDraw s_infty_eval(const InfiniteValleySample& s, const CylinderFunction& f) {
    TildeNu nu = tilde_nu(s);
    const int m = f.radius();
    if (2 * m + 2 >= s.win.size())
        throw DomainError("cylinder radius does not fit the sample window");
    std::vector<double> w(static_cast<size_t>(2 * m + 1));
    return nu_weighted_sum(s, nu, f.sup_bound(), m, [&](long x) {
        for (int i = -m; i <= m; ++i) w[static_cast<size_t>(i + m)] = tilde_omega(s, x + i);
        return f(std::span<const double>(w));
    });
}

SInftyDraw s_infty_eval_r(const InfiniteValleySample& s, const CylinderFunction& f) {
    TildeNu nu = tilde_nu(s);
    const int m = f.radius();
    if (2 * m + 4 >= s.win.size())
        throw DomainError("cylinder radius does not fit the sample window");
    std::vector<double> w(static_cast<size_t>(2 * m + 1));
    auto f_at = [&](long x) {
        for (int i = -m; i <= m; ++i) w[static_cast<size_t>(i + m)] = tilde_omega(s, x + i);
        return f(std::span<const double>(w));
    };
    // RF is a cylinder function of radius m+1.
    return nu_weighted_sum(s, nu, f.sup_bound(), m + 1, [&](long x) {
        double om = tilde_omega(s, x);
        return om * f_at(x + 1) + (1.0 - om) * f_at(x - 1);
    });
}

IntervalValue hilbert_distance(const Environment& a, const Environment& b) {
    Window w{std::max(a.window().lo, b.window().lo), std::min(a.window().hi, b.window().hi)};
    if (!w.valid()) throw DomainError("hilbert_distance: windows do not overlap");
    KahanSum acc;
    for (long x = w.lo; x <= w.hi; ++x)
        acc.add(std::ldexp(std::abs(a.omega(x) - b.omega(x)), -static_cast<int>(std::min<long>(std::abs(x), 1000))));
    // |omega - omega'| <= 1, so the invisible part is at most the tail weight.
    double tail = std::ldexp(1.0, -static_cast<int>(std::min<long>(w.hi, 1000))) +
                  std::ldexp(1.0, static_cast<int>(std::max<long>(w.lo, -1000)));
    return {acc.value(), tail};
}

double r_kernel_expectation(const Environment& env, const CylinderFunction& f) {
    double om = env.omega(0);
    return om * f.at_shift(env, 1) + (1.0 - om) * f.at_shift(env, -1);
}

bool omega_plus_indicator(const Environment& env, long x_right) {
    if (x_right > env.window().hi) throw OutOfWindowError("omega_plus window shortfall", x_right);
    if (env.dist().arithmetic()) {
        long sum = 0;
        for (long x = 1; x <= x_right; ++x) {
            sum += env.dist().atom(env.atom_index(x)).lattice;
            if (sum < 0) return false;
        }
        return true;
    }
    double sum = 0.0;
    for (long x = 1; x <= x_right; ++x) {
        sum += log_rho(env, x);
        if (sum < 0.0) return false;
    }
    return true;
}

bool omega_plus_indicator(const InfiniteValleySample& s) {
    for (long x = 1; x <= s.win.hi; ++x)
        if (s.unit(x) < 0) return false;
    return true;
}

}  // namespace sinai
