#include "sinai/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sinai/rng.hpp"

namespace sinai {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kMeanTol = 1e-12;
constexpr double kLatticeTol = 1e-12;

}  // namespace

EnvironmentDistribution EnvironmentDistribution::two_point(double a) {
    if (!(a > 0.0 && a < 0.5))
        throw ConfigError("two_point parameter must lie in (0, 1/2); a = 1/2 has Var(log rho) = 0 "
                          "(Assumption 2(ii)), got a=" + std::to_string(a));
    EnvironmentDistribution d;
    double h = std::log((1.0 - a) / a);
    // Store +-h symmetrically so that E[log rho] = 0 holds exactly.
    d.atoms_.push_back({a, 0.5, h, 1});
    d.atoms_.push_back({1.0 - a, 0.5, -h, -1});
    d.delta0_ = a;
    d.two_point_ = true;
    d.declared_span_ = h;
    d.finalize();
    return d;
}

EnvironmentDistribution EnvironmentDistribution::finite_support(
        const std::vector<std::pair<double, double>>& atoms, double delta0,
        std::optional<double> declared_span) {
    if (atoms.empty()) throw ConfigError("finite_support needs at least one atom");
    if (atoms.size() > 200) throw ConfigError("finite_support: too many atoms");
    if (!(delta0 > 0.0 && delta0 < 0.5))
        throw ConfigError("finite_support: delta0 must lie in (0, 1/2)");
    EnvironmentDistribution d;
    for (auto [v, w] : atoms) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("atom value outside (0,1)");
        if (!(w > 0.0)) throw ConfigError("atom weight must be positive");
        d.atoms_.push_back({v, w, std::log((1.0 - v) / v), 0});
    }
    d.delta0_ = delta0;
    d.declared_span_ = declared_span;
    d.finalize();
    return d;
}

void EnvironmentDistribution::finalize() {
    double wsum = 0.0;
    for (const auto& a : atoms_) wsum += a.weight;
    if (std::abs(wsum - 1.0) > kWeightTol)
        throw ConfigError("atom weights must sum to 1 (got " + std::to_string(wsum) + ")");

    for (const auto& a : atoms_) {
        if (a.value < delta0_ - 1e-15 || a.value > 1.0 - delta0_ + 1e-15)
            throw ConfigError("atom value " + std::to_string(a.value) +
                              " violates ellipticity [delta0, 1-delta0] with delta0=" +
                              std::to_string(delta0_) + " (Assumption 2(i))");
    }

    double mean = 0.0, second = 0.0;
    for (const auto& a : atoms_) {
        mean += a.weight * a.log_rho;
        second += a.weight * a.log_rho * a.log_rho;
    }
    mean_log_rho_ = mean;
    var_log_rho_ = second - mean * mean;
    if (std::abs(mean) > kMeanTol)
        throw ConfigError("E[log rho] = " + std::to_string(mean) +
                          " but recurrence requires 0 (Assumption 1)");
    if (!(var_log_rho_ > 0.0))
        throw ConfigError("Var(log rho) must be positive (Assumption 2(ii)); "
                          "the distribution is deterministic");

    cum_weights_.clear();
    double c = 0.0;
    for (const auto& a : atoms_) {
        c += a.weight;
        cum_weights_.push_back(c);
    }
    cum_weights_.back() = 1.0;

    // Lattice detection: try the declared span first, otherwise divisors of
    // the smallest nonzero |log rho|.
    auto fits_span = [&](double h) {
        if (!(h > 0.0)) return false;
        for (const auto& a : atoms_) {
            double r = a.log_rho / h;
            if (std::abs(r - std::round(r)) * h > kLatticeTol) return false;
            if (std::abs(std::round(r)) > 1e15) return false;
        }
        return true;
    };
    arithmetic_ = false;
    double min_abs = 0.0;
    for (const auto& a : atoms_)
        if (a.log_rho != 0.0 && (min_abs == 0.0 || std::abs(a.log_rho) < min_abs))
            min_abs = std::abs(a.log_rho);
    if (declared_span_) {
        if (!fits_span(*declared_span_))
            throw ConfigError("declared span does not divide all log rho atoms within 1e-12");
        arithmetic_ = true;
        span_ = *declared_span_;
    } else if (min_abs > 0.0) {
        for (int div = 1; div <= 24 && !arithmetic_; ++div) {
            double h = min_abs / div;
            if (fits_span(h)) {
                arithmetic_ = true;
                span_ = h;
            }
        }
    }
    if (arithmetic_) {
        for (auto& a : atoms_) a.lattice = static_cast<long>(std::llround(a.log_rho / span_));
    }
}

double EnvironmentDistribution::span() const {
    if (!arithmetic_) throw DomainError("distribution is not arithmetic (Assumption 3 fails)");
    return span_;
}

int EnvironmentDistribution::sample_atom(std::uint64_t seed, long x) const {
    double u = rng::site_uniform(seed, x);
    // Few atoms; linear scan beats binary search here.
    for (size_t i = 0; i + 1 < cum_weights_.size(); ++i)
        if (u < cum_weights_[i]) return static_cast<int>(i);
    return static_cast<int>(cum_weights_.size()) - 1;
}

std::optional<int> EnvironmentDistribution::atom_for_lattice(long lattice) const {
    if (!arithmetic_) return std::nullopt;
    for (size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i].lattice == lattice) return static_cast<int>(i);
    return std::nullopt;
}

std::string EnvironmentDistribution::describe() const {
    std::ostringstream os;
    if (two_point_) {
        os << "two_point(a=" << atoms_[0].value << ")";
    } else {
        os << "finite_support{";
        for (size_t i = 0; i < atoms_.size(); ++i)
            os << (i ? ", " : "") << "(" << atoms_[i].value << ", " << atoms_[i].weight << ")";
        os << "; delta0=" << delta0_ << "}";
    }
    if (arithmetic_) os << " arithmetic h=" << span_;
    return os.str();
}

Environment::Environment(const EnvironmentDistribution& dist, Window window, std::uint64_t seed)
    : dist_(dist), window_(window), seed_(seed) {
    if (!window.valid() || !window.contains(0))
        throw ConfigError("environment window must be non-empty and contain 0");
    size_t n = static_cast<size_t>(window.size());
    omega_.resize(n);
    atom_idx_.resize(n);
    for (long x = window.lo; x <= window.hi; ++x) {
        int a = dist_.sample_atom(seed, x);
        atom_idx_[static_cast<size_t>(x - window.lo)] = static_cast<std::uint8_t>(a);
        omega_[static_cast<size_t>(x - window.lo)] = dist_.atom(a).value;
    }
}

Environment Environment::from_atoms(const EnvironmentDistribution& dist, Window window,
                                    std::vector<std::uint8_t> atom_idx, std::uint64_t seed) {
    Environment env(dist, Window{0, 0}, seed);
    if (!window.valid() || static_cast<long>(atom_idx.size()) != window.size())
        throw ConfigError("from_atoms: window/atom size mismatch");
    env.window_ = window;
    env.atom_idx_ = std::move(atom_idx);
    env.omega_.resize(env.atom_idx_.size());
    for (size_t i = 0; i < env.atom_idx_.size(); ++i) {
        if (env.atom_idx_[i] >= dist.atom_count()) throw ConfigError("from_atoms: bad atom index");
        env.omega_[i] = dist.atom(env.atom_idx_[i]).value;
    }
    return env;
}

Environment sample_environment(const EnvironmentDistribution& dist, Window window, std::uint64_t seed) {
    return Environment(dist, window, seed);
}

double log_rho(const Environment& env, long x) {
    return env.dist().atom(env.atom_index(x)).log_rho;
}

Potential::Potential(Window window, std::vector<double> values, std::vector<long> lattice, double span)
    : window_(window), values_(std::move(values)), lattice_(std::move(lattice)), span_(span) {}

Potential potential(const Environment& env) {
    const Window w = env.window();
    std::vector<double> v(static_cast<size_t>(w.size()));
    const bool lat = env.dist().arithmetic();
    std::vector<long> units(lat ? static_cast<size_t>(w.size()) : 0, 0);

    auto idx = [&](long x) { return static_cast<size_t>(x - w.lo); };
    v[idx(0)] = 0.0;
    if (lat) units[idx(0)] = 0;
    // V(x) = V(x-1) + log rho_x, both directions from the anchor.  On a
    // lattice the value is span * units -- one rounding per site, so equal
    // lattice heights compare exactly equal.
    for (long x = 1; x <= w.hi; ++x) {
        const auto& a = env.dist().atom(env.atom_index(x));
        if (lat)
            units[idx(x)] = units[idx(x - 1)] + a.lattice;
        else
            v[idx(x)] = v[idx(x - 1)] + a.log_rho;
    }
    for (long x = -1; x >= w.lo; --x) {
        const auto& a = env.dist().atom(env.atom_index(x + 1));
        if (lat)
            units[idx(x)] = units[idx(x + 1)] - a.lattice;
        else
            v[idx(x)] = v[idx(x + 1)] - a.log_rho;
    }
    if (lat) {
        const double h = env.dist().span();
        for (size_t i = 0; i < v.size(); ++i) v[i] = h * static_cast<double>(units[i]);
    }
    return Potential(w, std::move(v), std::move(units), lat ? env.dist().span() : 0.0);
}

}  // namespace sinai
