#ifndef SINAI_ENVIRONMENT_HPP
#define SINAI_ENVIRONMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sinai/common.hpp"

namespace sinai {

// Law of a single site probability omega(x).  Construction validates the
// standing assumptions: E[log rho] = 0 (recurrence), Var(log rho) > 0, and
// ellipticity omega in [delta0, 1-delta0].  When log rho lives on a lattice
// {k*h} the span h is detected (or verified against a declared one), which is
// what the infinite-valley machinery requires.
class EnvironmentDistribution {
  public:
    struct Atom {
        double value;    // omega
        double weight;
        double log_rho;  // log((1-value)/value)
        long lattice;    // log_rho / span, meaningful iff arithmetic
    };

    // Temkin environment: omega in {a, 1-a} with equal weights, 0 < a < 1/2.
    static EnvironmentDistribution two_point(double a);

    // atoms = (value, weight) pairs; delta0 must be declared explicitly.
    // declared_span, when given, is verified and used as the lattice span.
    static EnvironmentDistribution finite_support(const std::vector<std::pair<double, double>>& atoms,
                                                  double delta0,
                                                  std::optional<double> declared_span = std::nullopt);

    int atom_count() const { return static_cast<int>(atoms_.size()); }
    const Atom& atom(int i) const { return atoms_[static_cast<size_t>(i)]; }
    double delta0() const { return delta0_; }

    bool arithmetic() const { return arithmetic_; }
    // Lattice span h > 0 of log rho; DomainError when not arithmetic.
    double span() const;

    double mean_log_rho() const { return mean_log_rho_; }
    double var_log_rho() const { return var_log_rho_; }

    // Site draw: pure function of (seed, x).
    int sample_atom(std::uint64_t seed, long x) const;

    // Atom whose log rho sits at the given lattice multiple, if any.
    std::optional<int> atom_for_lattice(long lattice) const;

    std::string describe() const;

  private:
    EnvironmentDistribution() = default;
    void finalize();  // moments, lattice detection, invariant checks

    std::vector<Atom> atoms_;
    std::vector<double> cum_weights_;
    double delta0_ = 0.0;
    bool arithmetic_ = false;
    double span_ = 0.0;
    std::optional<double> declared_span_;
    double mean_log_rho_ = 0.0;
    double var_log_rho_ = 0.0;
    bool two_point_ = false;
};

// A realization of the i.i.d. site probabilities on a finite window.
// Immutable; reads outside the window are hard errors.  Because sites are
// drawn by a counter-based generator, re-sampling with the same seed and a
// wider window reproduces these values exactly.
class Environment {
  public:
    Environment(const EnvironmentDistribution& dist, Window window, std::uint64_t seed);

    // Build from explicit atom indices (used for omega-tilde derived
    // environments); seed is provenance only.
    static Environment from_atoms(const EnvironmentDistribution& dist, Window window,
                                  std::vector<std::uint8_t> atom_idx, std::uint64_t seed);

    const Window& window() const { return window_; }
    std::uint64_t seed() const { return seed_; }
    const EnvironmentDistribution& dist() const { return dist_; }

    double omega(long x) const {
        check(x);
        return omega_[static_cast<size_t>(x - window_.lo)];
    }
    int atom_index(long x) const {
        check(x);
        return atom_idx_[static_cast<size_t>(x - window_.lo)];
    }

    // Raw storage for hot loops; index is x - window().lo.
    const double* omega_data() const { return omega_.data(); }

  private:
    void check(long x) const {
        if (!window_.contains(x)) throw OutOfWindowError("environment access outside window", x);
    }

    EnvironmentDistribution dist_;
    Window window_;
    std::uint64_t seed_;
    std::vector<double> omega_;
    std::vector<std::uint8_t> atom_idx_;
};

Environment sample_environment(const EnvironmentDistribution& dist, Window window, std::uint64_t seed);

// log rho_x = log((1-omega(x))/omega(x)); exact atom value, no re-evaluation.
double log_rho(const Environment& env, long x);

// Potential V anchored at V(0) = 0, with V(x) - V(x-1) = log rho_x.
// For arithmetic distributions the integer lattice coordinates are carried
// along, making sign and tie decisions exact.
class Potential {
  public:
    Potential(Window window, std::vector<double> values, std::vector<long> lattice, double span);

    const Window& window() const { return window_; }
    double value(long x) const {
        check(x);
        return values_[static_cast<size_t>(x - window_.lo)];
    }
    bool has_lattice() const { return !lattice_.empty(); }
    double span() const { return span_; }
    long lattice_value(long x) const {
        check(x);
        return lattice_[static_cast<size_t>(x - window_.lo)];
    }

  private:
    void check(long x) const {
        if (!window_.contains(x)) throw OutOfWindowError("potential access outside window", x);
    }

    Window window_;
    std::vector<double> values_;
    std::vector<long> lattice_;
    double span_ = 0.0;
};

Potential potential(const Environment& env);

}  // namespace sinai

#endif
