#ifndef SINAI_MEASURES_HPP
#define SINAI_MEASURES_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sinai/environment.hpp"
#include "sinai/infinite_valley.hpp"
#include "sinai/valley.hpp"
#include "sinai/walk.hpp"

namespace sinai {

// Bounded function of 2m+1 consecutive site probabilities; the test-function
// class of the convergence theorem.  Instances come from a small named
// catalog so experiments stay declarative.
class CylinderFunction {
  public:
    using Eval = std::function<double(std::span<const double>)>;

    CylinderFunction(std::string name, int radius, double sup_bound, Eval eval);

    const std::string& name() const { return name_; }
    int radius() const { return radius_; }
    double sup_bound() const { return sup_bound_; }
    double operator()(std::span<const double> coords) const { return eval_(coords); }

    // Evaluate at the shifted environment T_x omega.
    double at_shift(const Environment& env, long x) const;

  private:
    std::string name_;
    int radius_;
    double sup_bound_;
    Eval eval_;
};

// Catalog: "constant" (value c), "center" (omega_0), "drift" (2 omega_0 - 1),
// "center_variance" (omega_0 (1 - omega_0)), "adjacent_product"
// (omega_0 omega_1, radius 1).
CylinderFunction cylinder_from_catalog(const std::string& name, double c = 1.0);

// Piecewise-linear table function of the center coordinate.
CylinderFunction cylinder_table(std::vector<double> xs, std::vector<double> ys);

// Spot-check |F| <= sup_bound on random inputs in [0,1]^{2m+1}.
bool check_cylinder_bound(const CylinderFunction& f, int samples, std::uint64_t seed);

enum class MeasureKind { SN, SigmaN, SInfty };

struct MeasureEvaluation {
    double value = 0.0;
    MeasureKind kind = MeasureKind::SN;
    long n = 0;
    std::uint64_t env_seed = 0;
    std::uint64_t walk_seed = 0;
};

// S_n(F) = sum_x F(T_x omega) xi(n,x)/n, the spatial form of the empirical
// measure of the environment chain.
MeasureEvaluation s_n_eval(const LocalTimeProfile& lt, const Environment& env, const CylinderFunction& f);

// Time-average form (1/n) sum_{k=1..n} F(T_{X_k} omega); independent route
// kept for cross-checking the spatial form.
MeasureEvaluation s_n_eval_temporal(const Trajectory& traj, const Environment& env,
                                    const CylinderFunction& f);

// Sigma_n(F) = sum_x mu_n(x) F(T_x omega); environment-only proxy.
MeasureEvaluation sigma_n_eval(const ValleyMeasure& mu, const Environment& env, const CylinderFunction& f);

// One draw of S_infty(F) = sum_x nu(x) F(omega~(x-m..x+m)); the truncation
// bound records (neglected nu mass + out-of-window bound) * sup|F|.
struct SInftyDraw {
    double value = 0.0;
    double truncation_error_bound = 0.0;
};
SInftyDraw s_infty_eval(const InfiniteValleySample& s, const CylinderFunction& f);

// Same draw with the environment kernel applied: sum_x nu(x) (RF)(T_x omega~).
// By reversibility of nu this agrees with s_infty_eval up to window edges.
SInftyDraw s_infty_eval_r(const InfiniteValleySample& s, const CylinderFunction& f);

// Hilbert-cube distance d(w, w') = sum_x 2^{-|x|} |w(x) - w'(x)| over the
// common window, reported with the certified bound on the invisible tail.
struct IntervalValue {
    double value = 0.0;
    double tail_bound = 0.0;
};
IntervalValue hilbert_distance(const Environment& a, const Environment& b);

// (RF)(omega) = omega(0) F(T_1 omega) + (1 - omega(0)) F(T_{-1} omega);
// the environment-chain kernel applied to F, evaluated at zero shift.
double r_kernel_expectation(const Environment& env, const CylinderFunction& f);

// Finite-window proxy of the event Omega_+ = {sum_{y=1}^x log rho_y >= 0 for
// all x >= 1}: checks x in [1, x_right].  False is definitive; true is
// window-limited.  Integer lattice arithmetic when the law is arithmetic, so
// no roundoff can flip the certificate.
bool omega_plus_indicator(const Environment& env, long x_right);
bool omega_plus_indicator(const InfiniteValleySample& s);

}  // namespace sinai

#endif
