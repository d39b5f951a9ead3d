#ifndef SINAI_VALLEY_HPP
#define SINAI_VALLEY_HPP

#include <vector>

#include "sinai/environment.hpp"

namespace sinai {

// Valley (0, b_n, c_n) of depth L_n = log n + sqrt(log n): c_n is the first
// site where V rises L_n above its running minimum, b_n the first argmin of V
// on [0, c_n].
struct Valley {
    long n = 0;
    double depth_threshold = 0.0;  // L_n
    long bottom = 0;               // b_n
    long right_edge = 0;           // c_n
};

double valley_depth_threshold(long n);

// Single left-to-right scan maintaining the running minimum.  Throws
// OutOfWindowError (with the scan position) when the window ends before the
// depth threshold is met.
Valley find_valley(const Potential& pot, long n);
Valley find_valley_with_threshold(const Potential& pot, long n, double threshold);

// mu_n over {0, ..., c_n}:
//   mu_n(0) = 1/Z_n,  mu_n(x) = (e^{-V(x)} + e^{-V(x-1)})/Z_n for 0 < x < c_n,
//   mu_n(c_n) = e^{-V(c_n-1)}/Z_n,  Z_n = 2 sum_{x=0}^{c_n-1} e^{-V(x)}.
// Exponentials are taken after shifting by V(b_n).
struct ValleyMeasure {
    long n = 0;
    long right_edge = 0;
    std::vector<double> weights;  // index x in [0, c_n]
    double z_n = 0.0;             // unshifted normalizer (may overflow for freak seeds)
    double log_z_shifted = 0.0;   // log(Z_n) - V(b_n), always finite

    double at(long x) const {
        if (x < 0 || x > right_edge) return 0.0;
        return weights[static_cast<size_t>(x)];
    }
};

ValleyMeasure mu_n(const Potential& pot, const Valley& valley);

// Residual of the stationarity identity mu(x) = mu(x-1) p(x-1,x) + mu(x+1) p(x+1,x)
// for the [0, c_n]-reflected chain; max over all x.
double stationarity_residual(const Environment& env, const ValleyMeasure& mu);

// The l^1 element Xi_n(x) = exp[-(V(b_n+x) - V(b_n))] on {-b_n,...,c_n-b_n-1},
// zero elsewhere; entry(0) = 1 exactly.
class XiVector {
  public:
    XiVector(long lo, std::vector<double> entries);

    long lo() const { return lo_; }                                     // -b_n
    long hi() const { return lo_ + static_cast<long>(entries_.size()) - 1; }  // c_n-b_n-1
    double at(long rel) const {
        if (rel < lo() || rel > hi()) return 0.0;
        return entries_[static_cast<size_t>(rel - lo_)];
    }
    double l1_norm() const { return l1_; }

  private:
    long lo_;
    std::vector<double> entries_;
    double l1_;
};

XiVector xi_vector(const Potential& pot, const Valley& valley);

// Reconstruction from Xi_n:
//   mu(b_n + x) = (Xi(x) + Xi(x-1)) / (2 ||Xi||_1)
//   omega(b_n + x) = Xi(x) / (Xi(x) + Xi(x-1))
// mu is exact on the whole of [-b_n, c_n-b_n] thanks to the zero padding;
// omega only at interior points (DomainError at the edges).
double mu_from_xi(const XiVector& xi, long rel);
std::vector<double> mu_from_xi(const XiVector& xi);  // over rel in [lo, hi+1]
double omega_from_xi(const XiVector& xi, long rel);

}  // namespace sinai

#endif
