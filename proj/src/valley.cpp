#include "sinai/valley.hpp"

#include <cmath>
#include <limits>

#include "sinai/common.hpp"

namespace sinai {

double valley_depth_threshold(long n) {
    if (n < 2) throw DomainError("valley depth threshold needs n >= 2");
    double ln = std::log(static_cast<double>(n));
    return ln + std::sqrt(ln);
}

Valley find_valley(const Potential& pot, long n) {
    return find_valley_with_threshold(pot, n, valley_depth_threshold(n));
}

Valley find_valley_with_threshold(const Potential& pot, long n, double threshold) {
    const Window w = pot.window();
    if (!w.contains(0)) throw OutOfWindowError("potential window must contain 0", 0);

    double run_min = pot.value(0);
    long argmin = 0;
    for (long x = 0;; ++x) {
        if (x > w.hi) throw OutOfWindowError("window ended before valley closed", x);
        double v = pot.value(x);
        if (v < run_min) {
            run_min = v;
            argmin = x;  // strict '<' keeps the first minimizer
        }
        if (v - run_min >= threshold) {
            return Valley{n, threshold, argmin, x};
        }
    }
}

ValleyMeasure mu_n(const Potential& pot, const Valley& valley) {
    const long c = valley.right_edge;
    const double vb = pot.value(valley.bottom);
    ValleyMeasure mu;
    mu.n = valley.n;
    mu.right_edge = c;
    mu.weights.resize(static_cast<size_t>(c) + 1);

    // e(x) = exp(-(V(x) - V(b_n))) in (0, 1]; Z~ = 2 sum_{x<c} e(x).
    std::vector<double> e(static_cast<size_t>(c));
    double zs = 0.0;
    for (long x = 0; x < c; ++x) {
        e[static_cast<size_t>(x)] = std::exp(-(pot.value(x) - vb));
        zs += e[static_cast<size_t>(x)];
    }
    zs *= 2.0;
    mu.log_z_shifted = std::log(zs);
    mu.z_n = zs * std::exp(vb);

    mu.weights[0] = std::exp(vb) / zs;  // 1/Z_n with the same shift
    for (long x = 1; x < c; ++x)
        mu.weights[static_cast<size_t>(x)] =
            (e[static_cast<size_t>(x)] + e[static_cast<size_t>(x - 1)]) / zs;
    mu.weights[static_cast<size_t>(c)] = e[static_cast<size_t>(c - 1)] / zs;
    return mu;
}

double stationarity_residual(const Environment& env, const ValleyMeasure& mu) {
    const long c = mu.right_edge;
    double worst = 0.0;
    for (long x = 0; x <= c; ++x) {
        // inflow from x-1 (up-move) and x+1 (down-move) under the reflected kernel
        double in = 0.0;
        if (x >= 1) {
            long y = x - 1;
            double p_up = (y == 0) ? 1.0 : env.omega(y);
            in += mu.at(y) * p_up;
        }
        if (x + 1 <= c) {
            long y = x + 1;
            double p_down = (y == c) ? 1.0 : 1.0 - env.omega(y);
            in += mu.at(y) * p_down;
        }
        worst = std::max(worst, std::abs(in - mu.at(x)));
    }
    return worst;
}

XiVector::XiVector(long lo, std::vector<double> entries) : lo_(lo), entries_(std::move(entries)) {
    l1_ = 0.0;
    for (double v : entries_) l1_ += v;
}

XiVector xi_vector(const Potential& pot, const Valley& valley) {
    const long b = valley.bottom;
    const long c = valley.right_edge;
    const double vb = pot.value(b);
    std::vector<double> entries(static_cast<size_t>(c));  // rel in [-b, c-b-1]
    for (long rel = -b; rel <= c - b - 1; ++rel)
        entries[static_cast<size_t>(rel + b)] = std::exp(-(pot.value(b + rel) - vb));
    return XiVector(-b, std::move(entries));
}

double mu_from_xi(const XiVector& xi, long rel) {
    return (xi.at(rel) + xi.at(rel - 1)) / (2.0 * xi.l1_norm());
}

std::vector<double> mu_from_xi(const XiVector& xi) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(xi.hi() + 1 - xi.lo() + 1));
    for (long rel = xi.lo(); rel <= xi.hi() + 1; ++rel) out.push_back(mu_from_xi(xi, rel));
    return out;
}

double omega_from_xi(const XiVector& xi, long rel) {
    double num = xi.at(rel);
    double den = num + xi.at(rel - 1);
    if (rel <= xi.lo() || rel > xi.hi() || den == 0.0)
        throw DomainError("omega_from_xi defined only at interior support points");
    return num / den;
}

}  // namespace sinai
