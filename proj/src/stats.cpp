#include "sinai/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sinai/common.hpp"

namespace sinai {

DistributionSample DistributionSample::from_raw(const std::vector<std::pair<long, double>>& raw) {
    if (raw.empty()) throw DomainError("empty sample");
    std::vector<size_t> order(raw.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return raw[i].second < raw[j].second; });
    DistributionSample s;
    s.values.reserve(raw.size());
    s.replicate_of.reserve(raw.size());
    for (size_t i : order) {
        s.replicate_of.push_back(raw[i].first);
        s.values.push_back(raw[i].second);
    }
    return s;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_two_sample(const DistributionSample& a, const DistributionSample& b) {
    return ks_two_sample(a.values, b.values);
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) throw DomainError("wasserstein1 needs equal-length samples");
    if (a.empty()) throw DomainError("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

double wasserstein1(const DistributionSample& a, const DistributionSample& b) {
    if (a.values.size() != b.values.size())
        throw DomainError("wasserstein1 needs equal-length samples");
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
    return s / static_cast<double>(a.values.size());
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("quantile level must be in (0, 1]");
    size_t k = static_cast<size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    if (k == 0) k = 1;
    return sorted[std::min(k - 1, sorted.size() - 1)];
}

Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.n = static_cast<long>(xs.size());
    if (m.n == 0) return m;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(m.n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m.mean = mean;
    m.variance = (m.n > 1) ? m2 / static_cast<double>(m.n - 1) : 0.0;
    m.fourth_central = m4 / static_cast<double>(m.n);
    return m;
}

double Moments::variance_std_error() const {
    if (n < 2) return 0.0;
    double nn = static_cast<double>(n);
    double m2 = variance * (nn - 1.0) / nn;
    double var_of_var = (fourth_central - m2 * m2 * (nn - 3.0) / (nn - 1.0)) / nn;
    return var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
}

}  // namespace sinai
