#ifndef SINAI_STATS_HPP
#define SINAI_STATS_HPP

#include <cstdint>
#include <vector>

namespace sinai {

// Sorted sample with replicate provenance.
struct DistributionSample {
    std::vector<double> values;        // ascending
    std::vector<long> replicate_of;    // parallel to values

    static DistributionSample from_raw(const std::vector<std::pair<long, double>>& raw);
    long size() const { return static_cast<long>(values.size()); }
};

// Exact sup-distance between the two empirical CDFs (tie-aware sweep).
double ks_two_sample(const DistributionSample& a, const DistributionSample& b);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Sorted-coupling W1 for equal-length samples: (1/R) sum |a_(i) - b_(i)|.
double wasserstein1(const DistributionSample& a, const DistributionSample& b);
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Empirical q-quantile: smallest value with ECDF >= q (inverse CDF).
double quantile(const std::vector<double>& sorted, double q);

struct Moments {
    long n = 0;
    double mean = 0.0;
    double variance = 0.0;    // unbiased
    double fourth_central = 0.0;

    // Large-sample standard error of the sample variance.
    double variance_std_error() const;
};
Moments moments(const std::vector<double>& xs);

}  // namespace sinai

#endif
