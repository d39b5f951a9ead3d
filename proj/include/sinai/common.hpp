#ifndef SINAI_COMMON_HPP
#define SINAI_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sinai {

// Inclusive integer interval of sites.
struct Window {
    long lo = 0;
    long hi = 0;

    bool contains(long x) const { return lo <= x && x <= hi; }
    long size() const { return hi - lo + 1; }
    bool valid() const { return lo <= hi; }
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a consumer touches a site outside the materialized window.
// The offending site is carried so the caller can widen and retry.
struct OutOfWindowError : std::runtime_error {
    long site;
    OutOfWindowError(const std::string& what, long site_)
        : std::runtime_error(what + " (site " + std::to_string(site_) + ")"), site(site_) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Window-extension loop hit its cap before the tail tolerance was met.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Rejection oracle failed to accept any proposal within its budget.
struct OracleInfeasibleError : std::runtime_error {
    explicit OracleInfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan) accumulator; keeps long sums accurate to O(eps)
// independent of the term count.
class KahanSum {
  public:
    void add(double x) {
        double y = x - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace sinai

#endif
