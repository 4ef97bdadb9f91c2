#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace specinf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2 = 0.693147180559945309417232121458176568;

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add_exp(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log(2 cosh x), stable for large |x|.
inline double log_2cosh(double x) noexcept {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

/// Streaming log-sum-exp. The result depends only on the order values are pushed.
class LogSumExp {
 public:
  void push(double v) noexcept {
    if (v == kNegInf) return;
    if (v > max_) {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    } else {
      sum_ += std::exp(v - max_);
    }
  }

  void merge(const LogSumExp& other) noexcept {
    if (other.max_ == kNegInf) return;
    if (other.max_ > max_) {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    } else {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    }
  }

  double value() const noexcept { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> values) noexcept {
  LogSumExp acc;
  for (double v : values) acc.push(v);
  return acc.value();
}

}  // namespace specinf
