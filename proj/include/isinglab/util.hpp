#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace isinglab {

// Streaming log-sum-exp accumulator. Tracks the running maximum and the
// rescaled partial sum so that exp never overflows.
class LogSumExpAcc {
 public:
  void add(double v) {
    if (count_ == 0 || v > max_) {
      sum_ = (count_ == 0) ? 1.0 : sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    } else {
      sum_ += std::exp(v - max_);
    }
    ++count_;
  }

  // log(sum_i exp(v_i)); -inf when empty.
  double log_sum() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

  // log((1/count) sum_i exp(v_i)).
  double log_mean() const { return log_sum() - std::log(double(count_)); }

  std::size_t count() const { return count_; }

 private:
  double max_ = 0.0;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

inline double log_sum_exp(std::span<const double> vs) {
  LogSumExpAcc acc;
  for (double v : vs) acc.add(v);
  return acc.log_sum();
}

inline double mean(std::span<const double> vs) {
  if (vs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : vs) s += v;
  return s / double(vs.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_sd(std::span<const double> vs) {
  if (vs.size() < 2) throw std::invalid_argument("sample_sd: need >= 2 values");
  const double m = mean(vs);
  double s = 0.0;
  for (double v : vs) s += (v - m) * (v - m);
  return std::sqrt(s / double(vs.size() - 1));
}

inline double median(std::vector<double> vs) {
  if (vs.empty()) throw std::invalid_argument("median: empty input");
  std::sort(vs.begin(), vs.end());
  const std::size_t k = vs.size() / 2;
  return (vs.size() % 2 == 1) ? vs[k] : 0.5 * (vs[k - 1] + vs[k]);
}

}  // namespace isinglab
