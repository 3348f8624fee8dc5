#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace badac {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), max-shifted. -inf operands behave as exact zero
// probability.
inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(sum_i exp(terms[i])). Empty input and all -inf both yield -inf.
inline double log_sum_exp(std::span<const double> terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - hi);
  return hi + std::log(sum);
}

// log((1/n) sum_i exp(terms[i]))
inline double log_mean_exp(std::span<const double> terms) {
  if (terms.empty()) return kNegInf;
  return log_sum_exp(terms) - std::log(static_cast<double>(terms.size()));
}

}  // namespace badac
