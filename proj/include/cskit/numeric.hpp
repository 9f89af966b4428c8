#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace cskit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs)
    if (x > m) m = x;
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace cskit
