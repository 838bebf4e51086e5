#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace twopulse {

/// log(sum exp(x_i)); -inf entries are skipped, an all -inf input gives -inf.
inline double log_sum_exp(std::initializer_list<double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace twopulse
