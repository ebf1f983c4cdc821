#pragma once

#include <cmath>
#include <span>

namespace percoflow {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci95 = 0.0;    // 1.96 * stddev / sqrt(count)
};

inline MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / n;
  if (n > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(q / (n - 1));
  }
  out.ci95 = 1.96 * out.stddev / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace percoflow
