#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "mixedts/univariate.hpp"

namespace testutil {

// Central sample moments with delta-method standard errors.
struct SampleStats {
  double mean, m2, m3, m4;
  double se_mean, se_m2, se_m3, se_m4;
};

inline SampleStats sample_stats(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double c[9] = {};
  for (double v : x) {
    const double d = v - mean;
    double p = d * d;
    for (int k = 2; k <= 8; ++k) {
      c[k] += p;
      p *= d;
    }
  }
  for (double& v : c) v /= n;
  SampleStats s{};
  s.mean = mean;
  s.m2 = c[2];
  s.m3 = c[3];
  s.m4 = c[4];
  s.se_mean = std::sqrt(c[2] / n);
  s.se_m2 = std::sqrt((c[4] - c[2] * c[2]) / n);
  s.se_m3 = std::sqrt((c[6] - c[3] * c[3] - 6.0 * c[4] * c[2] + 9.0 * c[2] * c[2] * c[2]) / n);
  s.se_m4 = std::sqrt((c[8] - c[4] * c[4] - 8.0 * c[5] * c[3] + 16.0 * c[3] * c[3] * c[2]) / n);
  return s;
}

// |analytic - sample| in standard errors.
inline double z_score(double analytic, double sample, double se) {
  return std::abs(analytic - sample) / se;
}

inline std::complex<double> empirical_cf(std::span<const double> x, double t) {
  double re = 0.0, im = 0.0;
  for (double v : x) {
    re += std::cos(t * v);
    im += std::sin(t * v);
  }
  const auto n = static_cast<double>(x.size());
  return {re / n, im / n};
}

inline mixedts::UnivariateParams reference_params() {
  return {0.0, 0.0, {1.25, 1.2, 1.9}, 1.0, 1.0};
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace testutil
