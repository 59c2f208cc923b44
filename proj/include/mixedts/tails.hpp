#pragma once

// Empirical tail-exponent estimation.  With the empirical distribution
// function F and quantile cut x_z, the left-tail rate q is the least-squares
// slope of log F(x) on x over the observations x <= x_z, and the right-tail
// rate r is minus the slope of log(1 - F(x)) on x over x >= x_{1-z}.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixedts {

/// Right-continuous empirical distribution function.
class Ecdf {
 public:
  /// Throws InsufficientData on an empty sample; NaNs are rejected.
  explicit Ecdf(std::span<const double> sample);

  /// Fraction of observations <= x.
  double operator()(double x) const;

  /// inf{x : F(x) >= p} for 0 < p <= 1, i.e. the ceil(p n)-th order statistic.
  double quantile(double p) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct EmpiricalTailFit {
  double q_star_hat;
  double r_star_hat;
  double zeta;
  std::size_t n_left;   ///< distinct abscissae in the left regression
  std::size_t n_right;  ///< distinct abscissae in the right regression
};

/// OLS slope of y on x with intercept.  Throws InsufficientData for fewer
/// than two points or zero spread in x.
double tail_slope(std::span<const double> x, std::span<const double> y);

/// Default quantile level for tail regressions.
inline constexpr double kDefaultZeta = 0.01;

EmpiricalTailFit fit_tail_exponents(std::span<const double> sample, double zeta = kDefaultZeta);

/// One entry of a zeta sweep: either a fit or the error that prevented it.
struct ZetaSweepEntry {
  double zeta;
  std::optional<EmpiricalTailFit> fit;
  std::string error;
};

/// fit_tail_exponents per zeta, in input order; failures become entries with
/// an empty fit and a message instead of aborting the sweep.
std::vector<ZetaSweepEntry> zeta_sweep(std::span<const double> sample,
                                       std::span<const double> zetas);

}  // namespace mixedts
