#pragma once

// Levy density of the univariate MixedTS-Gamma process recovered by Fourier
// inversion of the second derivative of its characteristic exponent
// Psi(u) = log phi_Y(u):
//
//   Psi''(u) = -int exp(iux) x^2 g(x) dx,
//   x^2 g(x) = -(1 / 2 pi) int exp(-iux) Psi''(u) du.

#include <complex>
#include <cstddef>
#include <vector>

#include "mixedts/univariate.hpp"

namespace mixedts {

/// Psi''(u) for real u, by the chain rule through the Gamma cumulant.
std::complex<double> cumulant_second_derivative(const UnivariateParams& p, double u);

struct LevyDensityCurve {
  /// Grid points with |x| > 4 dx, ascending.
  std::vector<double> abscissae;
  /// g(x) at `abscissae`, ringing below zero clipped to 0.
  std::vector<double> values;
  double truncation;
  std::size_t nodes;
  double spacing;  ///< dx = pi / T
  /// Full inversion grid x_m = (m - M/2) dx and the raw x^2 g(x) on it.
  std::vector<double> full_abscissae;
  std::vector<double> x2_density;
  /// Values below -1e-8 * max that were clipped.
  std::size_t clipped;
  /// max(|Psi''(-T)|, |Psi''(T)|) / |Psi''(0)|.
  double boundary_ratio;
  /// boundary_ratio > 1e-6: the truncation T is too small.
  bool truncation_warning;
};

inline constexpr double kDefaultTruncation = 200.0;
inline constexpr std::size_t kDefaultNodes = std::size_t{1} << 14;

/// Throws InvalidParameter unless T > 0 and M is a power of two >= 2^10.
LevyDensityCurve levy_density(const UnivariateParams& p, double truncation = kDefaultTruncation,
                              std::size_t nodes = kDefaultNodes);

/// i u E[Y] + int (exp(iux) - 1 - iux) g(x) dx by the trapezoid rule on the
/// full grid, written with x^2 g(x) so the origin contributes -u^2/2 x^2 g.
std::complex<double> levy_khintchine_exponent(const LevyDensityCurve& curve, double mean,
                                              double u);

/// int min(1, x^2) g(x) dx on the full grid.
double levy_integrability(const LevyDensityCurve& curve);

}  // namespace mixedts
