#include "mixedts/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "mixedts/error.hpp"

namespace mixedts {

namespace {

using cplx = std::complex<double>;

constexpr double kWarnRatio = 1e-6;
constexpr double kNegativeTolerance = 1e-8;
constexpr double kOriginCells = 4.0;

}  // namespace

cplx cumulant_second_derivative(const UnivariateParams& p, double u) {
  validate(p);
  const cplx iu(0.0, u);
  const cplx w = cplx(0.0, p.beta * u) + conditional_exponent(p.cts, u);
  const cplx w1 = cplx(0.0, p.beta) + cplx(0.0, 1.0) * cts_cumulant_d1(p.cts, iu);
  const cplx w2 = -cts_cumulant_d2(p.cts, iu);
  const cplx gap = p.b - w;
  return p.a * w1 * w1 / (gap * gap) + p.a * w2 / gap;
}

LevyDensityCurve levy_density(const UnivariateParams& p, double truncation, std::size_t nodes) {
  validate(p);
  if (!(truncation > 0.0) || !std::isfinite(truncation)) {
    throw InvalidParameter("levy_density: truncation must be positive");
  }
  if (nodes < 1024 || !detail::is_power_of_two(nodes)) {
    throw InvalidParameter("levy_density: nodes must be a power of two >= 1024");
  }
  const double du = 2.0 * truncation / static_cast<double>(nodes);
  const double dx = std::numbers::pi / truncation;
  const auto half = static_cast<std::ptrdiff_t>(nodes / 2);

  const cplx at_lo = cumulant_second_derivative(p, -truncation);
  const cplx at_hi = cumulant_second_derivative(p, truncation);
  const double centre = std::abs(cumulant_second_derivative(p, 0.0));

  std::vector<cplx> seq(nodes);
  // j = 0 carries both trapezoid endpoints u = -T and u = +T.
  seq[0] = 0.5 * (at_lo + at_hi);
  for (std::size_t j = 1; j < nodes; ++j) {
    const double u = -truncation + static_cast<double>(j) * du;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    seq[j] = sign * cumulant_second_derivative(p, u);
  }
  const std::vector<cplx> spec = detail::forward_dft(seq);

  LevyDensityCurve c{};
  c.truncation = truncation;
  c.nodes = nodes;
  c.spacing = dx;
  c.boundary_ratio = std::max(std::abs(at_lo), std::abs(at_hi)) / centre;
  c.truncation_warning = c.boundary_ratio > kWarnRatio;
  c.full_abscissae.resize(nodes);
  c.x2_density.resize(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(m) - half;
    const double sign = (shift % 2 == 0) ? 1.0 : -1.0;
    c.full_abscissae[m] = static_cast<double>(shift) * dx;
    c.x2_density[m] = -sign * spec[m].real() * du / (2.0 * std::numbers::pi);
  }

  double peak = 0.0;
  std::vector<double> raw;
  for (std::size_t m = 0; m < nodes; ++m) {
    const double x = c.full_abscissae[m];
    if (std::abs(x) <= kOriginCells * dx * (1.0 + 1e-12)) continue;
    c.abscissae.push_back(x);
    raw.push_back(c.x2_density[m] / (x * x));
    peak = std::max(peak, raw.back());
  }
  c.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < -kNegativeTolerance * peak) ++c.clipped;
    c.values[i] = std::max(raw[i], 0.0);
  }
  return c;
}

cplx levy_khintchine_exponent(const LevyDensityCurve& c, double mean, double u) {
  cplx total(0.0, 0.0);
  for (std::size_t m = 0; m < c.full_abscissae.size(); ++m) {
    const double x = c.full_abscissae[m];
    const double ux = u * x;
    cplx kernel;
    if (std::abs(ux) < 1e-4) {
      // (e^{iux} - 1 - iux) / x^2 by its Taylor series.
      kernel = u * u * cplx(-0.5 + ux * ux / 24.0, -ux / 6.0);
    } else {
      kernel = (cplx(std::cos(ux) - 1.0, std::sin(ux) - ux)) / (x * x);
    }
    total += kernel * c.x2_density[m];
  }
  return cplx(0.0, u * mean) + total * c.spacing;
}

double levy_integrability(const LevyDensityCurve& c) {
  double total = 0.0;
  for (std::size_t m = 0; m < c.full_abscissae.size(); ++m) {
    const double x = c.full_abscissae[m];
    const double weight = std::abs(x) <= 1.0 ? 1.0 : 1.0 / (x * x);
    total += weight * c.x2_density[m];
  }
  return total * c.spacing;
}

}  // namespace mixedts
