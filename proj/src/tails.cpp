#include "mixedts/tails.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "mixedts/error.hpp"

namespace mixedts {

namespace {

// ceil(p n) with a guard against p n landing a rounding error above an
// integer (0.01 * 700 = 7.000000000000001).
std::size_t order_index(double p, std::size_t n) {
  const double target = p * static_cast<double>(n);
  double k = std::ceil(target);
  if (k - target > 1.0 - 1e-9 * std::max(1.0, target)) k -= 1.0;
  return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n)));
}

}  // namespace

Ecdf::Ecdf(std::span<const double> sample) : sorted_(sample.begin(), sample.end()) {
  if (sorted_.empty()) throw InsufficientData("ecdf: empty sample");
  for (double v : sorted_) {
    if (std::isnan(v)) throw InvalidParameter("ecdf: sample contains NaN");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("ecdf quantile: p must lie in (0, 1]");
  return sorted_[order_index(p, sorted_.size()) - 1];
}

double tail_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidParameter("tail_slope: length mismatch");
  if (x.size() < 2) throw InsufficientData("tail regression needs at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("tail regression: all abscissae are equal");
  return sxy / sxx;
}

EmpiricalTailFit fit_tail_exponents(std::span<const double> sample, double zeta) {
  if (!(zeta > 0.0 && zeta < 0.5)) {
    throw InvalidParameter("fit_tail_exponents: zeta must lie in (0, 0.5)");
  }
  const Ecdf f(sample);
  const std::vector<double>& s = f.sorted();
  const auto n = static_cast<double>(s.size());
  const double left_cut = f.quantile(zeta);
  const double right_cut = f.quantile(1.0 - zeta);

  // Each distinct value enters once, at the ECDF level after its last copy.
  std::vector<double> lx, ly, rx, ry;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i + 1] == s[i]) continue;
    const double level = static_cast<double>(i + 1) / n;
    if (s[i] <= left_cut) {
      lx.push_back(s[i]);
      ly.push_back(std::log(level));
    }
    if (s[i] >= right_cut && level < 1.0) {
      rx.push_back(s[i]);
      ry.push_back(std::log1p(-level));
    }
  }
  EmpiricalTailFit fit{};
  fit.zeta = zeta;
  fit.n_left = lx.size();
  fit.n_right = rx.size();
  fit.q_star_hat = tail_slope(lx, ly);
  fit.r_star_hat = -tail_slope(rx, ry);
  return fit;
}

std::vector<ZetaSweepEntry> zeta_sweep(std::span<const double> sample,
                                       std::span<const double> zetas) {
  std::vector<ZetaSweepEntry> out;
  out.reserve(zetas.size());
  for (double z : zetas) {
    ZetaSweepEntry entry{z, std::nullopt, {}};
    try {
      entry.fit = fit_tail_exponents(sample, z);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace mixedts
