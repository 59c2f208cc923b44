#include "mixedts/multivariate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mixedts/error.hpp"

namespace mixedts {

namespace {

using cplx = std::complex<double>;

constexpr double kZeroSkew = 1e-12;

}  // namespace

UnivariateParams MultivariateParams::marginal(std::size_t i) const {
  const MarginalBlock& b = marginals.at(i);
  return {b.mu, b.beta, b.cts, b.l + n, b.m};
}

void validate(const MultivariateParams& p) {
  if (p.marginals.empty()) throw InvalidParameter("multivariate: no components");
  if (!(p.n > 0.0 && std::isfinite(p.n)) || !(p.k > 0.0 && std::isfinite(p.k))) {
    throw InvalidParameter("multivariate: common-factor shape and rate must be positive");
  }
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const MarginalBlock& b = p.marginals[i];
    validate(b.cts);
    if (!(b.l > 0.0 && std::isfinite(b.l)) || !(b.m > 0.0 && std::isfinite(b.m))) {
      throw InvalidParameter("multivariate: component " + std::to_string(i) +
                             " has non-positive Gamma shape or rate");
    }
    if (!std::isfinite(b.mu) || !std::isfinite(b.beta)) {
      throw InvalidParameter("multivariate: mu and beta must be finite");
    }
  }
}

const char* to_string(SkewRegime r) {
  switch (r) {
    case SkewRegime::BothNonneg: return "BothNonneg";
    case SkewRegime::BothNonpos: return "BothNonpos";
    case SkewRegime::Mixed: return "Mixed";
  }
  return "?";
}

cplx joint_characteristic_exponent(const MultivariateParams& p, std::span<const double> t) {
  if (t.size() != p.dim()) {
    throw InvalidParameter("joint characteristic function: argument has wrong dimension");
  }
  double location = 0.0;
  cplx common(0.0, 0.0);
  cplx idiosyncratic(0.0, 0.0);
  for (std::size_t h = 0; h < p.dim(); ++h) {
    const MarginalBlock& b = p.marginals[h];
    location += t[h] * b.mu;
    const cplx w = cplx(0.0, t[h] * b.beta) + conditional_exponent(b.cts, t[h]);
    common += p.loading(h) * w;
    idiosyncratic += gamma_cumulant(b.l, b.m, w);
  }
  return cplx(0.0, location) + gamma_cumulant(p.n, p.k, common) + idiosyncratic;
}

cplx joint_characteristic_function(const MultivariateParams& p, std::span<const double> t) {
  return std::exp(joint_characteristic_exponent(p, t));
}

MomentSummary moments(const MultivariateParams& p) {
  validate(p);
  const auto dim = static_cast<Eigen::Index>(p.dim());
  MomentSummary s{Eigen::VectorXd(dim), Eigen::MatrixXd(dim, dim), Eigen::VectorXd(dim),
                  Eigen::VectorXd(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    const MarginalBlock& b = p.marginals[static_cast<std::size_t>(i)];
    const double shape = b.l + p.n;
    const double m = b.m;
    const double beta = b.beta;
    const auto [k3, k4] = cts_higher_cumulants(b.cts);
    s.means(i) = b.mu + beta * shape / m;
    s.central_m3(i) = (k3 + (3.0 + 2.0 * beta * beta / m) * beta / m) * shape / m;
    // Fourth moment including the 3 E[V^2] Gaussian-part term.
    s.central_m4(i) = beta * beta * beta * beta * (3.0 + 6.0 / shape) * shape * shape /
                          (m * m * m * m) +
                      6.0 * beta * beta * shape / (m * m * m) * (shape + 2.0) +
                      4.0 * beta * k3 * shape / (m * m) + k4 * shape / m +
                      3.0 * shape * (shape + 1.0) / (m * m);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const MarginalBlock& c = p.marginals[static_cast<std::size_t>(j)];
      s.covariance(i, j) = i == j ? (1.0 + beta * beta / m) * shape / m
                                  : beta * c.beta * p.n / (m * c.m);
    }
  }
  return s;
}

double skewness_cubic(const MarginalBlock& block, double beta) {
  const double k3 = cts_higher_cumulants(block.cts).k3;
  const double m = block.m;
  return k3 + 3.0 * beta / m + 2.0 * beta * beta * beta / (m * m);
}

double skewness_root(const MarginalBlock& block) {
  const double m = block.m;
  const double k3 = cts_higher_cumulants(block.cts).k3;
  // 2 b^3 / m^2 + 3 b / m + k3 = 0  <=>  b^3 + p b + q = 0.
  const double p = 1.5 * m;
  const double q = 0.5 * k3 * m * m;
  const double disc = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  const double u = q >= 0.0 ? -std::cbrt(0.5 * q + disc) : std::cbrt(-0.5 * q + disc);
  double root = u - p / (3.0 * u);
  for (int i = 0; i < 2; ++i) {
    const double slope = 3.0 / m + 6.0 * root * root / (m * m);
    root -= skewness_cubic(block, root) / slope;
  }
  const double scale = std::abs(k3) + 3.0 * std::abs(root) / m + 1.0;
  if (std::isfinite(root) && std::abs(skewness_cubic(block, root)) <= 1e-12 * scale) {
    return root;
  }
  // g is strictly increasing: widen a symmetric bracket until it changes sign.
  double bound = 1.0;
  while (skewness_cubic(block, -bound) > 0.0 || skewness_cubic(block, bound) < 0.0) {
    bound *= 2.0;
    if (bound > 1e300) throw NumericalError("skewness_root: no sign change found");
  }
  double lo = -bound;
  double hi = bound;
  for (int i = 0; i < 2000 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (skewness_cubic(block, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CovarianceBounds covariance_bounds(const MultivariateParams& p, std::size_t i, std::size_t j) {
  validate(p);
  if (i == j) throw InvalidParameter("covariance_bounds: requires two distinct components");
  if (i >= p.dim() || j >= p.dim()) throw InvalidParameter("covariance_bounds: bad index");
  const MomentSummary mom = moments(p);
  const auto sign_of = [](double m3) { return std::abs(m3) < kZeroSkew ? 0 : (m3 > 0 ? 1 : -1); };
  const int si = sign_of(mom.central_m3(static_cast<Eigen::Index>(i)));
  const int sj = sign_of(mom.central_m3(static_cast<Eigen::Index>(j)));

  CovarianceBounds out{};
  out.beta_star_i = skewness_root(p.marginals[i]);
  out.beta_star_j = skewness_root(p.marginals[j]);
  const double finite =
      out.beta_star_i * out.beta_star_j * p.n / (p.marginals[i].m * p.marginals[j].m);
  constexpr double inf = std::numeric_limits<double>::infinity();
  out.lower = -inf;
  out.upper = inf;
  if (si >= 0 && sj >= 0) {
    out.skew_regime = SkewRegime::BothNonneg;
    if (out.beta_star_i >= 0.0 && out.beta_star_j >= 0.0) out.lower = finite;
  } else if (si <= 0 && sj <= 0) {
    out.skew_regime = SkewRegime::BothNonpos;
    if (out.beta_star_i <= 0.0 && out.beta_star_j <= 0.0) out.lower = finite;
  } else {
    out.skew_regime = SkewRegime::Mixed;
  }
  return out;
}

SampleMatrix sample(const MultivariateParams& p, std::size_t count, Rng& rng) {
  return sample(p, count, rng, nullptr);
}

SampleMatrix sample(const MultivariateParams& p, std::size_t count, Rng& rng,
                    Eigen::MatrixXd* mixing) {
  validate(p);
  const std::size_t dim = p.dim();
  const auto rows = static_cast<Eigen::Index>(count);
  const auto cols = static_cast<Eigen::Index>(dim);
  SampleMatrix y(rows, cols);
  if (mixing != nullptr) mixing->resize(rows, cols);

  std::vector<CtsIncrementSampler> increments;
  std::vector<std::gamma_distribution<double>> idiosyncratic;
  increments.reserve(dim);
  idiosyncratic.reserve(dim);
  for (const MarginalBlock& b : p.marginals) {
    increments.emplace_back(b.cts);
    idiosyncratic.emplace_back(b.l, 1.0 / b.m);
  }
  std::gamma_distribution<double> common(p.n, 1.0 / p.k);

  std::vector<double> v(dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < dim; ++i) v[i] = idiosyncratic[i](rng);
    const double z = common(rng);
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] += p.loading(i) * z;
      const MarginalBlock& b = p.marginals[i];
      const auto c = static_cast<Eigen::Index>(i);
      y(r, c) = b.mu + b.beta * v[i] + increments[i](v[i], rng);
      if (mixing != nullptr) (*mixing)(r, c) = v[i];
    }
  }
  return y;
}

}  // namespace mixedts
