#include "mixedts/univariate.hpp"

#include <cmath>
#include <string>

#include "mixedts/error.hpp"

namespace mixedts {

namespace {

using cplx = std::complex<double>;

constexpr int kBisectionMaxIter = 200;
constexpr double kBisectionTol = 1e-12;
constexpr double kResidualTol = 1e-12;

// Root of a continuous f on [neg, pos] with f(neg) < 0 <= f(pos) (either
// ordering of the two abscissae).  Near an endpoint singularity of f' a
// bracket of width 1e-12 can still leave a sizeable residual, so bisection
// continues until the residual is small as well or the bracket cannot shrink.
template <typename F>
double bisect(F&& f, double neg, double pos) {
  double mid = 0.5 * (neg + pos);
  for (int i = 0; i < kBisectionMaxIter; ++i) {
    mid = 0.5 * (neg + pos);
    if (mid == neg || mid == pos) break;
    const double value = f(mid);
    if (!std::isfinite(value)) throw NumericalError("bisection: non-finite function value");
    if (std::abs(pos - neg) <= kBisectionTol && std::abs(value) <= kResidualTol) break;
    if (value < 0.0) {
      neg = mid;
    } else {
      pos = mid;
    }
  }
  return mid;
}

}  // namespace

void validate(const UnivariateParams& p) {
  validate(p.cts);
  if (!(p.a > 0.0 && std::isfinite(p.a)) || !(p.b > 0.0 && std::isfinite(p.b))) {
    throw InvalidParameter("univariate: Gamma shape and rate must be positive and finite");
  }
  if (!std::isfinite(p.mu) || !std::isfinite(p.beta)) {
    throw InvalidParameter("univariate: mu and beta must be finite");
  }
}

const char* to_string(StripCase c) {
  switch (c) {
    case StripCase::Case1: return "Case1";
    case StripCase::Case2: return "Case2";
    case StripCase::Case3: return "Case3";
    case StripCase::Case4: return "Case4";
  }
  return "?";
}

cplx gamma_cumulant(double shape, double rate, cplx s) {
  return -shape * std::log(1.0 - s / rate);
}

cplx cumulant(const UnivariateParams& p, cplx u) {
  validate(p);
  const cplx inner = p.beta * u + conditional_cumulant(p.cts, u);
  if (!(inner.real() < p.b)) {
    throw DomainError("cumulant: Re(beta u + Phi_H(u)) reaches the Gamma rate b");
  }
  return p.mu * u + gamma_cumulant(p.a, p.b, inner);
}

cplx characteristic_exponent(const UnivariateParams& p, double t) {
  const cplx inner = cplx(0.0, t * p.beta) + conditional_exponent(p.cts, t);
  return cplx(0.0, t * p.mu) + gamma_cumulant(p.a, p.b, inner);
}

cplx characteristic_function(const UnivariateParams& p, double t) {
  return std::exp(characteristic_exponent(p, t));
}

UnivariateMoments moments(const UnivariateParams& p) {
  validate(p);
  const double a = p.a;
  const double b = p.b;
  const double beta = p.beta;
  // Gamma(a, b) moments.
  const double ev = a / b;
  const double var_v = a / (b * b);
  const double m3_v = 2.0 * a / (b * b * b);
  const double m4_v = (3.0 * a * a + 6.0 * a) / (b * b * b * b);
  const double ev2 = a * (a + 1.0) / (b * b);
  const double centred_sq_times_v = a * (a + 2.0) / (b * b * b);  // E[(V - EV)^2 V]
  const auto [k3, k4] = cts_higher_cumulants(p.cts);

  UnivariateMoments m{};
  m.mean = p.mu + beta * ev;
  m.variance = beta * beta * var_v + ev;
  m.central_m3 = beta * beta * beta * m3_v + 3.0 * beta * var_v + k3 * ev;
  // E[X^4 | V] = k4 / V + 3 contributes k4 E[V] + 3 E[V^2].
  m.central_m4 = beta * beta * beta * beta * m4_v + 6.0 * beta * beta * centred_sq_times_v +
                 4.0 * beta * k3 * var_v + k4 * ev + 3.0 * ev2;
  return m;
}

double strip_function(const UnivariateParams& p, double u) {
  return p.beta * u + cts_cumulant(p.cts, cplx(u, 0.0)).real() - p.b;
}

StripResult fundamental_strip(const UnivariateParams& p) {
  validate(p);
  if (is_gaussian(p.cts)) {
    throw UnsupportedParameter("fundamental_strip: requires 0 < alpha < 2");
  }
  const double left = -p.cts.lambda_minus;
  const double right = p.cts.lambda_plus;
  const auto g = [&](double u) { return strip_function(p, u); };
  const double g_left = g(left);
  const double g_right = g(right);

  StripResult r{left, right, StripCase::Case1, g_left >= 0.0, g_right >= 0.0};
  // G(0) = -b < 0 and G is convex, so each root is bracketed by 0 and the
  // endpoint where G is nonnegative.
  if (r.lower_is_solution && g_left > 0.0) r.lower = bisect(g, 0.0, left);
  if (r.upper_is_solution && g_right > 0.0) r.upper = bisect(g, 0.0, right);

  if (!r.lower_is_solution && !r.upper_is_solution) {
    r.case_tag = StripCase::Case1;
  } else if (!r.lower_is_solution) {
    r.case_tag = StripCase::Case2;
  } else if (!r.upper_is_solution) {
    r.case_tag = StripCase::Case3;
  } else {
    r.case_tag = StripCase::Case4;
  }
  return r;
}

TailExponents tail_exponents(const UnivariateParams& p) {
  const StripResult strip = fundamental_strip(p);
  return {-strip.lower, strip.upper};
}

std::vector<double> sample(const UnivariateParams& p, std::size_t count, Rng& rng) {
  validate(p);
  const CtsIncrementSampler increment(p.cts);
  std::gamma_distribution<double> mixing(p.a, 1.0 / p.b);
  std::vector<double> out(count);
  for (double& y : out) {
    const double v = mixing(rng);
    y = p.mu + p.beta * v + increment(v, rng);
  }
  return out;
}

UnivariateParams levy_increment_params(const UnivariateParams& p, double t) {
  validate(p);
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidParameter("levy_increment_params: t must be positive and finite");
  }
  UnivariateParams q = p;
  q.mu = p.mu * t;
  q.a = p.a * t;
  return q;
}

}  // namespace mixedts
