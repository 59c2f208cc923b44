#pragma once

// Univariate MixedTS with Gamma mixing:
//
//   Y = mu + beta V + sqrt(V) X,   V ~ Gamma(a, b) (shape a, rate b),
//   X | V ~ stdCTS(alpha, lambda_plus sqrt(V), lambda_minus sqrt(V)),
//
// with cumulant generating function
//   Phi_Y(u) = mu u + a log(b / (b - (beta u + Phi_H(u)))).

#include <complex>
#include <cstddef>
#include <vector>

#include "mixedts/cts.hpp"
#include "mixedts/random.hpp"

namespace mixedts {

struct UnivariateParams {
  double mu = 0.0;
  double beta = 0.0;
  CtsParams cts;
  double a = 1.0;  ///< Gamma shape
  double b = 1.0;  ///< Gamma rate
};

void validate(const UnivariateParams& p);

enum class StripCase { Case1, Case2, Case3, Case4 };

const char* to_string(StripCase c);

/// Real section [lower, upper] of the fundamental strip.  In Case1 the
/// endpoints are the CTS bounds -lambda_minus and lambda_plus; an endpoint
/// flagged `*_is_solution` is instead the root of beta u + Phi_H(u) = b.
struct StripResult {
  double lower;
  double upper;
  StripCase case_tag;
  bool lower_is_solution;
  bool upper_is_solution;
};

/// Exponential decay rates: log P(Y < -x) ~ -q_star x, log P(Y > x) ~ -r_star x.
struct TailExponents {
  double q_star;
  double r_star;
};

struct UnivariateMoments {
  double mean;
  double variance;
  double central_m3;
  double central_m4;
};

/// Gamma cumulant a log(b / (b - s)) on its principal branch.
std::complex<double> gamma_cumulant(double shape, double rate, std::complex<double> s);

/// Phi_Y(u).  Throws DomainError outside the strip or once
/// Re(beta u + Phi_H(u)) reaches b.
std::complex<double> cumulant(const UnivariateParams& p, std::complex<double> u);

/// log phi_Y(t) = i t mu + Phi_Gamma(i t beta + L(t)).
std::complex<double> characteristic_exponent(const UnivariateParams& p, double t);

/// phi_Y(t) = E exp(i t Y).
std::complex<double> characteristic_function(const UnivariateParams& p, double t);

/// Mean, variance and third/fourth central moments in closed form.
UnivariateMoments moments(const UnivariateParams& p);

/// G(u) = beta u + Phi_H(u) - b, the function whose roots bound the strip.
double strip_function(const UnivariateParams& p, double u);

/// Classifies the strip into the four cases and solves G(u) = 0 by bisection
/// where an endpoint is a root.  Requires 0 < alpha < 2, alpha != 1.
StripResult fundamental_strip(const UnivariateParams& p);

TailExponents tail_exponents(const UnivariateParams& p);

std::vector<double> sample(const UnivariateParams& p, std::size_t count, Rng& rng);

/// Law of the increment Y_{s+t} - Y_s of the MixedTS-Gamma Levy process:
/// (mu t, beta, alpha, lambda_plus, lambda_minus) with mixing Gamma(a t, b).
UnivariateParams levy_increment_params(const UnivariateParams& p, double t);

}  // namespace mixedts
