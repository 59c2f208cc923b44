#pragma once

// Standardized Classical Tempered Stable (stdCTS) building block.
//
// H ~ stdCTS(alpha, lambda_plus, lambda_minus) has zero mean, unit variance
// and cumulant generating function
//
//   Phi_H(u) = [(l+ - u)^a - l+^a + (l- + u)^a - l-^a] / (a (a-1) S)
//            + (l+^(a-1) - l-^(a-1)) u / ((a-1) S),      S = l+^(a-2) + l-^(a-2)
//
// defined on the strip -lambda_minus <= Re(u) <= lambda_plus.  The
// characteristic exponent is L(u) = Phi_H(iu).

#include <complex>
#include <cstddef>
#include <vector>

#include "mixedts/random.hpp"

namespace mixedts {

struct CtsParams {
  double alpha = 1.5;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
};

/// Throws InvalidParameter unless 0 < alpha <= 2 and both tempering rates are
/// positive and finite.
void validate(const CtsParams& p);

/// True when alpha == 2, i.e. the law degenerates to N(0, 1).
bool is_gaussian(const CtsParams& p);

/// S = lambda_plus^(alpha-2) + lambda_minus^(alpha-2).
double tempering_norm(const CtsParams& p);

/// Phi_H(u) on the closed strip.  Rejects alpha in {1, 2}.
std::complex<double> cts_cumulant(const CtsParams& p, std::complex<double> u);

/// L_stdCTS(u) = Phi_H(iu) for real u.  Rejects alpha in {1, 2}.
std::complex<double> cts_characteristic_exponent(const CtsParams& p, double u);

/// Phi_H'(u) and Phi_H''(u) on the open real strip (closed endpoints are
/// accepted where the derivative stays finite).
double cts_cumulant_d1(const CtsParams& p, double u);
double cts_cumulant_d2(const CtsParams& p, double u);

// Complex extensions used by chain-rule callers (no domain checks beyond the
// alpha restriction).
std::complex<double> cts_cumulant_d1(const CtsParams& p, std::complex<double> u);
std::complex<double> cts_cumulant_d2(const CtsParams& p, std::complex<double> u);

/// Third and fourth cumulants of stdCTS, i.e. Phi_H'''(0) and Phi_H''''(0).
/// Both vanish at alpha == 2.
struct CtsHigherCumulants {
  double k3;
  double k4;
};
CtsHigherCumulants cts_higher_cumulants(const CtsParams& p);

/// Characteristic exponent with the alpha == 2 Gaussian reduction
/// (-u^2/2) folded in; every MixedTS transform goes through this.
std::complex<double> conditional_exponent(const CtsParams& p, double u);

/// Cumulant generating function with the alpha == 2 reduction (u^2/2).
std::complex<double> conditional_cumulant(const CtsParams& p, std::complex<double> u);

enum class CtsSampler {
  /// Exact: difference of two exponentially tilted one-sided stable laws.
  Rejection,
  /// Inverse CDF from an FFT-tabulated distribution function.
  FftInverse,
};

/// `count` draws from stdCTS(alpha, lambda_plus*sqrt(v), lambda_minus*sqrt(v)).
/// alpha == 2 returns standard normal draws.
std::vector<double> cts_sample(const CtsParams& p, double scale_v, std::size_t count, Rng& rng,
                               CtsSampler method = CtsSampler::Rejection);

/// Draws of the stdCTS Levy process at a variable time t, i.e. sqrt(t) * X
/// with X ~ stdCTS(alpha, lambda_plus*sqrt(t), lambda_minus*sqrt(t)).  This is
/// the conditional term sqrt(V) X of every MixedTS sampler.
///
/// Each side is an exponentially tilted totally skewed stable variate; the
/// tilt is applied by rejection on ceil(kappa * lambda^alpha / w^alpha)
/// infinitely divisible pieces so the acceptance rate stays bounded away
/// from zero for any t.  For 1 < alpha < 2 the stable proposal has a
/// (super-exponentially thin) left tail; proposals below -q*sigma are
/// accepted unconditionally, which perturbs the law by less than exp(-45).
/// Expected work per draw is proportional to t * lambda^alpha.
class CtsIncrementSampler {
 public:
  explicit CtsIncrementSampler(const CtsParams& p);

  /// Returns 0 for t == 0.
  double operator()(double t, Rng& rng) const;

  const CtsParams& params() const { return params_; }

 private:
  double one_sided(double kappa, double lambda, Rng& rng) const;

  CtsParams params_;
  bool gaussian_;
  double kappa_per_time_ = 0.0;  // 1 / (alpha |alpha-1| S)
  double cutoff_ = 0.0;          // q, alpha > 1 only
  double piece_scale_ = 1.0;     // w^alpha, alpha > 1 only
};

double cts_process_increment(const CtsParams& p, double t, Rng& rng);

}  // namespace mixedts
