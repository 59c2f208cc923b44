#pragma once

// N-dimensional MixedTS with common-factor Gamma mixing:
//
//   Y_i = mu_i + beta_i V_i + sqrt(V_i) X_i,   V_i = G_i + a_i Z,
//   G_i ~ Gamma(l_i, m_i),  Z ~ Gamma(n, k),  a_i = k / m_i,
//
// so that each V_i ~ Gamma(l_i + n, m_i) and the shared Z drives the
// dependence between components.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mixedts/cts.hpp"
#include "mixedts/random.hpp"
#include "mixedts/univariate.hpp"

namespace mixedts {

/// Observations, one row per draw and one column per component.
using SampleMatrix = Eigen::MatrixXd;

struct MarginalBlock {
  double mu = 0.0;
  double beta = 0.0;
  CtsParams cts;
  double l = 1.0;  ///< idiosyncratic Gamma shape
  double m = 1.0;  ///< idiosyncratic Gamma rate
};

struct MultivariateParams {
  std::vector<MarginalBlock> marginals;
  double n = 1.0;  ///< common-factor shape
  double k = 1.0;  ///< common-factor rate

  std::size_t dim() const { return marginals.size(); }
  /// Loading of the common factor, k / m_i (derived, never stored).
  double loading(std::size_t i) const { return k / marginals[i].m; }
  /// Implied univariate law of component i: MixedTS with Gamma(l_i + n, m_i).
  UnivariateParams marginal(std::size_t i) const;
};

/// Throws InvalidParameter on a violated invariant.  A single component is
/// accepted (the estimator fits N = 1 samples); covariance bounds need two.
void validate(const MultivariateParams& p);

struct MomentSummary {
  Eigen::VectorXd means;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd central_m3;
  Eigen::VectorXd central_m4;
};

enum class SkewRegime { BothNonneg, BothNonpos, Mixed };

const char* to_string(SkewRegime r);

/// Covariance range reachable by varying the skewness loadings while keeping
/// the marginal skewness signs.  Infinite endpoints are +/-infinity.
struct CovarianceBounds {
  double lower;
  double upper;
  double beta_star_i;
  double beta_star_j;
  SkewRegime skew_regime;
};

std::complex<double> joint_characteristic_exponent(const MultivariateParams& p,
                                                   std::span<const double> t);
std::complex<double> joint_characteristic_function(const MultivariateParams& p,
                                                   std::span<const double> t);

MomentSummary moments(const MultivariateParams& p);

/// g(beta) = k3 + 3 beta / m + 2 beta^3 / m^2 for component i: the factor
/// whose sign is the sign of the marginal third central moment.
double skewness_cubic(const MarginalBlock& block, double beta);

/// Unique real root of skewness_cubic (closed-form depressed cubic, bisection
/// fallback).
double skewness_root(const MarginalBlock& block);

/// Range of sigma_ij over all (beta_i, beta_j) keeping the current skew
/// signs, other parameters fixed. The finite value beta*_i beta*_j n/(m_i m_j)
/// is a lower bound when both skews are >= 0 with both beta* >= 0, or both
/// skews are <= 0 with both beta* <= 0. Every other configuration is
/// unbounded on both sides (the upper side is always +inf).
CovarianceBounds covariance_bounds(const MultivariateParams& p, std::size_t i, std::size_t j);

SampleMatrix sample(const MultivariateParams& p, std::size_t count, Rng& rng);

/// As sample(), also returning the realised mixing vectors V (same shape).
SampleMatrix sample(const MultivariateParams& p, std::size_t count, Rng& rng,
                    Eigen::MatrixXd* mixing);

}  // namespace mixedts
