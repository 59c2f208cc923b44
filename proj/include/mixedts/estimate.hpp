#pragma once

// Characteristic-function matching estimator for the multivariate MixedTS.
//
// The objective is the Monte Carlo approximation, on a frozen grid of n0
// standard normal nodes t_j, of the Gaussian-weighted squared distance
// between the empirical CF E exp(-i<t, X>) and the model CF at -t, plus a
// weighted penalty on the gap between model and empirical tail exponents.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixedts/multivariate.hpp"
#include "mixedts/tails.hpp"

namespace mixedts {

/// (1/m) sum_j exp(-i <t, X_j>) over the rows of `sample`.
std::complex<double> empirical_cf(const SampleMatrix& sample, std::span<const double> t);

struct QuadratureGrid {
  Eigen::MatrixXd points;  ///< n0 x N, one node per row
  std::uint64_t seed = 0;

  static QuadratureGrid draw(std::size_t n0, std::size_t dim, std::uint64_t seed);
  /// FNV-1a digest of the node coordinates.
  std::uint64_t hash() const;
};

struct TailTarget {
  double q_star;
  double r_star;
};

/// Empirical tail exponents of every column of `sample` at level zeta.
std::vector<TailTarget> empirical_tail_targets(const SampleMatrix& sample, double zeta);

class Objective {
 public:
  Objective(const SampleMatrix& sample, QuadratureGrid grid, std::vector<TailTarget> targets,
            double penalty_weight = 1.0);
  /// From precomputed empirical CF values, one per grid node.
  Objective(QuadratureGrid grid, std::vector<std::complex<double>> empirical_values,
            std::vector<TailTarget> targets, std::size_t sample_size, double penalty_weight = 1.0);

  const QuadratureGrid& grid() const { return grid_; }
  const std::vector<TailTarget>& target_tails() const { return targets_; }
  /// Empirical CF at each grid node, computed once at construction.
  const std::vector<std::complex<double>>& empirical_values() const { return empirical_; }
  std::size_t dim() const { return static_cast<std::size_t>(grid_.points.cols()); }
  std::size_t sample_size() const { return sample_size_; }

  double penalty_weight() const { return penalty_weight_; }
  void set_penalty_weight(double w);

 private:
  QuadratureGrid grid_;
  std::vector<TailTarget> targets_;
  std::vector<std::complex<double>> empirical_;
  std::size_t sample_size_;
  double penalty_weight_;
};

/// (1/n0) sum_j |phi_hat(t_j) - phi_Y(-t_j; theta)|^2, always in [0, 4].
double cf_distance(const Objective& objective, const MultivariateParams& theta);

/// sum_i (q_i - q_i^target)^2 + (r_i - r_i^target)^2 with the model tail
/// exponents of each implied marginal.
double penalty(const MultivariateParams& theta, std::span<const TailTarget> targets);

/// cf_distance + penalty_weight * penalty.
double objective_value(const Objective& objective, const MultivariateParams& theta);

// Unconstrained coordinates: per component (mu, beta, log m, log l,
// banded-logit alpha, log lambda_plus, log lambda_minus), then log n.  The
// common-factor rate k is fixed at 1: scaling Z by k leaves the law of V
// unchanged, so k is not identifiable.
std::vector<double> pack_parameters(const MultivariateParams& theta);
MultivariateParams unpack_parameters(std::span<const double> x);

/// Half-width of the excluded bands around alpha = 1 and alpha = 2.
inline constexpr double kAlphaBand = 1e-3;

/// Names of the flattened parameter vector, in reporting order.
std::vector<std::string> parameter_names(std::size_t dim);
/// (mu_i, beta_i, m_i, l_i, alpha_i, lambda_p_i, lambda_m_i)_i then n.
std::vector<double> flatten_parameters(const MultivariateParams& theta);

enum class PenaltyMode { Dynamic, Sequential };

const char* to_string(PenaltyMode m);
PenaltyMode penalty_mode_from_string(const std::string& s);

struct TraceRecord {
  std::size_t outer;      ///< sequential-mode loop index (0 in dynamic mode)
  std::size_t iteration;  ///< simplex iteration within the loop
  double best_objective;  ///< best vertex objective under penalty_weight
  double distance;
  double penalty;
  double penalty_weight;
  std::uint64_t grid_hash;
};

struct EstimateConfig {
  std::size_t n0 = 150;
  std::uint64_t seed = 20240917;
  double zeta = kDefaultZeta;
  PenaltyMode penalty_mode = PenaltyMode::Dynamic;
  /// Start point; method-of-moments start when empty.
  std::optional<MultivariateParams> initial_theta;
  /// Simplex iteration budget per run; 2000 * dim when empty.
  std::optional<std::size_t> max_iter;
  double tol = 1e-8;
  /// Sequential mode: stop once successive optima differ by at most this.
  double outer_tol = 1e-6;
  std::size_t max_outer = 10;
  std::function<void(const TraceRecord&)> observer;
};

struct EstimationReport {
  MultivariateParams theta_hat;
  double objective_value;
  double distance;
  double penalty;
  double penalty_weight;
  std::vector<double> penalty_trace;  ///< weight in force at each iteration
  std::vector<TailTarget> target_tails;
  std::size_t iterations;
  std::size_t evaluations;
  std::size_t outer_loops;
  bool converged;
  std::uint64_t grid_hash;
};

/// Throws InvalidParameter for an invalid start or config and
/// InsufficientData when the sample cannot support the tail targets.
/// Non-convergence is reported through `converged`.
EstimationReport estimate(const SampleMatrix& sample, const EstimateConfig& config);

/// Start point from the sample mean, variance and kurtosis with beta = 0,
/// alpha = 1.5 and unit tempering.
MultivariateParams method_of_moments_start(const SampleMatrix& sample);

struct BootstrapRow {
  std::string name;
  std::optional<double> truth;
  double mean;
  double median;
  double sd;
  double quartile1;
  double quartile3;
};

struct BootstrapSummary {
  std::vector<BootstrapRow> rows;
  std::size_t replications;
  std::size_t failures;
  std::vector<std::string> failure_messages;
  /// Flattened estimates of the successful replicates.
  std::vector<std::vector<double>> estimates;
};

/// Resamples rows with replacement (resample_size rows, or the sample size
/// when 0) and estimates each replicate with the same grid.  Replicate r
/// resamples from stream r of config.seed.  Throws NumericalError when more
/// than 20% of the replicates fail.
BootstrapSummary bootstrap_study(const SampleMatrix& sample, const EstimateConfig& config,
                                 std::size_t replications, std::size_t resample_size,
                                 const std::optional<MultivariateParams>& truth = std::nullopt);

}  // namespace mixedts
