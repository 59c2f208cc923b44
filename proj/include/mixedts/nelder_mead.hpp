#pragma once

// Nelder-Mead simplex search for objectives of the form f = d + w * h, where
// the weight w may be changed between iterations without re-evaluating d and
// h at the simplex vertices.

#include <cstddef>
#include <functional>
#include <vector>

namespace mixedts {

struct PenalizedValue {
  double distance = 0.0;
  double penalty = 0.0;
};

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Initial simplex: x0 + step_fraction * max(1, |x0_i|) along each axis.
  double step_fraction = 0.05;
  /// Stop once max f - min f over the simplex falls below tol.
  double tol = 1e-8;
  /// When positive, also require every vertex to lie within xtol of the best
  /// one in each coordinate.  A simplex straddling a minimum symmetrically
  /// has zero objective spread, so the objective test alone can stop early.
  double xtol = 0.0;
  std::size_t max_iter = 1000;
};

struct NelderMeadState {
  std::size_t iteration;
  const std::vector<double>& best_x;
  PenalizedValue best;
  double weight;
};

struct NelderMeadResult {
  std::vector<double> x;
  PenalizedValue value;
  double weight;       ///< weight in force when the search stopped
  double objective;    ///< value.distance + weight * value.penalty
  std::size_t iterations;
  std::size_t evaluations;
  bool converged;
};

using PenalizedObjective = std::function<PenalizedValue(const std::vector<double>&)>;

/// Called after every iteration with the current best vertex; returns the
/// weight for the next iteration.  An empty function keeps the weight fixed.
using WeightUpdate = std::function<double(const NelderMeadState&)>;

NelderMeadResult nelder_mead(const PenalizedObjective& f, std::vector<double> x0, double weight,
                             const NelderMeadOptions& options, const WeightUpdate& update = {});

}  // namespace mixedts
