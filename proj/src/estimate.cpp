#include "mixedts/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <numeric>
#include <random>

#include "mixedts/error.hpp"
#include "mixedts/nelder_mead.hpp"

namespace mixedts {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kPerComponent = 7;
constexpr PenalizedValue kInvalidPoint{1e6, 0.0};
constexpr double kMaxFailureShare = 0.2;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// alpha' = y (2 - 3 delta) on (0, 2 - 3 delta); values at or above 1 - delta
// are shifted past the excluded band around 1.
double alpha_from_unconstrained(double x) {
  const double a = logistic(x) * (2.0 - 3.0 * kAlphaBand);
  return a < 1.0 - kAlphaBand ? a : a + 2.0 * kAlphaBand;
}

double alpha_to_unconstrained(double alpha) {
  double a = alpha;
  if (alpha >= 1.0 + kAlphaBand) {
    a = alpha - 2.0 * kAlphaBand;
  } else if (alpha >= 1.0 - kAlphaBand) {
    a = alpha < 1.0 ? 1.0 - 2.0 * kAlphaBand : 1.0 - kAlphaBand;
  }
  const double y = std::clamp(a / (2.0 - 3.0 * kAlphaBand), 1e-12, 1.0 - 1e-12);
  return std::log(y / (1.0 - y));
}

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Type-7 quantile of sorted data.
double sorted_quantile(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= s.size()) return s.back();
  return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

bool has_two_distinct_rows(const SampleMatrix& s) {
  for (Eigen::Index r = 1; r < s.rows(); ++r) {
    if (s.row(r) != s.row(0)) return true;
  }
  return false;
}

}  // namespace

cplx empirical_cf(const SampleMatrix& sample, std::span<const double> t) {
  if (sample.rows() == 0) throw InsufficientData("empirical_cf: empty sample");
  if (static_cast<Eigen::Index>(t.size()) != sample.cols()) {
    throw InvalidParameter("empirical_cf: argument has wrong dimension");
  }
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  const Eigen::VectorXd s = sample * tv;
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    re += std::cos(s(j));
    im -= std::sin(s(j));
  }
  const auto m = static_cast<double>(sample.rows());
  return {re / m, im / m};
}

QuadratureGrid QuadratureGrid::draw(std::size_t n0, std::size_t dim, std::uint64_t seed) {
  if (n0 == 0 || dim == 0) throw InvalidParameter("quadrature grid: n0 and dim must be positive");
  Rng rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  QuadratureGrid g;
  g.seed = seed;
  g.points.resize(static_cast<Eigen::Index>(n0), static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < g.points.rows(); ++j) {
    for (Eigen::Index i = 0; i < g.points.cols(); ++i) g.points(j, i) = normal(rng);
  }
  return g;
}

std::uint64_t QuadratureGrid::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  const auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t shape[2] = {points.rows(), points.cols()};
  mix(shape, sizeof shape);
  mix(points.data(), static_cast<std::size_t>(points.size()) * sizeof(double));
  return h;
}

std::vector<TailTarget> empirical_tail_targets(const SampleMatrix& sample, double zeta) {
  std::vector<TailTarget> out;
  out.reserve(static_cast<std::size_t>(sample.cols()));
  for (Eigen::Index c = 0; c < sample.cols(); ++c) {
    const Eigen::VectorXd col = sample.col(c);
    const EmpiricalTailFit fit =
        fit_tail_exponents(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), zeta);
    out.push_back({fit.q_star_hat, fit.r_star_hat});
  }
  return out;
}

Objective::Objective(const SampleMatrix& sample, QuadratureGrid grid,
                     std::vector<TailTarget> targets, double penalty_weight)
    : grid_(std::move(grid)),
      targets_(std::move(targets)),
      sample_size_(static_cast<std::size_t>(sample.rows())),
      penalty_weight_(0.0) {
  if (sample.rows() == 0) throw InsufficientData("objective: empty sample");
  if (grid_.points.cols() != sample.cols()) {
    throw InvalidParameter("objective: grid and sample dimensions differ");
  }
  if (targets_.size() != static_cast<std::size_t>(sample.cols())) {
    throw InvalidParameter("objective: one tail target per component is required");
  }
  set_penalty_weight(penalty_weight);
  empirical_.reserve(static_cast<std::size_t>(grid_.points.rows()));
  std::vector<double> t(dim());
  for (Eigen::Index j = 0; j < grid_.points.rows(); ++j) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid_.points(j, static_cast<Eigen::Index>(i));
    empirical_.push_back(empirical_cf(sample, t));
  }
}

Objective::Objective(QuadratureGrid grid, std::vector<std::complex<double>> empirical_values,
                     std::vector<TailTarget> targets, std::size_t sample_size,
                     double penalty_weight)
    : grid_(std::move(grid)),
      targets_(std::move(targets)),
      empirical_(std::move(empirical_values)),
      sample_size_(sample_size),
      penalty_weight_(0.0) {
  if (empirical_.size() != static_cast<std::size_t>(grid_.points.rows())) {
    throw InvalidParameter("objective: one empirical value per grid node is required");
  }
  if (targets_.size() != dim()) {
    throw InvalidParameter("objective: one tail target per component is required");
  }
  set_penalty_weight(penalty_weight);
}

void Objective::set_penalty_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidParameter("objective: penalty weight must be >= 0");
  penalty_weight_ = w;
}

double cf_distance(const Objective& objective, const MultivariateParams& theta) {
  if (theta.dim() != objective.dim()) {
    throw InvalidParameter("cf_distance: parameter dimension differs from the sample");
  }
  const Eigen::MatrixXd& nodes = objective.grid().points;
  const auto& emp = objective.empirical_values();
  std::vector<double> t(objective.dim());
  double total = 0.0;
  for (Eigen::Index j = 0; j < nodes.rows(); ++j) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = -nodes(j, static_cast<Eigen::Index>(i));
    const cplx model = joint_characteristic_function(theta, t);
    total += std::norm(emp[static_cast<std::size_t>(j)] - model);
  }
  return total / static_cast<double>(nodes.rows());
}

double penalty(const MultivariateParams& theta, std::span<const TailTarget> targets) {
  if (targets.size() != theta.dim()) {
    throw InvalidParameter("penalty: one tail target per component is required");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    const TailExponents model = tail_exponents(theta.marginal(i));
    const double dq = model.q_star - targets[i].q_star;
    const double dr = model.r_star - targets[i].r_star;
    h += dq * dq + dr * dr;
  }
  return h;
}

double objective_value(const Objective& objective, const MultivariateParams& theta) {
  return cf_distance(objective, theta) +
         objective.penalty_weight() * penalty(theta, objective.target_tails());
}

std::vector<double> pack_parameters(const MultivariateParams& theta) {
  validate(theta);
  std::vector<double> x;
  x.reserve(kPerComponent * theta.dim() + 1);
  for (const MarginalBlock& b : theta.marginals) {
    x.push_back(b.mu);
    x.push_back(b.beta);
    x.push_back(std::log(b.m));
    x.push_back(std::log(b.l));
    x.push_back(alpha_to_unconstrained(b.cts.alpha));
    x.push_back(std::log(b.cts.lambda_plus));
    x.push_back(std::log(b.cts.lambda_minus));
  }
  // Only n / k matters once the loadings are k / m_i.
  x.push_back(std::log(theta.n));
  return x;
}

MultivariateParams unpack_parameters(std::span<const double> x) {
  if (x.size() < kPerComponent + 1 || (x.size() - 1) % kPerComponent != 0) {
    throw InvalidParameter("unpack_parameters: bad vector length");
  }
  MultivariateParams theta;
  const std::size_t dim = (x.size() - 1) / kPerComponent;
  theta.marginals.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double* c = x.data() + kPerComponent * i;
    MarginalBlock& b = theta.marginals[i];
    b.mu = c[0];
    b.beta = c[1];
    b.m = std::exp(c[2]);
    b.l = std::exp(c[3]);
    b.cts.alpha = alpha_from_unconstrained(c[4]);
    b.cts.lambda_plus = std::exp(c[5]);
    b.cts.lambda_minus = std::exp(c[6]);
  }
  theta.n = std::exp(x.back());
  theta.k = 1.0;
  return theta;
}

std::vector<std::string> parameter_names(std::size_t dim) {
  static const char* const kNames[kPerComponent] = {"mu",    "beta",     "m",       "l",
                                                    "alpha", "lambda_p", "lambda_m"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) {
    for (const char* n : kNames) names.push_back(std::string(n) + "_" + std::to_string(i + 1));
  }
  names.emplace_back("n");
  return names;
}

std::vector<double> flatten_parameters(const MultivariateParams& theta) {
  std::vector<double> v;
  for (const MarginalBlock& b : theta.marginals) {
    v.insert(v.end(), {b.mu, b.beta, b.m, b.l, b.cts.alpha, b.cts.lambda_plus, b.cts.lambda_minus});
  }
  v.push_back(theta.n / theta.k);
  return v;
}

const char* to_string(PenaltyMode m) {
  return m == PenaltyMode::Dynamic ? "dynamic" : "sequential";
}

PenaltyMode penalty_mode_from_string(const std::string& s) {
  if (s == "dynamic") return PenaltyMode::Dynamic;
  if (s == "sequential") return PenaltyMode::Sequential;
  throw InvalidParameter("penalty_mode must be 'dynamic' or 'sequential', got '" + s + "'");
}

MultivariateParams method_of_moments_start(const SampleMatrix& sample) {
  if (sample.rows() < 2) throw InsufficientData("method_of_moments_start: need two rows");
  // Fourth cumulant of stdCTS(1.5, 1, 1).
  const double k4 = cts_higher_cumulants(CtsParams{1.5, 1.0, 1.0}).k4;
  const auto rows = static_cast<double>(sample.rows());
  MultivariateParams theta;
  std::vector<double> shape;
  for (Eigen::Index c = 0; c < sample.cols(); ++c) {
    const Eigen::VectorXd col = sample.col(c);
    const double mean = col.mean();
    const Eigen::ArrayXd d = col.array() - mean;
    const double var = d.square().sum() / rows;
    const double m4 = d.square().square().sum() / rows;
    if (!(var > 0.0)) throw InsufficientData("method_of_moments_start: constant column");
    const double excess = m4 / (var * var) - 3.0;
    // Excess kurtosis of the beta = 0 model is (k4 m + 3) / A with A = var m.
    const double denom = excess * var - k4;
    const double m = denom > 0.0 ? std::clamp(3.0 / denom, 0.2, 5.0) : 1.0;
    MarginalBlock b;
    b.mu = mean;
    b.beta = 0.0;
    b.cts = CtsParams{1.5, 1.0, 1.0};
    b.m = m;
    theta.marginals.push_back(b);
    shape.push_back(var * m);
  }
  theta.n = 0.5 * *std::min_element(shape.begin(), shape.end());
  theta.k = 1.0;
  for (std::size_t i = 0; i < theta.dim(); ++i) theta.marginals[i].l = shape[i] - theta.n;
  return theta;
}

EstimationReport estimate(const SampleMatrix& sample, const EstimateConfig& config) {
  if (sample.rows() < 2 || !has_two_distinct_rows(sample)) {
    throw InsufficientData("estimate: need at least two distinct observations");
  }
  if (!(config.tol >= 0.0)) throw InvalidParameter("estimate: tol must be nonnegative");
  const auto dim = static_cast<std::size_t>(sample.cols());
  MultivariateParams start =
      config.initial_theta ? *config.initial_theta : method_of_moments_start(sample);
  validate(start);
  if (start.dim() != dim) {
    throw InvalidParameter("estimate: initial_theta dimension differs from the sample");
  }

  std::vector<TailTarget> targets = empirical_tail_targets(sample, config.zeta);
  Objective objective(sample, QuadratureGrid::draw(config.n0, dim, config.seed), targets, 1.0);
  const std::uint64_t grid_hash = objective.grid().hash();

  const PenalizedObjective f = [&objective](const std::vector<double>& x) -> PenalizedValue {
    try {
      const MultivariateParams theta = unpack_parameters(x);
      validate(theta);
      const double d = cf_distance(objective, theta);
      const double h = penalty(theta, objective.target_tails());
      if (!std::isfinite(d) || !std::isfinite(h)) return kInvalidPoint;
      return {d, h};
    } catch (const std::exception&) {
      return kInvalidPoint;
    }
  };

  NelderMeadOptions options;
  options.tol = config.tol;
  options.max_iter = config.max_iter ? *config.max_iter : 2000 * (kPerComponent * dim + 1);

  EstimationReport report{};
  report.target_tails = targets;
  report.grid_hash = grid_hash;
  std::size_t outer = 0;
  const auto record = [&](const NelderMeadState& s) {
    report.penalty_trace.push_back(s.weight);
    if (config.observer) {
      config.observer(TraceRecord{outer, s.iteration, s.best.distance + s.weight * s.best.penalty,
                                  s.best.distance, s.best.penalty, s.weight,
                                  objective.grid().hash()});
    }
  };

  std::vector<double> x = pack_parameters(start);
  NelderMeadResult result{};
  double weight = 1.0;
  if (config.penalty_mode == PenaltyMode::Dynamic) {
    // The weight for iteration k is the penalty of the best vertex after k - 1.
    const WeightUpdate update = [&](const NelderMeadState& s) {
      record(s);
      return s.best.penalty;
    };
    result = nelder_mead(f, x, weight, options, update);
    report.outer_loops = 1;
    report.converged = result.converged;
  } else {
    const WeightUpdate update = [&](const NelderMeadState& s) {
      record(s);
      return s.weight;
    };
    std::optional<double> previous;
    bool outer_converged = false;
    for (outer = 0; outer < std::max<std::size_t>(config.max_outer, 1); ++outer) {
      NelderMeadResult r = nelder_mead(f, x, weight, options, update);
      report.iterations += r.iterations;
      report.evaluations += r.evaluations;
      x = r.x;
      const bool stop = previous && std::abs(*previous - r.objective) <= config.outer_tol;
      previous = r.objective;
      result = std::move(r);
      report.outer_loops = outer + 1;
      if (stop || options.max_iter == 0) {
        outer_converged = stop;
        break;
      }
      weight *= 10.0;
    }
    report.converged = outer_converged && result.converged;
  }
  if (config.penalty_mode == PenaltyMode::Dynamic) {
    report.iterations = result.iterations;
    report.evaluations = result.evaluations;
  }

  // A zero budget reports the start point itself, unpacked from its exact
  // parameters rather than the transformed vector.
  report.theta_hat = options.max_iter == 0 ? start : unpack_parameters(result.x);
  if (options.max_iter == 0) report.theta_hat.k = start.k;
  report.distance = result.value.distance;
  report.penalty = result.value.penalty;
  report.penalty_weight = result.weight;
  report.objective_value = result.objective;
  if (report.objective_value >= kInvalidPoint.distance) {
    throw NumericalError("estimate: no valid parameter point reached");
  }
  return report;
}

BootstrapSummary bootstrap_study(const SampleMatrix& sample, const EstimateConfig& config,
                                 std::size_t replications, std::size_t resample_size,
                                 const std::optional<MultivariateParams>& truth) {
  if (replications == 0) throw InvalidParameter("bootstrap: replications must be >= 1");
  if (sample.rows() == 0) throw InsufficientData("bootstrap: empty sample");
  const std::size_t size = resample_size == 0 ? static_cast<std::size_t>(sample.rows()) : resample_size;
  const auto dim = static_cast<std::size_t>(sample.cols());
  if (truth && truth->dim() != dim) throw InvalidParameter("bootstrap: truth dimension differs");

  BootstrapSummary out{};
  out.replications = replications;
  std::uniform_int_distribution<Eigen::Index> pick(0, sample.rows() - 1);
  SampleMatrix replicate(static_cast<Eigen::Index>(size), sample.cols());
  for (std::size_t r = 0; r < replications; ++r) {
    Rng rng = make_stream(config.seed, r + 1);
    for (Eigen::Index i = 0; i < replicate.rows(); ++i) replicate.row(i) = sample.row(pick(rng));
    try {
      out.estimates.push_back(flatten_parameters(estimate(replicate, config).theta_hat));
    } catch (const std::exception& e) {
      ++out.failures;
      out.failure_messages.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }
  if (static_cast<double>(out.failures) > kMaxFailureShare * static_cast<double>(replications)) {
    throw NumericalError("bootstrap: " + std::to_string(out.failures) + " of " +
                         std::to_string(replications) + " replicates failed");
  }

  const std::vector<std::string> names = parameter_names(dim);
  const std::vector<double> truth_flat = truth ? flatten_parameters(*truth) : std::vector<double>{};
  for (std::size_t p = 0; p < names.size(); ++p) {
    std::vector<double> v;
    v.reserve(out.estimates.size());
    for (const auto& e : out.estimates) v.push_back(e[p]);
    std::sort(v.begin(), v.end());
    BootstrapRow row{};
    row.name = names[p];
    if (truth) row.truth = truth_flat[p];
    row.mean = sample_mean(v);
    double ss = 0.0;
    for (double e : v) ss += (e - row.mean) * (e - row.mean);
    row.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    row.median = sorted_quantile(v, 0.5);
    row.quartile1 = sorted_quantile(v, 0.25);
    row.quartile3 = sorted_quantile(v, 0.75);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mixedts
