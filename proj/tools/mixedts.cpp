// mixedts: command-line front end for simulation, moments, strip and tail
// analysis, estimation, bootstrap and Levy-density recovery.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixedts/error.hpp"
#include "mixedts/estimate.hpp"
#include "mixedts/io.hpp"
#include "mixedts/levy.hpp"
#include "mixedts/multivariate.hpp"
#include "mixedts/tails.hpp"
#include "mixedts/univariate.hpp"

#ifndef MIXEDTS_VERSION
#define MIXEDTS_VERSION "0.0.0"
#endif

namespace {

using mixedts::io::Json;
namespace io = mixedts::io;

constexpr std::uint64_t kDefaultSeed = 20240917;

class Timer {
 public:
  explicit Timer(std::string name) : name_(std::move(name)), start_(clock::now()) {}
  ~Timer() {
    const double s = std::chrono::duration<double>(clock::now() - start_).count();
    std::fprintf(stderr, "[%s] %.3f s\n", name_.c_str(), s);
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string name_;
  clock::time_point start_;
};

Json metadata(const std::string& command, std::optional<std::uint64_t> seed) {
  Json m;
  m["command"] = command;
  m["version"] = MIXEDTS_VERSION;
  if (seed) {
    m["seed"] = *seed;
  } else {
    m["seed"] = nullptr;
  }
  return m;
}

// Infinite bounds have no JSON representation; they are emitted as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_text_atomic(out, text);
  }
}

Json tail_fit_json(const mixedts::EmpiricalTailFit& f) {
  Json j;
  j["q_star_hat"] = f.q_star_hat;
  j["r_star_hat"] = f.r_star_hat;
  j["zeta"] = f.zeta;
  j["n_left"] = f.n_left;
  j["n_right"] = f.n_right;
  return j;
}

Json strip_json(const mixedts::UnivariateParams& p) {
  const mixedts::StripResult s = mixedts::fundamental_strip(p);
  Json j;
  j["lower"] = s.lower;
  j["upper"] = s.upper;
  j["case"] = mixedts::to_string(s.case_tag);
  j["lower_is_solution"] = s.lower_is_solution;
  j["upper_is_solution"] = s.upper_is_solution;
  j["q_star"] = -s.lower;
  j["r_star"] = s.upper;
  return j;
}

Json moments_json(const mixedts::UnivariateParams& p) {
  const mixedts::UnivariateMoments m = mixedts::moments(p);
  Json j;
  j["mean"] = m.mean;
  j["variance"] = m.variance;
  j["central_m3"] = m.central_m3;
  j["central_m4"] = m.central_m4;
  j["skewness"] = m.central_m3 / std::pow(m.variance, 1.5);
  j["kurtosis"] = m.central_m4 / (m.variance * m.variance);
  return j;
}

Json moments_json(const mixedts::MultivariateParams& p) {
  const mixedts::MomentSummary s = mixedts::moments(p);
  const auto dim = static_cast<Eigen::Index>(p.dim());
  Json j;
  Json means = Json::array(), m3 = Json::array(), m4 = Json::array(), cov = Json::array();
  for (Eigen::Index i = 0; i < dim; ++i) {
    means.push_back(s.means(i));
    m3.push_back(s.central_m3(i));
    m4.push_back(s.central_m4(i));
    Json row = Json::array();
    for (Eigen::Index k = 0; k < dim; ++k) row.push_back(s.covariance(i, k));
    cov.push_back(std::move(row));
  }
  j["means"] = std::move(means);
  j["covariance"] = std::move(cov);
  j["central_m3"] = std::move(m3);
  j["central_m4"] = std::move(m4);
  Json bounds = Json::array();
  for (std::size_t a = 0; a < p.dim(); ++a) {
    for (std::size_t b = a + 1; b < p.dim(); ++b) {
      const mixedts::CovarianceBounds cb = mixedts::covariance_bounds(p, a, b);
      Json e;
      e["i"] = a + 1;
      e["j"] = b + 1;
      e["lower"] = number_or_null(cb.lower);
      e["upper"] = number_or_null(cb.upper);
      e["beta_star_i"] = cb.beta_star_i;
      e["beta_star_j"] = cb.beta_star_j;
      e["skew_regime"] = mixedts::to_string(cb.skew_regime);
      bounds.push_back(std::move(e));
    }
  }
  j["covariance_bounds"] = std::move(bounds);
  return j;
}

// Estimation settings shared by estimate and bootstrap.
struct RunSettings {
  mixedts::EstimateConfig estimate;
  std::size_t replications = 1;
  std::size_t resample_size = 0;
  std::optional<mixedts::MultivariateParams> truth;
};

RunSettings settings_from_json(const Json& c) {
  if (!c.is_object()) throw mixedts::InvalidParameter("config: expected a JSON object");
  RunSettings s;
  mixedts::EstimateConfig& e = s.estimate;
  if (c.contains("n0")) e.n0 = c.at("n0").get<std::size_t>();
  if (c.contains("seed")) e.seed = c.at("seed").get<std::uint64_t>();
  if (c.contains("zeta")) e.zeta = c.at("zeta").get<double>();
  if (c.contains("penalty_mode")) {
    e.penalty_mode = mixedts::penalty_mode_from_string(c.at("penalty_mode").get<std::string>());
  }
  if (c.contains("max_iter")) e.max_iter = c.at("max_iter").get<std::size_t>();
  if (c.contains("tol")) e.tol = c.at("tol").get<double>();
  if (c.contains("replications")) s.replications = c.at("replications").get<std::size_t>();
  if (c.contains("resample_size")) s.resample_size = c.at("resample_size").get<std::size_t>();
  const auto as_multivariate = [](const Json& j) {
    const io::ParamSet ps = io::params_from_json(j);
    if (const auto* m = std::get_if<mixedts::MultivariateParams>(&ps)) return *m;
    throw mixedts::InvalidParameter("config: parameter sets must use the 'marginals' layout");
  };
  if (c.contains("initial_theta")) {
    const Json& t = c.at("initial_theta");
    if (t.is_string()) {
      if (t.get<std::string>() != "auto") {
        throw mixedts::InvalidParameter("config: initial_theta must be \"auto\" or a parameter object");
      }
    } else {
      e.initial_theta = as_multivariate(t);
    }
  }
  if (c.contains("truth")) s.truth = as_multivariate(c.at("truth"));
  return s;
}

Json config_json(const RunSettings& s) {
  Json c;
  c["n0"] = s.estimate.n0;
  c["seed"] = s.estimate.seed;
  c["zeta"] = s.estimate.zeta;
  c["penalty_mode"] = mixedts::to_string(s.estimate.penalty_mode);
  c["max_iter"] = s.estimate.max_iter ? Json(*s.estimate.max_iter) : Json(nullptr);
  c["tol"] = s.estimate.tol;
  c["initial_theta"] = s.estimate.initial_theta ? io::to_json(*s.estimate.initial_theta) : Json("auto");
  return c;
}

std::string hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json report_json(const mixedts::EstimationReport& r) {
  Json j;
  j["theta_hat"] = io::to_json(r.theta_hat);
  j["objective_value"] = r.objective_value;
  j["distance"] = r.distance;
  j["penalty"] = r.penalty;
  j["penalty_weight"] = r.penalty_weight;
  Json tails = Json::array();
  for (const auto& t : r.target_tails) tails.push_back({{"q_star", t.q_star}, {"r_star", t.r_star}});
  j["target_tails"] = std::move(tails);
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["outer_loops"] = r.outer_loops;
  j["converged"] = r.converged;
  j["grid_hash"] = hex(r.grid_hash);
  j["penalty_trace"] = r.penalty_trace;
  return j;
}

std::string table_csv(const mixedts::EstimationReport& r,
                      const std::optional<mixedts::MultivariateParams>& truth) {
  const auto names = mixedts::parameter_names(r.theta_hat.dim());
  const auto est = mixedts::flatten_parameters(r.theta_hat);
  const auto tv = truth ? mixedts::flatten_parameters(*truth) : std::vector<double>{};
  std::string out = "parameter,true,est\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i] + ',' + (truth ? io::format_double(tv[i]) : "NA") + ',' +
           io::format_double(est[i]) + '\n';
  }
  return out;
}

std::string table_csv(const mixedts::BootstrapSummary& s) {
  std::string out = "parameter,true,est,median,sd,quartile1,quartile3\n";
  for (const auto& r : s.rows) {
    out += r.name + ',' + (r.truth ? io::format_double(*r.truth) : "NA");
    for (double v : {r.mean, r.median, r.sd, r.quartile1, r.quartile3}) {
      out += ',' + io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> column(const mixedts::SampleMatrix& m, Eigen::Index c) {
  const Eigen::VectorXd v = m.col(c);
  return {v.data(), v.data() + v.size()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MixedTS distribution toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MIXEDTS_VERSION);

  std::string params_path, data_path, out_path, config_path, theta_out, csv_out, sweep;
  std::uint64_t seed = kDefaultSeed;
  std::size_t count = 0;
  double zeta = mixedts::kDefaultZeta;
  std::size_t reps = 0, size = 0;
  double truncation = mixedts::kDefaultTruncation;
  std::size_t nodes = mixedts::kDefaultNodes;

  auto* simulate = app.add_subcommand("simulate", "Draw a sample to CSV");
  simulate->add_option("--params", params_path, "Parameter JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--count", count, "Number of draws")->required();
  simulate->add_option("--seed", seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* tails = app.add_subcommand("tails", "Empirical tail exponents per column");
  tails->add_option("--data", data_path, "Sample CSV")->required()->check(CLI::ExistingFile);
  tails->add_option("--zeta", zeta, "Quantile level")->capture_default_str();
  tails->add_option("--sweep", sweep, "Comma-separated zeta values");
  tails->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  auto* strip = app.add_subcommand("strip", "Fundamental strip and tail exponents");
  strip->add_option("--params", params_path, "Parameter JSON")->required()->check(CLI::ExistingFile);
  strip->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  auto* moments = app.add_subcommand("moments", "Closed-form moments");
  moments->add_option("--params", params_path, "Parameter JSON")->required()->check(CLI::ExistingFile);
  moments->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  auto* estimate = app.add_subcommand("estimate", "Fit parameters to a sample");
  estimate->add_option("--data", data_path, "Sample CSV")->required()->check(CLI::ExistingFile);
  estimate->add_option("--config", config_path, "Estimation config JSON")->check(CLI::ExistingFile);
  estimate->add_option("--out", out_path, "Report JSON (stdout if omitted)");
  estimate->add_option("--theta-out", theta_out, "Write the fitted parameters as parameter JSON");
  estimate->add_option("--csv", csv_out, "Write a parameter table CSV");

  auto* bootstrap = app.add_subcommand("bootstrap", "Bootstrap distribution of the estimator");
  bootstrap->add_option("--data", data_path, "Sample CSV")->required()->check(CLI::ExistingFile);
  bootstrap->add_option("--config", config_path, "Estimation config JSON")->check(CLI::ExistingFile);
  bootstrap->add_option("--reps", reps, "Replications (overrides config)");
  bootstrap->add_option("--size", size, "Resample size (overrides config)");
  bootstrap->add_option("--out", out_path, "Summary JSON (stdout if omitted)");
  bootstrap->add_option("--csv", csv_out, "Write the summary table CSV");

  auto* levy = app.add_subcommand("levy", "Levy density by Fourier inversion");
  levy->add_option("--params", params_path, "Univariate parameter JSON")->required()->check(CLI::ExistingFile);
  levy->add_option("--truncation", truncation, "Frequency truncation T")->capture_default_str();
  levy->add_option("--nodes", nodes, "FFT nodes M")->capture_default_str();
  levy->add_option("--out", out_path, "Output CSV (x, g)")->required();

  CLI11_PARSE(app, argc, argv);

  bool had_error_record = false;
  try {
    if (simulate->parsed()) {
      const Timer t("simulate");
      const io::ParamSet ps = io::params_from_json(io::read_json(params_path));
      mixedts::Rng rng = mixedts::make_stream(seed, 0);
      mixedts::SampleMatrix y;
      if (const auto* u = std::get_if<mixedts::UnivariateParams>(&ps)) {
        const std::vector<double> draws = mixedts::sample(*u, count, rng);
        y = Eigen::Map<const Eigen::VectorXd>(draws.data(), static_cast<Eigen::Index>(draws.size()));
      } else {
        y = mixedts::sample(std::get<mixedts::MultivariateParams>(ps), count, rng);
      }
      const std::string csv = io::sample_to_csv(y);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        io::write_text_atomic(out_path, csv);
      }
    } else if (tails->parsed()) {
      const Timer t("tails");
      const mixedts::SampleMatrix y = io::read_sample(data_path);
      Json j = metadata("tails", std::nullopt);
      Json cols = Json::array();
      std::vector<double> zetas;
      if (!sweep.empty()) {
        for (const auto& piece : CLI::detail::split(sweep, ',')) zetas.push_back(std::stod(piece));
      }
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const std::vector<double> col = column(y, c);
        Json entry;
        entry["column"] = "y" + std::to_string(c + 1);
        try {
          entry["fit"] = tail_fit_json(mixedts::fit_tail_exponents(col, zeta));
        } catch (const std::exception& e) {
          entry["fit"] = nullptr;
          entry["error"] = e.what();
          had_error_record = true;
        }
        if (!zetas.empty()) {
          Json rows = Json::array();
          for (const auto& s : mixedts::zeta_sweep(col, zetas)) {
            if (s.fit) {
              rows.push_back(tail_fit_json(*s.fit));
            } else {
              rows.push_back({{"zeta", s.zeta}, {"error", s.error}});
              had_error_record = true;
            }
          }
          entry["sweep"] = std::move(rows);
        }
        cols.push_back(std::move(entry));
      }
      j["columns"] = std::move(cols);
      emit(j, out_path);
    } else if (strip->parsed()) {
      const io::ParamSet ps = io::params_from_json(io::read_json(params_path));
      Json j = metadata("strip", std::nullopt);
      if (const auto* u = std::get_if<mixedts::UnivariateParams>(&ps)) {
        j.update(strip_json(*u));
      } else {
        const auto& m = std::get<mixedts::MultivariateParams>(ps);
        Json ms = Json::array();
        for (std::size_t i = 0; i < m.dim(); ++i) ms.push_back(strip_json(m.marginal(i)));
        j["marginals"] = std::move(ms);
      }
      emit(j, out_path);
    } else if (moments->parsed()) {
      const io::ParamSet ps = io::params_from_json(io::read_json(params_path));
      Json j = metadata("moments", std::nullopt);
      std::visit([&j](const auto& p) { j.update(moments_json(p)); }, ps);
      emit(j, out_path);
    } else if (estimate->parsed()) {
      const Timer t("estimate");
      const RunSettings s = settings_from_json(config_path.empty() ? Json::object()
                                                                   : io::read_json(config_path));
      const mixedts::SampleMatrix y = io::read_sample(data_path);
      const mixedts::EstimationReport r = mixedts::estimate(y, s.estimate);
      Json j = metadata("estimate", s.estimate.seed);
      j["config"] = config_json(s);
      j["sample_size"] = y.rows();
      j.update(report_json(r));
      emit(j, out_path);
      if (!theta_out.empty()) io::write_text_atomic(theta_out, io::to_json(r.theta_hat).dump(2) + "\n");
      if (!csv_out.empty()) io::write_text_atomic(csv_out, table_csv(r, s.truth));
    } else if (bootstrap->parsed()) {
      const Timer t("bootstrap");
      RunSettings s = settings_from_json(config_path.empty() ? Json::object()
                                                             : io::read_json(config_path));
      if (reps > 0) s.replications = reps;
      if (size > 0) s.resample_size = size;
      const mixedts::SampleMatrix y = io::read_sample(data_path);
      const mixedts::BootstrapSummary b =
          mixedts::bootstrap_study(y, s.estimate, s.replications, s.resample_size, s.truth);
      Json j = metadata("bootstrap", s.estimate.seed);
      j["config"] = config_json(s);
      j["replications"] = b.replications;
      j["resample_size"] = s.resample_size == 0 ? static_cast<std::size_t>(y.rows()) : s.resample_size;
      j["failures"] = b.failures;
      j["failure_messages"] = b.failure_messages;
      Json rows = Json::array();
      for (const auto& r : b.rows) {
        Json e;
        e["parameter"] = r.name;
        e["true"] = r.truth ? Json(*r.truth) : Json(nullptr);
        e["est"] = r.mean;
        e["median"] = r.median;
        e["sd"] = r.sd;
        e["quartile1"] = r.quartile1;
        e["quartile3"] = r.quartile3;
        rows.push_back(std::move(e));
      }
      j["rows"] = std::move(rows);
      emit(j, out_path);
      if (!csv_out.empty()) io::write_text_atomic(csv_out, table_csv(b));
    } else if (levy->parsed()) {
      const Timer t("levy");
      const io::ParamSet ps = io::params_from_json(io::read_json(params_path));
      const auto* u = std::get_if<mixedts::UnivariateParams>(&ps);
      if (u == nullptr) throw mixedts::InvalidParameter("levy: requires univariate parameters");
      const mixedts::LevyDensityCurve c = mixedts::levy_density(*u, truncation, nodes);
      io::write_text_atomic(out_path, io::columns_to_csv({"x", "g"}, {c.abscissae, c.values}));
      Json j = metadata("levy", std::nullopt);
      j["truncation"] = c.truncation;
      j["nodes"] = c.nodes;
      j["spacing"] = c.spacing;
      j["points"] = c.abscissae.size();
      j["clipped"] = c.clipped;
      j["boundary_ratio"] = c.boundary_ratio;
      j["truncation_warning"] = c.truncation_warning;
      j["integrability"] = mixedts::levy_integrability(c);
      j["out"] = out_path;
      std::cout << j.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    Json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return had_error_record ? 1 : 0;
}
