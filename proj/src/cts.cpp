#include "mixedts/cts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "mixedts/error.hpp"

namespace mixedts {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kAlphaOneTol = 1e-9;
// Pieces beyond this per draw mean the parameters are outside what rejection
// can handle in reasonable time.
constexpr double kMaxPieces = 5e7;

cplx cpow(cplx z, double e) {
  if (z == cplx(0.0, 0.0)) {
    return e > 0.0 ? cplx(0.0, 0.0) : cplx(std::numeric_limits<double>::infinity(), 0.0);
  }
  return std::exp(e * std::log(z));
}

void require_closed_form(const CtsParams& p, const char* what) {
  validate(p);
  if (std::abs(p.alpha - 1.0) < kAlphaOneTol) {
    throw UnsupportedParameter(std::string(what) + ": alpha = 1 is not supported");
  }
  if (is_gaussian(p)) {
    throw UnsupportedParameter(std::string(what) +
                               ": alpha = 2 must use the Gaussian reduction");
  }
}

void require_strip(const CtsParams& p, double re_u, const char* what) {
  if (!(re_u >= -p.lambda_minus && re_u <= p.lambda_plus)) {
    throw DomainError(std::string(what) + ": Re(u) = " + std::to_string(re_u) +
                      " outside [-lambda_minus, lambda_plus]");
  }
}

// Totally right-skewed stable with E exp(-s S) = exp(-s^a) for a < 1 and
// exp(+s^a) for 1 < a < 2 (Chambers-Mallows-Stuck with unit Laplace scale).
double unit_skewed_stable(double a, Rng& rng) {
  std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
  std::exponential_distribution<double> expo(1.0);
  const double v = angle(rng);
  double w = expo(rng);
  while (w == 0.0) w = expo(rng);
  const double shift = a < 1.0 ? kPi / 2.0 : kPi / 2.0 - kPi / a;
  const double av = a * (v + shift);
  return std::sin(av) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos(v - av) / w, (1.0 - a) / a);
}

}  // namespace

void validate(const CtsParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
    throw InvalidParameter("cts: alpha must lie in (0, 2], got " + std::to_string(p.alpha));
  }
  if (!(p.lambda_plus > 0.0 && std::isfinite(p.lambda_plus)) ||
      !(p.lambda_minus > 0.0 && std::isfinite(p.lambda_minus))) {
    throw InvalidParameter("cts: tempering rates must be positive and finite");
  }
}

bool is_gaussian(const CtsParams& p) { return p.alpha == 2.0; }

double tempering_norm(const CtsParams& p) {
  return std::pow(p.lambda_plus, p.alpha - 2.0) + std::pow(p.lambda_minus, p.alpha - 2.0);
}

cplx cts_cumulant(const CtsParams& p, cplx u) {
  require_closed_form(p, "cts_cumulant");
  require_strip(p, u.real(), "cts_cumulant");
  const double a = p.alpha;
  const double lp = p.lambda_plus;
  const double lm = p.lambda_minus;
  const double s = tempering_norm(p);
  const cplx jumps =
      cpow(lp - u, a) - std::pow(lp, a) + cpow(lm + u, a) - std::pow(lm, a);
  const double drift = (std::pow(lp, a - 1.0) - std::pow(lm, a - 1.0)) / ((a - 1.0) * s);
  return jumps / (a * (a - 1.0) * s) + drift * u;
}

cplx cts_characteristic_exponent(const CtsParams& p, double u) {
  return cts_cumulant(p, cplx(0.0, u));
}

double cts_cumulant_d1(const CtsParams& p, double u) {
  require_closed_form(p, "cts_cumulant_d1");
  require_strip(p, u, "cts_cumulant_d1");
  const double a = p.alpha;
  const bool at_edge = u == p.lambda_plus || u == -p.lambda_minus;
  if (at_edge && a < 1.0) {
    throw DomainError("cts_cumulant_d1: derivative diverges at the strip endpoint for alpha < 1");
  }
  return cts_cumulant_d1(p, cplx(u, 0.0)).real();
}

double cts_cumulant_d2(const CtsParams& p, double u) {
  require_closed_form(p, "cts_cumulant_d2");
  require_strip(p, u, "cts_cumulant_d2");
  if (u == p.lambda_plus || u == -p.lambda_minus) {
    throw DomainError("cts_cumulant_d2: second derivative diverges at the strip endpoints");
  }
  return cts_cumulant_d2(p, cplx(u, 0.0)).real();
}

cplx cts_cumulant_d1(const CtsParams& p, cplx u) {
  if (is_gaussian(p)) return u;
  const double a = p.alpha;
  const double lp = p.lambda_plus;
  const double lm = p.lambda_minus;
  const cplx num = cpow(lp - u, a - 1.0) - std::pow(lp, a - 1.0) - cpow(lm + u, a - 1.0) +
                   std::pow(lm, a - 1.0);
  return num / ((1.0 - a) * tempering_norm(p));
}

cplx cts_cumulant_d2(const CtsParams& p, cplx u) {
  if (is_gaussian(p)) return 1.0;
  const double a = p.alpha;
  return (cpow(p.lambda_plus - u, a - 2.0) + cpow(p.lambda_minus + u, a - 2.0)) /
         tempering_norm(p);
}

CtsHigherCumulants cts_higher_cumulants(const CtsParams& p) {
  validate(p);
  const double a = p.alpha;
  const double s = tempering_norm(p);
  const double lp = p.lambda_plus;
  const double lm = p.lambda_minus;
  return {(2.0 - a) * (std::pow(lp, a - 3.0) - std::pow(lm, a - 3.0)) / s,
          (3.0 - a) * (2.0 - a) * (std::pow(lp, a - 4.0) + std::pow(lm, a - 4.0)) / s};
}

cplx conditional_exponent(const CtsParams& p, double u) {
  if (is_gaussian(p)) return -0.5 * u * u;
  return cts_characteristic_exponent(p, u);
}

cplx conditional_cumulant(const CtsParams& p, cplx u) {
  if (is_gaussian(p)) {
    validate(p);
    return 0.5 * u * u;
  }
  return cts_cumulant(p, u);
}

// ---------------------------------------------------------------------------
// Sampling

CtsIncrementSampler::CtsIncrementSampler(const CtsParams& p) : params_(p) {
  validate(p);
  gaussian_ = is_gaussian(p);
  if (gaussian_) return;
  if (std::abs(p.alpha - 1.0) < kAlphaOneTol) {
    throw UnsupportedParameter("cts sampler: alpha = 1 is not supported");
  }
  const double a = p.alpha;
  kappa_per_time_ = 1.0 / (a * std::abs(a - 1.0) * tempering_norm(p));
  if (a > 1.0) {
    // Chernoff: P(S < -x) <= exp(-(a-1) (x/a)^(a/(a-1))) for the unit law.
    cutoff_ = a * std::pow(45.0 / (a - 1.0), (a - 1.0) / a);
    // Piece size w = lambda * sigma_piece minimising pieces / acceptance,
    // i.e. w^-a exp(q w - w^a).
    double best_w = 0.1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 400; ++k) {
      const double w = 0.005 * std::pow(10.0, 3.0 * k / 400.0);
      const double cost = -a * std::log(w) + cutoff_ * w - std::pow(w, a);
      if (cost < best_cost) {
        best_cost = cost;
        best_w = w;
      }
    }
    piece_scale_ = std::pow(best_w, a);
  }
}

double CtsIncrementSampler::one_sided(double kappa, double lambda, Rng& rng) const {
  const double a = params_.alpha;
  std::exponential_distribution<double> expo(1.0);
  const double total = kappa * std::pow(lambda, a);
  double pieces = a < 1.0 ? std::ceil(total) : std::ceil(total / piece_scale_);
  pieces = std::max(pieces, 1.0);
  if (pieces > kMaxPieces) {
    throw NumericalError("cts sampler: tempering too strong for rejection sampling "
                         "(use the FFT inverse sampler)");
  }
  const auto n = static_cast<long>(pieces);
  const double sigma = std::pow(kappa / pieces, 1.0 / a);
  const double shift = a < 1.0 ? 0.0 : cutoff_ * sigma;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    for (;;) {
      const double s = sigma * unit_skewed_stable(a, rng);
      const double excess = s + shift;
      if (excess <= 0.0 || expo(rng) >= lambda * excess) {
        sum += s;
        break;
      }
    }
  }
  // Tilted mean is +kappa a lambda^(a-1) for a < 1 and -kappa a lambda^(a-1)
  // for a > 1; subtracting it leaves the compensated (zero-mean) jump part.
  const double mean = kappa * a * std::pow(lambda, a - 1.0);
  return a < 1.0 ? sum - mean : sum + mean;
}

double CtsIncrementSampler::operator()(double t, Rng& rng) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidParameter("cts sampler: time must be finite and nonnegative");
  }
  if (t == 0.0) return 0.0;
  if (gaussian_) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return std::sqrt(t) * normal(rng);
  }
  const double kappa = kappa_per_time_ * t;
  const double up = one_sided(kappa, params_.lambda_plus, rng);
  const double down = one_sided(kappa, params_.lambda_minus, rng);
  return up - down;
}

double cts_process_increment(const CtsParams& p, double t, Rng& rng) {
  return CtsIncrementSampler(p)(t, rng);
}

namespace {

// Tabulated CDF of stdCTS(alpha, l+ s, l- s) obtained by FFT inversion of
// exp(L(u)), then sampled by inverse transform with linear interpolation.
std::vector<double> sample_fft_inverse(const CtsParams& p, double scale_v, std::size_t count,
                                       Rng& rng) {
  const double s = std::sqrt(scale_v);
  const CtsParams scaled{p.alpha, p.lambda_plus * s, p.lambda_minus * s};
  const std::size_t m = 1u << 16;
  const double slowest = std::min(scaled.lambda_plus, scaled.lambda_minus);
  const double half_width = std::clamp(40.0 / slowest, 12.0, 400.0);
  const double dx = 2.0 * half_width / static_cast<double>(m);
  const double du = kPi / half_width;

  std::vector<cplx> input(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double u = (static_cast<double>(j) - static_cast<double>(m / 2)) * du;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    input[j] = sign * std::exp(cts_characteristic_exponent(scaled, u));
  }
  const auto spectrum = detail::forward_dft(input);

  std::vector<double> grid(m);
  std::vector<double> cdf(m);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double density = std::max(0.0, sign * spectrum[k].real() * du / (2.0 * kPi));
    grid[k] = -half_width + static_cast<double>(k) * dx;
    if (k > 0) acc += 0.5 * (prev + density) * dx;
    cdf[k] = acc;
    prev = density;
  }
  if (!(acc > 0.0)) throw NumericalError("cts FFT sampler: degenerate tabulated CDF");
  for (double& c : cdf) c /= acc;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(count);
  for (double& x : out) {
    const double target = unif(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) {
      x = grid.front();
    } else if (it == cdf.end()) {
      x = grid.back();
    } else {
      const auto hi = static_cast<std::size_t>(it - cdf.begin());
      const std::size_t lo = hi - 1;
      const double span = cdf[hi] - cdf[lo];
      const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
      x = grid[lo] + frac * dx;
    }
  }
  return out;
}

}  // namespace

std::vector<double> cts_sample(const CtsParams& p, double scale_v, std::size_t count, Rng& rng,
                               CtsSampler method) {
  validate(p);
  if (!(scale_v > 0.0) || !std::isfinite(scale_v)) {
    throw InvalidParameter("cts_sample: scale_v must be positive and finite");
  }
  if (count == 0) throw InvalidParameter("cts_sample: count must be at least 1");
  if (is_gaussian(p)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(count);
    for (double& x : out) x = normal(rng);
    return out;
  }
  if (method == CtsSampler::FftInverse) {
    require_closed_form(p, "cts_sample");
    return sample_fft_inverse(p, scale_v, count, rng);
  }
  const CtsIncrementSampler increment(p);
  const double root = std::sqrt(scale_v);
  std::vector<double> out(count);
  for (double& x : out) x = increment(scale_v, rng) / root;
  return out;
}

}  // namespace mixedts
