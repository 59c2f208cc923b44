#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mixedts/error.hpp"
#include "mixedts/tails.hpp"
#include "mixedts/univariate.hpp"
#include "test_util.hpp"

using namespace mixedts;
using cplx = std::complex<double>;
using testutil::reference_params;

namespace {

double phi_y(const UnivariateParams& p, double u) { return cumulant(p, cplx(u, 0.0)).real(); }

// Random valid parameter set with moderate tails.
UnivariateParams random_params(std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  UnivariateParams p;
  p.mu = -1.0 + 2.0 * U(g);
  p.beta = -0.6 + 1.2 * U(g);
  double a = 0.2 + 1.7 * U(g);
  if (std::abs(a - 1.0) < 0.05) a += 0.1;
  p.cts = {a, 0.5 + 2.5 * U(g), 0.5 + 2.5 * U(g)};
  p.a = 0.3 + 3.0 * U(g);
  p.b = 0.3 + 3.0 * U(g);
  return p;
}

// Sign-change scan of G on a dense grid between 0 and an endpoint.
double scan_root(const UnivariateParams& p, double end) {
  const int n = 200000;
  double prev = strip_function(p, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double u = end * k / n;
    const double g = strip_function(p, u);
    if ((prev < 0.0) != (g < 0.0)) return end * (k - 0.5) / n;
    prev = g;
  }
  return end;
}

}  // namespace

TEST_CASE("cumulant at the origin and the mgf oracle") {
  UnivariateParams p = reference_params();
  CHECK(std::abs(cumulant(p, 0.0)) == 0.0);
  // [b / (b - Phi_H(0.4))]^a evaluated with mpmath.
  CHECK(testutil::rel_err(std::exp(phi_y(p, 0.4)), 1.0905149961504679077) < 1e-12);
}

TEST_CASE("cumulant derivatives reproduce mean and variance") {
  std::mt19937_64 g(3);
  for (int i = 0; i < 5; ++i) {
    const UnivariateParams p = random_params(g);
    const UnivariateMoments m = moments(p);
    const double h = 1e-4;
    const double d1 = (phi_y(p, h) - phi_y(p, -h)) / (2 * h);
    const double d2 = (phi_y(p, h) - 2 * phi_y(p, 0.0) + phi_y(p, -h)) / (h * h);
    CHECK(testutil::rel_err(d1, m.mean) < 1e-5 + 1e-8 / std::abs(m.mean));
    CHECK(testutil::rel_err(d2, m.variance) < 1e-5);
    CHECK(m.mean == doctest::Approx(p.mu + p.beta * p.a / p.b).epsilon(1e-14));
  }
}

TEST_CASE("cumulant beyond the moment boundary is a domain error") {
  const UnivariateParams p = reference_params();
  CHECK_THROWS_AS(cumulant(p, cplx(-1.6, 0.0)), DomainError);
  CHECK_THROWS_AS(cumulant(p, cplx(1.3, 0.0)), DomainError);
  CHECK_NOTHROW(cumulant(p, cplx(-1.4, 0.0)));
}

TEST_CASE("characteristic function basics") {
  UnivariateParams p{0.1, -0.2, {0.8, 1.5, 0.9}, 2.0, 1.5};
  CHECK(characteristic_function(p, 0.0) == cplx(1.0, 0.0));
  CHECK(std::abs(std::conj(characteristic_function(p, 1.3)) - characteristic_function(p, -1.3)) < 1e-15);
  // mpmath evaluation of i t mu + a log(b / (b - (i t beta + L(t)))).
  const cplx ref(-0.7411528346130711359, -0.0031789735363696220119);
  CHECK(std::abs(characteristic_exponent(p, 1.3) - ref) < 1e-13);
  std::mt19937_64 g(5);
  for (int i = 0; i < 5; ++i) {
    const UnivariateParams q = random_params(g);
    for (int k = -40; k <= 40; ++k) CHECK(std::abs(characteristic_function(q, 0.5 * k)) <= 1.0 + 1e-14);
  }
}

TEST_CASE("empirical CF of simulated draws") {
  const std::size_t n = 100000;
  const UnivariateParams p{0.3, 0.4, {1.25, 1.2, 1.9}, 1.5, 2.0};
  Rng rng = make_stream(21, 0);
  const auto y = sample(p, n, rng);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(testutil::empirical_cf(y, t) - characteristic_function(p, t)) < 5.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("moments: symmetric case and skew sign") {
  const UnivariateMoments s = moments({0.0, 0.0, {1.25, 1.9, 1.9}, 1.0, 1.0});
  CHECK(s.mean == 0.0);
  CHECK(s.variance == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(s.central_m3) < 1e-15);
  CHECK(moments(reference_params()).central_m3 > 0.0);
}

TEST_CASE("moments match simulation") {
  const std::size_t n = 300000;
  for (const UnivariateParams& p :
       {UnivariateParams{0.2, -0.3, {0.7, 1.4, 0.9}, 1.8, 1.2},
        UnivariateParams{-0.5, 0.5, {1.6, 2.0, 1.1}, 0.9, 1.6}}) {
    Rng rng = make_stream(22, static_cast<std::uint64_t>(p.cts.alpha * 10));
    const auto y = sample(p, n, rng);
    const auto s = testutil::sample_stats(y);
    const UnivariateMoments m = moments(p);
    CHECK(testutil::z_score(m.mean, s.mean, s.se_mean) < 5.0);
    CHECK(testutil::z_score(m.variance, s.m2, s.se_m2) < 5.0);
    CHECK(testutil::z_score(m.central_m3, s.m3, s.se_m3) < 5.0);
    CHECK(testutil::z_score(m.central_m4, s.m4, s.se_m4) < 5.0);
  }
}

TEST_CASE("alpha = 2 is a variance gamma law") {
  const std::size_t n = 300000;
  const UnivariateParams p{0.1, 0.3, {2.0, 1.0, 1.0}, 2.0, 1.5};
  Rng rng = make_stream(23, 0);
  const auto y = sample(p, n, rng);
  const auto s = testutil::sample_stats(y);
  // Variance gamma: mean mu + beta a/b, variance a/b + beta^2 a/b^2,
  // m3 = 2 beta^3 a/b^3 + 3 beta a/b^2, m4 from the normal-mixture identity.
  const double a = p.a, b = p.b, be = p.beta;
  const double ev = a / b, vv = a / (b * b), ev2 = a * (a + 1) / (b * b);
  const double m4 = be * be * be * be * (3 * a * a + 6 * a) / std::pow(b, 4) +
                    6 * be * be * a * (a + 2) / std::pow(b, 3) + 3 * ev2;
  const UnivariateMoments m = moments(p);
  CHECK(m.mean == doctest::Approx(p.mu + be * ev));
  CHECK(m.variance == doctest::Approx(ev + be * be * vv));
  CHECK(m.central_m3 == doctest::Approx(2 * be * be * be * a / (b * b * b) + 3 * be * vv));
  CHECK(m.central_m4 == doctest::Approx(m4));
  CHECK(testutil::z_score(m.mean, s.mean, s.se_mean) < 5.0);
  CHECK(testutil::z_score(m.variance, s.m2, s.se_m2) < 5.0);
  CHECK(testutil::z_score(m.central_m3, s.m3, s.se_m3) < 5.0);
  CHECK(testutil::z_score(m.central_m4, s.m4, s.se_m4) < 5.0);
}

TEST_CASE("sample mean with pure location") {
  const std::size_t n = 100000;
  const UnivariateParams p{5.0, 0.0, {0.9, 1.0, 1.3}, 1.0, 1.0};
  Rng rng = make_stream(24, 0);
  const auto s = testutil::sample_stats(sample(p, n, rng));
  CHECK(testutil::z_score(5.0, s.mean, s.se_mean) < 5.0);
}

TEST_CASE("fundamental strip: reference parameters") {
  const StripResult s = fundamental_strip(reference_params());
  CHECK(s.case_tag == StripCase::Case3);
  CHECK(s.lower_is_solution);
  CHECK_FALSE(s.upper_is_solution);
  // mpmath root of Phi_H(u) = 1.
  CHECK(std::abs(s.lower - -1.410522128625225783) < 1e-10);
  CHECK(s.upper == 1.2);
  const TailExponents t = tail_exponents(reference_params());
  CHECK(std::abs(t.q_star - 1.4105) < 1e-3);
  CHECK(t.r_star == 1.2);
}

TEST_CASE("fundamental strip: large b is Case1") {
  UnivariateParams p = reference_params();
  p.b = 1e6;
  const StripResult s = fundamental_strip(p);
  CHECK(s.case_tag == StripCase::Case1);
  CHECK(s.lower == -1.9);
  CHECK(s.upper == 1.2);
  const TailExponents t = tail_exponents(p);
  CHECK(t.q_star == 1.9);
  CHECK(t.r_star == 1.2);
}

TEST_CASE("fundamental strip: symmetric roots against a grid scan") {
  const UnivariateParams p{0.0, 0.0, {1.25, 1.5, 1.5}, 1.0, 0.5};
  REQUIRE(p.b < cts_cumulant(p.cts, 1.5).real());
  const StripResult s = fundamental_strip(p);
  CHECK(s.case_tag == StripCase::Case4);
  CHECK(s.lower == doctest::Approx(-s.upper).epsilon(1e-10));
  CHECK(std::abs(s.upper - scan_root(p, 1.5)) < 1e-5);
  CHECK(std::abs(s.lower - scan_root(p, -1.5)) < 1e-5);
}

TEST_CASE("fundamental strip: Case2 with a large positive loading") {
  const UnivariateParams p{0.0, 2.0, {0.8, 1.0, 1.0}, 1.0, 1.0};
  const StripResult s = fundamental_strip(p);
  CHECK(s.case_tag == StripCase::Case2);
  CHECK(s.lower == -1.0);
  CHECK(std::abs(strip_function(p, s.upper)) < 1e-9);
}

TEST_CASE("fundamental strip invariants over random parameters") {
  std::mt19937_64 g(8);
  int counts[4] = {};
  for (int i = 0; i < 400; ++i) {
    UnivariateParams p = random_params(g);
    p.beta *= 4.0;
    const StripResult s = fundamental_strip(p);
    CAPTURE(i);
    CHECK(s.lower < s.upper);
    CHECK(s.lower >= -p.cts.lambda_minus);
    CHECK(s.upper <= p.cts.lambda_plus);
    const double gl = strip_function(p, s.lower);
    const double gu = strip_function(p, s.upper);
    if (s.lower_is_solution) {
      CHECK(std::abs(gl) < 1e-8);
    } else {
      CHECK(gl < 0.0);
    }
    if (s.upper_is_solution) {
      CHECK(std::abs(gu) < 1e-8);
    } else {
      CHECK(gu < 0.0);
    }
    const int expected = (s.lower_is_solution ? 2 : 0) + (s.upper_is_solution ? 1 : 0);
    const StripCase table[4] = {StripCase::Case1, StripCase::Case2, StripCase::Case3, StripCase::Case4};
    CHECK(s.case_tag == table[expected]);
    ++counts[expected];
  }
  for (int c : counts) CHECK(c > 0);
}

TEST_CASE("fundamental strip rejects alpha = 2") {
  CHECK_THROWS_AS(fundamental_strip({0.0, 0.0, {2.0, 1.0, 1.0}, 1.0, 1.0}), UnsupportedParameter);
}

TEST_CASE("right-tail regression on simulated draws") {
  // Mirror image of the reference set: the right exponent is an interior root.
  const UnivariateParams p{0.0, 0.0, {1.25, 1.9, 1.2}, 1.0, 1.0};
  REQUIRE(fundamental_strip(p).case_tag == StripCase::Case2);
  Rng rng = make_stream(25, 0);
  const auto y = sample(p, 1000000, rng);
  const EmpiricalTailFit fit = fit_tail_exponents(y, 0.005);
  CHECK(std::abs(fit.r_star_hat - tail_exponents(p).r_star) < 0.15 * tail_exponents(p).r_star);
}

TEST_CASE("Levy increment parameters") {
  const UnivariateParams p{0.2, 0.3, {1.25, 1.2, 1.9}, 1.0, 1.0};
  const UnivariateParams one = levy_increment_params(p, 1.0);
  CHECK(one.mu == p.mu);
  CHECK(one.a == p.a);
  CHECK(one.beta == p.beta);
  CHECK(one.b == p.b);
  const UnivariateParams back = levy_increment_params(levy_increment_params(p, 2.0), 0.5);
  CHECK(back.a == doctest::Approx(p.a).epsilon(1e-15));
  CHECK(back.mu == doctest::Approx(p.mu).epsilon(1e-15));
  // mpmath: mu t u + a t log(b / (b - (beta u + Phi_H(u)))) at u = 0.3, t = 2.5.
  CHECK(testutil::rel_err(phi_y(levy_increment_params(p, 2.5), 0.3), 0.51593649542180069859) < 1e-12);
  CHECK_THROWS_AS(levy_increment_params(p, 0.0), InvalidParameter);
}

TEST_CASE("Levy increments add up") {
  const std::size_t n = 100000;
  const UnivariateParams p{0.1, -0.2, {0.8, 1.3, 1.0}, 0.7, 1.2};
  Rng rng = make_stream(26, 0);
  const auto a = sample(levy_increment_params(p, 0.4), n, rng);
  const auto b = sample(levy_increment_params(p, 1.1), n, rng);
  std::vector<double> sum(n);
  for (std::size_t i = 0; i < n; ++i) sum[i] = a[i] + b[i];
  const UnivariateParams whole = levy_increment_params(p, 1.5);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(testutil::empirical_cf(sum, t) - characteristic_function(whole, t)) < 5.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(UnivariateParams{0.0, 0.0, {1.5, 1.0, 1.0}, 0.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(UnivariateParams{0.0, 0.0, {1.5, 1.0, 1.0}, 1.0, -1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(UnivariateParams{NAN, 0.0, {1.5, 1.0, 1.0}, 1.0, 1.0}), InvalidParameter);
}
