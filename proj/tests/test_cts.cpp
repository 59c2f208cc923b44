#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "mixedts/cts.hpp"
#include "mixedts/error.hpp"
#include "test_util.hpp"

using namespace mixedts;
using cplx = std::complex<double>;

namespace {

const CtsParams kAsym{1.25, 1.2, 1.9};

double fd1(const CtsParams& p, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (cts_cumulant(p, u + h).real() - cts_cumulant(p, u - h).real()) / (2.0 * h);
}

double fd2(const CtsParams& p, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (cts_cumulant_d1(p, u + h) - cts_cumulant_d1(p, u - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("cumulant vanishes at the origin with zero mean and unit variance") {
  for (const CtsParams& p : {kAsym, CtsParams{0.8, 1.0, 1.0}, CtsParams{0.3, 4.0, 0.5}}) {
    CHECK(std::abs(cts_cumulant(p, 0.0)) < 1e-14);
    CHECK(std::abs(cts_cumulant_d1(p, 0.0)) < 1e-12);
    CHECK(cts_cumulant_d2(p, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cumulant matches high-precision evaluation") {
  // mpmath, 40 digits.
  CHECK(testutil::rel_err(cts_cumulant(kAsym, 0.5).real(), 0.13137920659038701849) < 1e-12);
  CHECK(std::abs(cts_cumulant(kAsym, 0.5).imag()) < 1e-15);
  const cplx l = cts_characteristic_exponent({0.8, 1.0, 1.0}, 1.0);
  CHECK(testutil::rel_err(l.real(), -0.42190202517158264141) < 1e-12);
  CHECK(std::abs(l.imag()) < 1e-14);
}

TEST_CASE("symmetric tempering gives an even cumulant") {
  const CtsParams p{1.25, 1.9, 1.9};
  for (double u : {0.1, 0.7, 1.5, 1.9}) {
    CHECK(cts_cumulant(p, u).real() == doctest::Approx(cts_cumulant(p, -u).real()).epsilon(1e-12));
  }
}

TEST_CASE("characteristic exponent is Hermitian and equals Phi_H(iu)") {
  CHECK(std::abs(cts_characteristic_exponent(kAsym, 0.0)) == 0.0);
  const cplx a = cts_characteristic_exponent(kAsym, 0.7);
  const cplx b = cts_characteristic_exponent(kAsym, -0.7);
  CHECK(std::abs(std::conj(a) - b) < 1e-14);
  for (int k = -20; k <= 20; ++k) {
    const double u = 0.37 * k;
    const cplx direct = cts_cumulant(kAsym, cplx(0.0, u));
    CHECK(std::abs(cts_characteristic_exponent(kAsym, u) - direct) <= 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("derivatives agree with finite differences") {
  for (const CtsParams& p : {kAsym, CtsParams{0.8, 1.2, 1.9}}) {
    for (double u : {-1.2, -0.6, 0.0, 0.3, 0.9}) {
      CHECK(std::abs(cts_cumulant_d1(p, u) - fd1(p, u)) < 1e-6 * std::max(1.0, std::abs(fd1(p, u))));
      CHECK(testutil::rel_err(cts_cumulant_d2(p, u), fd2(p, u)) < 1e-6);
    }
  }
  CHECK(testutil::rel_err(cts_cumulant_d1(kAsym, 0.3), fd1(kAsym, 0.3)) < 1e-6);
}

TEST_CASE("complex derivative overloads agree with the real ones") {
  for (double u : {-1.0, 0.2, 1.1}) {
    CHECK(std::abs(cts_cumulant_d1(kAsym, cplx(u, 0.0)).real() - cts_cumulant_d1(kAsym, u)) < 1e-13);
    CHECK(std::abs(cts_cumulant_d2(kAsym, cplx(u, 0.0)).real() - cts_cumulant_d2(kAsym, u)) < 1e-13);
  }
}

TEST_CASE("cumulant is convex on the open strip") {
  for (const CtsParams& p : {kAsym, CtsParams{0.5, 0.7, 3.0}, CtsParams{1.9, 2.0, 2.0}}) {
    for (int k = 1; k < 50; ++k) {
      const double u = -p.lambda_minus + (p.lambda_plus + p.lambda_minus) * k / 50.0;
      CHECK(cts_cumulant_d2(p, u) > 0.0);
    }
  }
}

TEST_CASE("higher cumulants match finite differences of the second derivative") {
  const double h = 1e-4;
  const auto k = cts_higher_cumulants(kAsym);
  const double fd3 = (cts_cumulant_d2(kAsym, h) - cts_cumulant_d2(kAsym, -h)) / (2 * h);
  const double fd4 =
      (cts_cumulant_d2(kAsym, h) - 2 * cts_cumulant_d2(kAsym, 0.0) + cts_cumulant_d2(kAsym, -h)) / (h * h);
  CHECK(k.k3 == doctest::Approx(fd3).epsilon(1e-6));
  CHECK(k.k4 == doctest::Approx(fd4).epsilon(1e-4));
  const auto g = cts_higher_cumulants({2.0, 1.0, 3.0});
  CHECK(g.k3 == 0.0);
  CHECK(g.k4 == 0.0);
}

TEST_CASE("parameter and domain errors") {
  CHECK_THROWS_AS(validate(CtsParams{0.0, 1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(CtsParams{2.1, 1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(CtsParams{1.5, -1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(CtsParams{1.5, 1.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(cts_cumulant({1.0, 1.0, 1.0}, 0.1), UnsupportedParameter);
  CHECK_THROWS_AS(cts_cumulant({2.0, 1.0, 1.0}, 0.1), UnsupportedParameter);
  CHECK_THROWS_AS(cts_characteristic_exponent({1.0, 1.0, 1.0}, 0.1), UnsupportedParameter);
  CHECK_THROWS_AS(cts_cumulant(kAsym, 1.3), DomainError);
  CHECK_THROWS_AS(cts_cumulant(kAsym, -2.0), DomainError);
  CHECK_THROWS_AS(cts_cumulant_d2(kAsym, 1.2), DomainError);
  CHECK_NOTHROW(cts_cumulant(kAsym, 1.2));
  CHECK_NOTHROW(cts_cumulant(kAsym, -1.9));
}

TEST_CASE("Gaussian reduction at alpha = 2") {
  const CtsParams g{2.0, 0.5, 7.0};
  CHECK(conditional_exponent(g, 1.3) == cplx(-0.5 * 1.3 * 1.3, 0.0));
  CHECK(std::abs(conditional_cumulant(g, cplx(0.4, 0.0)) - cplx(0.08, 0.0)) < 1e-16);
  Rng rng = make_stream(7, 0);
  const auto x = cts_sample(g, 3.0, 200000, rng);
  const auto s = testutil::sample_stats(x);
  CHECK(std::abs(s.mean) < 4.0 / std::sqrt(200000.0));
  CHECK(testutil::z_score(1.0, s.m2, s.se_m2) < 5.0);
}

TEST_CASE("sampler reproduces stdCTS moments") {
  const std::size_t n = 1000000;
  for (CtsSampler method : {CtsSampler::Rejection, CtsSampler::FftInverse}) {
    CAPTURE(static_cast<int>(method));
    const CtsParams p{0.8, 1.2, 1.9};
    Rng rng = make_stream(11, static_cast<std::uint64_t>(method));
    const auto x = cts_sample(p, 1.0, n, rng, method);
    const auto s = testutil::sample_stats(x);
    const auto k = cts_higher_cumulants(p);
    CHECK(testutil::z_score(0.0, s.mean, s.se_mean) < 5.0);
    CHECK(testutil::z_score(1.0, s.m2, s.se_m2) < 5.0);
    CHECK(testutil::z_score(k.k3, s.m3, s.se_m3) < 5.0);
    CHECK(testutil::z_score(k.k4 + 3.0, s.m4, s.se_m4) < 5.0);
  }
}

TEST_CASE("sampler: symmetric tempering has no skew") {
  Rng rng = make_stream(12, 0);
  const auto x = cts_sample({1.25, 1.9, 1.9}, 1.0, 200000, rng);
  const auto s = testutil::sample_stats(x);
  CHECK(testutil::z_score(0.0, s.m3, s.se_m3) < 5.0);
}

TEST_CASE("sampler: empirical CF at rescaled tempering") {
  const std::size_t n = 100000;
  for (double v : {0.3, 1.0, 4.0}) {
    for (const CtsParams& p : {kAsym, CtsParams{0.6, 0.8, 2.5}}) {
      Rng rng = make_stream(13, static_cast<std::uint64_t>(v * 10));
      const auto x = cts_sample(p, v, n, rng);
      const CtsParams scaled{p.alpha, p.lambda_plus * std::sqrt(v), p.lambda_minus * std::sqrt(v)};
      for (double u : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        const cplx model = std::exp(cts_characteristic_exponent(scaled, u));
        CHECK(std::abs(testutil::empirical_cf(x, u) - model) < 5.0 / std::sqrt(double(n)));
      }
    }
  }
}

TEST_CASE("process increments at small and large times") {
  for (const CtsParams& p : {kAsym, CtsParams{0.5, 1.0, 1.0}, CtsParams{1.8, 3.0, 0.7}}) {
    const CtsIncrementSampler draw(p);
    for (double t : {0.02, 1.0, 8.0}) {
      // Cost per draw grows linearly in t.
      const std::size_t n = t > 5.0 ? 20000 : 100000;
      Rng rng = make_stream(14, static_cast<std::uint64_t>(t * 100));
      std::vector<double> x(n);
      for (double& v : x) v = draw(t, rng);
      for (double u : {-1.5, 0.4, 1.0}) {
        const double uu = u / std::sqrt(t);
        const cplx model = std::exp(t * cts_characteristic_exponent(p, uu));
        CHECK(std::abs(testutil::empirical_cf(x, uu) - model) < 5.0 / std::sqrt(double(n)));
      }
    }
    Rng rng = make_stream(1, 1);
    CHECK(draw(0.0, rng) == 0.0);
  }
}

TEST_CASE("sampler is deterministic for a fixed seed") {
  Rng a = make_stream(99, 3);
  Rng b = make_stream(99, 3);
  CHECK(cts_sample(kAsym, 1.7, 1000, a) == cts_sample(kAsym, 1.7, 1000, b));
  Rng c = make_stream(99, 4);
  Rng d = make_stream(99, 3);
  CHECK(cts_sample(kAsym, 1.7, 10, c) != cts_sample(kAsym, 1.7, 10, d));
}
