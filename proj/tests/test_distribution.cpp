#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ewl/distribution.hpp"
#include "ewl/gof.hpp"

using namespace ewl;

namespace {
const EwlParams kP1{1.0, 1.0, 1.0, 0.5};
const EwlParams kP2{2.0, 0.5, 1.5, 0.3};
const double kLn2 = 0.6931471805599453;
}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(kP1));
  CHECK_THROWS_AS(validate(EwlParams{0.0, 1, 1, 0.5}), std::domain_error);
  CHECK_THROWS_AS(validate(EwlParams{1, -2, 1, 0.5}), std::domain_error);
  CHECK_THROWS_AS(validate(EwlParams{1, 1, 0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(validate(EwlParams{1, 1, 1, 0.0}), std::domain_error);
  CHECK_THROWS_AS(validate(EwlParams{1, 1, 1, 1.0}), std::domain_error);
  CHECK_THROWS_AS(validate(EwlParams{1, 1, 1, 1.5}), std::domain_error);
  const double nan = std::nan("");
  CHECK_THROWS_AS(validate(EwlParams{nan, 1, 1, 0.5}), std::domain_error);
}

TEST_CASE("density, cdf, survival, hazards at frozen points") {
  // alpha=1, beta=1, gamma=1, theta=0.5
  CHECK(pdf(kP1, kLn2) == doctest::Approx(0.4808983469629878).epsilon(1e-14));
  CHECK(cdf(kP1, kLn2) == doctest::Approx(0.41503749927884382).epsilon(1e-14));
  CHECK(survival(kP1, kLn2) ==
        doctest::Approx(0.58496250072115618).epsilon(1e-14));
  CHECK(hazard(kP1, kLn2) ==
        doctest::Approx(0.82210115412547723).epsilon(1e-14));
  CHECK(reversed_hazard(kP1, kLn2) ==
        doctest::Approx(1.1586864989274023).epsilon(1e-14));
  CHECK(pdf(kP1, 0.2) == doctest::Approx(0.64945225965409589).epsilon(1e-14));
  CHECK(cdf(kP1, 0.2) == doctest::Approx(0.13706801938024602).epsilon(1e-14));
  CHECK(hazard(kP1, 0.2) ==
        doctest::Approx(0.7526111840097317).epsilon(1e-14));
  CHECK(reversed_hazard(kP1, 0.2) ==
        doctest::Approx(4.7381749775811944).epsilon(1e-14));
  CHECK(pdf(kP1, 3.0) == doctest::Approx(0.0684210720431045).epsilon(1e-14));
  CHECK(cdf(kP1, 3.0) == doctest::Approx(0.92990326883463376).epsilon(1e-14));
  CHECK(hazard(kP1, 3.0) ==
        doctest::Approx(0.97609504616829182).epsilon(1e-14));
  CHECK(reversed_hazard(kP1, 3.0) ==
        doctest::Approx(0.073578698275628852).epsilon(1e-14));

  // alpha=2, beta=0.5, gamma=1.5, theta=0.3
  CHECK(pdf(kP2, 1.7) == doctest::Approx(0.31665642264621526).epsilon(1e-14));
  CHECK(cdf(kP2, 1.7) == doctest::Approx(0.25992927121685996).epsilon(1e-14));
  CHECK(survival(kP2, 1.7) ==
        doctest::Approx(0.74007072878314004).epsilon(1e-14));
  CHECK(hazard(kP2, 1.7) ==
        doctest::Approx(0.42787318877869554).epsilon(1e-14));
  CHECK(reversed_hazard(kP2, 1.7) ==
        doctest::Approx(1.2182407204997994).epsilon(1e-14));
  CHECK(pdf(kP2, 0.4) ==
        doctest::Approx(0.044241796284646621).epsilon(1e-14));
  CHECK(cdf(kP2, 0.4) ==
        doctest::Approx(0.0061639767174407221).epsilon(1e-14));
  CHECK(pdf(kP2, 6.0) ==
        doctest::Approx(0.017111163032742369).epsilon(1e-14));
  CHECK(cdf(kP2, 6.0) ==
        doctest::Approx(0.98675993150072503).epsilon(1e-14));
  CHECK(hazard(kP2, 6.0) ==
        doctest::Approx(1.2923772285377057).epsilon(1e-13));
}

TEST_CASE("support convention and domain errors") {
  CHECK(cdf(kP1, 0.0) == 0.0);
  CHECK(cdf(kP1, -3.0) == 0.0);
  CHECK(survival(kP1, -3.0) == 1.0);
  CHECK_THROWS_AS((void)pdf(kP1, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)pdf(kP1, -1.0), std::domain_error);
  CHECK_THROWS_AS((void)log_pdf(kP1, -1.0), std::domain_error);
  CHECK(std::exp(log_pdf(kP1, 0.7)) ==
        doctest::Approx(pdf(kP1, 0.7)).epsilon(1e-15));
}

TEST_CASE("cdf + survival = 1 and monotonicity") {
  for (double y : {0.05, 0.3, 1.0, 2.7, 8.0}) {
    CHECK(cdf(kP2, y) + survival(kP2, y) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  double prev = 0.0;
  for (double y = 0.1; y < 10.0; y += 0.3) {
    const double c = cdf(kP2, y);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("quantile: frozen values and round trips") {
  CHECK(quantile(kP1, 0.3) ==
        doctest::Approx(0.47079627496641605).epsilon(1e-13));
  CHECK(quantile(kP1, 0.9) ==
        doctest::Approx(2.6342404738064099).epsilon(1e-13));
  CHECK(quantile(kP1, 0.5) ==
        doctest::Approx(0.88137358701954303).epsilon(1e-13));
  CHECK(quantile(kP2, 0.3) ==
        doctest::Approx(1.8245059227776606).epsilon(1e-13));
  CHECK(quantile(kP2, 0.9) ==
        doctest::Approx(4.2882354393356484).epsilon(1e-13));
  CHECK(quantile(kP2, 0.5) ==
        doctest::Approx(2.4296292729140406).epsilon(1e-13));
  for (const EwlParams& p : {kP1, kP2, EwlParams{0.4, 2.0, 0.7, 0.9}}) {
    for (double xi : {1e-9, 1e-3, 0.2, 0.5, 0.8, 0.999, 1.0 - 1e-12}) {
      CHECK(cdf(p, quantile(p, xi)) == doctest::Approx(xi).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS((void)quantile(kP1, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)quantile(kP1, 1.0), std::domain_error);
}

TEST_CASE("hazard identity and far-tail asymptote") {
  for (double y : {0.4, 1.3, 3.2}) {
    CHECK(hazard(kP2, y) ==
          doctest::Approx(pdf(kP2, y) / survival(kP2, y)).epsilon(1e-13));
    CHECK(reversed_hazard(kP2, y) ==
          doctest::Approx(pdf(kP2, y) / cdf(kP2, y)).epsilon(1e-13));
  }
  // survival underflows far out; the asymptote gamma beta^gamma y^{gamma-1}
  // takes over smoothly
  const EwlParams p{3.0, 1.0, 2.0, 0.5};
  const double y = 1e9;
  CHECK(hazard(p, y) == doctest::Approx(2.0 * y).epsilon(1e-10));
}

TEST_CASE("hazard limit classification") {
  // gamma < 1, alpha <= 1: infinite at 0, zero at infinity
  HazardLimit h = hazard_limits(EwlParams{0.5, 1.0, 0.3, 0.3});
  CHECK(h.at_zero_kind == LimitKind::Infinite);
  CHECK(h.at_infinity_kind == LimitKind::Zero);
  // gamma < 1, alpha > 1: zero at both ends
  h = hazard_limits(EwlParams{6.0, 1.0, 0.3, 0.3});
  CHECK(h.at_zero_kind == LimitKind::Zero);
  CHECK(h.at_infinity_kind == LimitKind::Zero);
  // gamma = 1, alpha < 1: infinite at 0, beta at infinity
  h = hazard_limits(EwlParams{0.2, 1.0, 1.0, 0.5});
  CHECK(h.at_zero_kind == LimitKind::Infinite);
  CHECK(h.at_infinity_kind == LimitKind::Finite);
  CHECK(h.at_infinity == doctest::Approx(1.0).epsilon(1e-14));
  // gamma = 1, alpha = 1: -theta beta / log(1-theta) at 0, beta at infinity
  h = hazard_limits(EwlParams{1.0, 2.0, 1.0, 0.5});
  CHECK(h.at_zero_kind == LimitKind::Finite);
  CHECK(h.at_zero == doctest::Approx(1.4426950408889634).epsilon(1e-14));
  CHECK(h.at_infinity_kind == LimitKind::Finite);
  CHECK(h.at_infinity == doctest::Approx(2.0).epsilon(1e-14));
  // gamma = 1, alpha > 1: zero at 0
  h = hazard_limits(EwlParams{3.0, 1.0, 1.0, 0.5});
  CHECK(h.at_zero_kind == LimitKind::Zero);
  // gamma > 1: zero at 0, infinite at infinity
  h = hazard_limits(EwlParams{3.0, 1.0, 2.0, 0.5});
  CHECK(h.at_zero_kind == LimitKind::Zero);
  CHECK(h.at_infinity_kind == LimitKind::Infinite);
}

TEST_CASE("hazard shape diagnostic") {
  CHECK(hazard_shape(EwlParams{1.0, 1.0, 2.0, 0.5}) ==
        HazardShape::Increasing);
  CHECK(hazard_shape(EwlParams{1.0, 1.0, 0.7, 0.5}) ==
        HazardShape::Decreasing);
  // gamma < 1 with alpha gamma > 1: zero at both ends, a single interior peak
  CHECK(hazard_shape(EwlParams{3.0, 1.0, 0.5, 0.3}) == HazardShape::Unimodal);
}

TEST_CASE("logarithmic sampler matches its pmf") {
  std::mt19937_64 eng(777);
  const int n = 200000;
  int ones = 0, threes = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = sample_logarithmic(0.5, eng);
    CHECK(k >= 1);
    ones += (k == 1);
    threes += (k == 3);
    sum += k;
  }
  // pmf(1) = 0.72135, pmf(3) = 0.060112, mean = 1.44270 at theta = 0.5
  CHECK((double)ones / n == doctest::Approx(0.7213475204444817).epsilon(0.01));
  CHECK((double)threes / n ==
        doctest::Approx(0.060112293370373475).epsilon(0.06));
  CHECK(sum / n == doctest::Approx(1.4426950408889634).epsilon(0.01));
  double sum9 = 0.0;
  for (int i = 0; i < n; ++i) sum9 += sample_logarithmic(0.9, eng);
  CHECK(sum9 / n == doctest::Approx(3.9086503371292664).epsilon(0.015));
}

TEST_CASE("samplers are deterministic given a seed") {
  const std::vector<double> a = sample_inverse(kP2, 50, 42);
  const std::vector<double> b = sample_inverse(kP2, 50, 42);
  const std::vector<double> c = sample_inverse(kP2, 50, 43);
  REQUIRE(a.size() == 50);
  CHECK(a == b);
  CHECK(a != c);
  const std::vector<double> d = sample_compound(kP2, 50, 42);
  const std::vector<double> e = sample_compound(kP2, 50, 42);
  CHECK(d == e);
  for (double v : d) CHECK(v > 0.0);
}

TEST_CASE("inverse-transform draws land on the law") {
  const int n = 100000;
  const std::vector<double> x = sample_inverse(kP2, n, 2024);
  // probability integral transform should be uniform
  int below_q30 = 0, below_q90 = 0;
  for (double v : x) {
    below_q30 += (v <= 1.8245059227776606);
    below_q90 += (v <= 4.2882354393356484);
  }
  CHECK((double)below_q30 / n == doctest::Approx(0.3).epsilon(0.02));
  CHECK((double)below_q90 / n == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("compound construction agrees with inversion in law") {
  const int n = 20000;
  const std::vector<double> a = sample_inverse(kP2, n, 7);
  const std::vector<double> b = sample_compound(kP2, n, 8);
  const auto [d, p] = two_sample_ks(a, b);
  CHECK(d < 0.02);
  CHECK(p > 1e-3);
}
