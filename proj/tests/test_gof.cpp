#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ewl/data_io.hpp"
#include "ewl/gof.hpp"

using namespace ewl;

namespace {
const EwlParams kP1{1.0, 1.0, 1.0, 0.5};

// data placed exactly at known quantiles makes every statistic computable by
// hand through u_i = F(y_(i))
std::vector<double> at_quantiles(const EwlParams& p,
                                 const std::vector<double>& us) {
  std::vector<double> y;
  for (double u : us) y.push_back(quantile(p, u));
  return y;
}
}  // namespace

TEST_CASE("one-sample KS statistic by hand") {
  // u = {0.2, 0.5, 0.8}, n = 3:
  //   i=1: max(1/3-0.2, 0.2-0)   = 0.2
  //   i=2: max(2/3-0.5, 0.5-1/3) = 1/6
  //   i=3: max(1-0.8, 0.8-2/3)   = 0.2
  const std::vector<double> y = at_quantiles(kP1, {0.5, 0.2, 0.8});
  const auto [d, p] = ks_statistic(y, kP1, Family::Ewl);
  CHECK(d == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(p == doctest::Approx(kolmogorov_sf(std::sqrt(3.0) * 0.2))
                 .epsilon(1e-12));
}

TEST_CASE("AD and CM statistics by hand") {
  const std::vector<double> y = at_quantiles(kP1, {0.2, 0.5, 0.8});
  const auto [ad, cm] = ad_cm_statistics_raw(y, kP1, Family::Ewl);
  const double n = 3.0;
  // AD = -n - (1/n) sum (2i-1)[log u_i + log(1-u_{n+1-i})]
  const double ad_hand =
      -n - (1.0 / n) * (1.0 * (std::log(0.2) + std::log(0.2)) +
                        3.0 * (std::log(0.5) + std::log(0.5)) +
                        5.0 * (std::log(0.8) + std::log(0.8)));
  CHECK(ad == doctest::Approx(ad_hand).epsilon(1e-12));
  const double cm_hand = (0.2 - 1.0 / 6) * (0.2 - 1.0 / 6) +
                         (0.5 - 3.0 / 6) * (0.5 - 3.0 / 6) +
                         (0.8 - 5.0 / 6) * (0.8 - 5.0 / 6) + 1.0 / 36;
  CHECK(cm == doctest::Approx(cm_hand).epsilon(1e-12));
  const auto [adc, cmc] = ad_cm_statistics(y, kP1, Family::Ewl);
  CHECK(adc == doctest::Approx(ad * (1.0 + 0.75 / 3 + 2.25 / 9)).epsilon(1e-13));
  CHECK(cmc == doctest::Approx(cm * (1.0 + 0.5 / 3)).epsilon(1e-13));
}

TEST_CASE("report is internally consistent") {
  const auto ds = read_dataset(EWL_DATA_DIR "/fatigue_6061T6.txt");
  FitResult fr;
  fr.family = Family::Ewl;
  fr.params = EwlParams{5.1498, 0.009645, 3.0540, 0.1383};
  fr.loglik = loglik(ds.values, fr.params);
  fr.aic = -2.0 * fr.loglik + 8.0;
  const GofReport g = gof_report(ds.values, fr);
  CHECK(g.n == 101);
  CHECK(g.aic == fr.aic);
  const auto [d, p] = ks_statistic(ds.values, fr.params, Family::Ewl);
  CHECK(g.ks == d);
  CHECK(g.ks_pvalue == p);
  CHECK(g.ad == doctest::Approx(g.ad_raw * (1.0 + 0.75 / 101 +
                                            2.25 / (101.0 * 101.0))));
  CHECK(g.cm == doctest::Approx(g.cm_raw * (1.0 + 0.5 / 101)));
}

TEST_CASE("two-sample KS") {
  // identical samples: D = 0
  const std::vector<double> a{1.0, 2.0, 3.0};
  const auto [d0, p0] = two_sample_ks(a, a);
  CHECK(d0 == 0.0);
  CHECK(p0 == 1.0);
  // disjoint samples: D = 1
  const std::vector<double> b{10.0, 11.0, 12.0};
  const auto [d1, p1] = two_sample_ks(a, b);
  CHECK(d1 == 1.0);
  CHECK(p1 < 0.1);
  // hand case: a = {1,3}, b = {2,4}: after 1: |1/2-0|, after 2: |1/2-1/2|,
  // after 3: |1-1/2|, after 4: 0 -> D = 1/2
  const auto [d2, p2] = two_sample_ks({1.0, 3.0}, {2.0, 4.0});
  CHECK(d2 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2 == doctest::Approx(kolmogorov_sf(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS((void)two_sample_ks({}, a), std::domain_error);
}

TEST_CASE("empirical scaled TTT points") {
  // y = {1,2,3}: T_1 = (1 + 2*1)/6 = 1/2, T_2 = (3 + 1*2)/6 = 5/6, T_3 = 1
  const auto pts = empirical_scaled_ttt({2.0, 1.0, 3.0});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].first == 0.0);
  CHECK(pts[0].second == 0.0);
  CHECK(pts[1].first == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(pts[1].second == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pts[2].second == doctest::Approx(5.0 / 6).epsilon(1e-14));
  CHECK(pts[3].first == 1.0);
  CHECK(pts[3].second == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("empirical survival step function") {
  const auto pts = empirical_survival({2.0, 1.0, 2.0, 5.0});
  REQUIRE(pts.size() == 3);  // ties collapse to the last of the run
  CHECK(pts[0].first == 1.0);
  CHECK(pts[0].second == doctest::Approx(0.75));
  CHECK(pts[1].first == 2.0);
  CHECK(pts[1].second == doctest::Approx(0.25));
  CHECK(pts[2].first == 5.0);
  CHECK(pts[2].second == 0.0);
}

TEST_CASE("model table ranks by AIC and survives failures") {
  const auto wb = restrict_params(EwlParams{1.0, 1.0, 2.5, 0.5},
                                  Family::Weibull);
  const std::vector<double> y = sample_inverse(wb, 150, 5150);
  const auto rows =
      model_table(y, {Family::Ge, Family::Weibull, Family::Cel});
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK_FALSE(row.fit_failed);
  CHECK(rows[0].gof.aic <= rows[1].gof.aic);
  CHECK(rows[1].gof.aic <= rows[2].gof.aic);
  // strongly Weibull data should rank Weibull first
  CHECK(rows[0].family == Family::Weibull);
}
