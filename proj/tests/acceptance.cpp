// End-to-end release gate. Each invocation runs one numbered check and
// prints exactly one line, "criterion N: PASS (...)" or "criterion N: FAIL
// (...)", exiting 0 or 1. Tolerances are fixed in this file on purpose:
// loosening one is a code change a reviewer has to see.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ewl/data_io.hpp"
#include "ewl/distribution.hpp"
#include "ewl/families.hpp"
#include "ewl/gof.hpp"
#include "ewl/inference.hpp"
#include "ewl/moments.hpp"
#include "ewl/special.hpp"

namespace {

using ewl::EwlParams;
using ewl::Family;

std::vector<double> load(const std::string& name) {
  return ewl::read_dataset(std::string(EWL_DATA_DIR) + "/" + name).values;
}

double rel(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  if (scale == 0.0) return 0.0;
  return std::fabs(a - b) / scale;
}

// Relative gap with the denominator floored at 1, for quantities that can
// legitimately pass through zero (entropies, scores).
double rel1(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1.0});
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof buf, format, ap);
  va_end(ap);
  return buf;
}

// --- criterion 1: full fit of the fatigue data --------------------------

bool crit1(std::string& detail) {
  const std::vector<double> data = load("fatigue_6061T6.txt");
  Timer timer;
  const ewl::FitResult r = ewl::fit(data, Family::Ewl);
  const double elapsed = timer.seconds();
  const double m2ll = -2.0 * r.loglik;

  const bool band_ll = std::fabs(m2ll - 913.204) <= 0.5;
  const bool band_aic = std::fabs(r.aic - 921.204) <= 0.5;

  const double ref[4] = {5.1498, 0.0096, 3.0535, 0.1383};
  const double got[4] = {r.params.alpha, r.params.beta, r.params.gamma_,
                         r.params.theta};
  bool within10 = true;
  for (int i = 0; i < 4; ++i) {
    within10 = within10 && std::fabs(got[i] - ref[i]) <= 0.10 * ref[i];
  }
  const bool better = m2ll < 913.204;
  const bool fast = elapsed < 30.0;

  detail = fmt(
      "-2loglik=%.4f aic=%.4f params=(%.4f, %.6f, %.4f, %.4f) %s "
      "elapsed=%.1fs",
      m2ll, r.aic, got[0], got[1], got[2], got[3],
      within10 ? "within-10%" : (better ? "better-loglik" : "params-off"),
      elapsed);
  return band_ll && band_aic && (within10 || better) && fast;
}

// --- criterion 2: fiber data across the family ladder -------------------

bool crit2(std::string& detail) {
  const std::vector<double> data = load("fiber_strength_10mm.txt");
  Timer timer;
  const double ewl_m2 = -2.0 * ewl::fit(data, Family::Ewl).loglik;
  const double ew_m2 = -2.0 * ewl::fit(data, Family::Ew).loglik;
  const double wb_m2 = -2.0 * ewl::fit(data, Family::Weibull).loglik;
  const double elapsed = timer.seconds();

  const bool ok = std::fabs(ewl_m2 - 111.738) <= 0.5 &&
                  std::fabs(ew_m2 - 112.621) <= 0.5 &&
                  std::fabs(wb_m2 - 123.914) <= 0.5 && elapsed < 30.0;
  detail = fmt("-2loglik ewl=%.4f ew=%.4f weibull=%.4f elapsed=%.1fs", ewl_m2,
               ew_m2, wb_m2, elapsed);
  return ok;
}

// --- criterion 3: fit statistics at the published fatigue estimate ------

bool crit3(std::string& detail) {
  const std::vector<double> data = load("fatigue_6061T6.txt");
  ewl::FitResult r;
  r.family = Family::Ewl;
  r.params = {5.1498, 0.009645, 3.0540, 0.1383};
  r.n_obs = (int)data.size();
  r.loglik = ewl::loglik(data, r.params);
  r.aic = -2.0 * r.loglik + 8.0;
  const ewl::GofReport g = ewl::gof_report(data, r);
  // the reference CM adds the constant 1/12 rather than 1/(12n)
  const double cm_variant = g.cm_raw - 1.0 / (12.0 * g.n) + 1.0 / 12.0;

  const bool ok = std::fabs(g.ks - 0.0707) <= 0.003 &&
                  std::fabs(g.ks_pvalue - 0.6942) <= 0.02 &&
                  std::fabs(g.ad_raw - 0.378) <= 0.02 &&
                  std::fabs(cm_variant - 0.141) <= 0.01;
  detail = fmt(
      "ks=%.4f p=%.4f ad_raw=%.4f cm+1/12=%.4f (ad matches the uncorrected "
      "statistic, cm the +1/12-constant variant)",
      g.ks, g.ks_pvalue, g.ad_raw, cm_variant);
  return ok;
}

// --- criterion 4: series moments against their quadrature twins ---------

bool crit4(std::string& detail) {
  Timer timer;
  double grid_worst = 0.0;
  int series_points = 0;
  for (double a : {0.5, 1.0, 5.0}) {
    for (double g : {0.7, 1.0, 2.0}) {
      for (double t : {0.1, 0.9}) {
        const EwlParams p{a, 1.0, g, t};
        bool all_series = true;
        for (int k = 1; k <= 3; ++k) {
          const ewl::MomentResult s = ewl::raw_moment(p, k);
          const double q = ewl::raw_moment_quadrature(p, k);
          grid_worst = std::max(grid_worst, rel(s.value, q));
          all_series = all_series && s.method == ewl::MomentMethod::Series;
        }
        if (all_series) ++series_points;
      }
    }
  }

  const EwlParams spots[5] = {{1.0, 1.0, 1.0, 0.5},
                              {2.0, 0.5, 1.5, 0.3},
                              {0.5, 1.0, 0.7, 0.1},
                              {5.0, 1.0, 2.0, 0.9},
                              {1.5, 1.0, 1.0, 0.2}};
  double spot_worst = 0.0;
  for (const EwlParams& p : spots) {
    const double t = ewl::quantile(p, 0.5);
    spot_worst = std::max(
        spot_worst, rel(ewl::residual_moment(p, 1, t),
                        ewl::residual_moment_quadrature(p, 1, t)));
    spot_worst = std::max(
        spot_worst, rel(ewl::reversed_residual_moment(p, 1, t),
                        ewl::reversed_residual_moment_quadrature(p, 1, t)));
    const auto [d1, d2] = ewl::mean_deviations(p);
    const auto [q1, q2] = ewl::mean_deviations_quadrature(p);
    spot_worst = std::max({spot_worst, rel(d1, q1), rel(d2, q2)});
    const double x3 = ewl::quantile(p, 0.3);
    const double x6 = ewl::quantile(p, 0.6);
    spot_worst = std::max(spot_worst, rel(ewl::bonferroni(p, x3),
                                          ewl::bonferroni_quadrature(p, x3)));
    spot_worst = std::max(
        spot_worst, rel(ewl::lorenz(p, x6), ewl::lorenz_quadrature(p, x6)));
    spot_worst = std::max(
        spot_worst, rel(ewl::scaled_ttt(p, t), ewl::scaled_ttt_quadrature(p, t)));
  }
  const double elapsed = timer.seconds();

  const bool ok = grid_worst <= 1e-6 && series_points >= 12 &&
                  spot_worst <= 1e-8 && elapsed < 120.0;
  detail = fmt(
      "grid max rel=%.2e (18 points, k=1..3), series points=%d/18, spot max "
      "rel=%.2e, elapsed=%.1fs",
      grid_worst, series_points, spot_worst, elapsed);
  return ok;
}

// --- criterion 5: the two samplers draw from the same law ---------------

bool crit5(std::string& detail) {
  const EwlParams pts[5] = {{1.0, 1.0, 1.0, 0.5},
                            {2.0, 0.5, 1.5, 0.3},
                            {0.5, 2.0, 0.7, 0.2},
                            {5.0, 0.5, 2.0, 0.8},
                            {1.5, 1.0, 1.0, 0.9}};
  double min_p = 1.0;
  double max_d = 0.0;
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> a = ewl::sample_inverse(pts[i], 100000, 4000 + i);
    const std::vector<double> b =
        ewl::sample_compound(pts[i], 100000, 5000 + i);
    const auto [d, pv] = ewl::two_sample_ks(a, b);
    min_p = std::min(min_p, pv);
    max_d = std::max(max_d, d);
  }
  detail = fmt("n=1e5 per sampler, 5 parameter points, max D=%.4f min p=%.4f",
               max_d, min_p);
  return min_p > 0.01;
}

// --- criterion 6: EM ascent and agreement with the direct optimizer -----

bool crit6(std::string& detail) {
  double worst_margin = 1e300;  // min over steps of ll_next - floor
  double worst_gap = 0.0;       // max |EM - direct| at the optimum
  ewl::EmConfig one;
  one.max_iter = 1;
  ewl::EmConfig full;
  full.max_iter = 3000;
  full.loglik_tol = 1e-9;
  full.param_tol = 1e-9;

  for (int rep = 0; rep < 50; ++rep) {
    std::mt19937_64 rng(777 + rep);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const EwlParams truth{0.5 + 3.5 * u(rng), 0.3 + 2.7 * u(rng),
                          0.6 + 1.9 * u(rng), 0.1 + 0.75 * u(rng)};
    const std::vector<double> data =
        ewl::sample_inverse(truth, 500, 881000 + rep);

    EwlParams p = truth;
    double prev = ewl::loglik(data, p);
    for (int step = 0; step < 40; ++step) {
      const ewl::FitResult r = ewl::em_fit(data, p, one);
      const double margin = r.loglik - (prev - 1e-9 * (1.0 + std::fabs(prev)));
      worst_margin = std::min(worst_margin, margin);
      p = r.params;
      prev = r.loglik;
    }

    const ewl::FitResult em = ewl::em_fit(data, truth, full);
    const ewl::FitResult direct = ewl::direct_fit(data, truth);
    worst_gap = std::max(worst_gap, std::fabs(em.loglik - direct.loglik));
  }

  detail = fmt(
      "50 datasets (n=500): min ascent margin=%.2e, max |EM-direct| "
      "loglik gap=%.2e",
      worst_margin, worst_gap);
  return worst_margin >= 0.0 && worst_gap <= 1e-3;
}

// --- criterion 7: analytic score against central differences ------------

bool crit7(std::string& detail) {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const EwlParams p{std::exp(std::log(0.5) + std::log(10.0) * u(rng)),
                      0.2 + 2.8 * u(rng), 0.5 + 2.0 * u(rng),
                      0.05 + 0.85 * u(rng)};
    const std::vector<double> data = ewl::sample_inverse(p, 40, 90000 + rep);
    const std::array<double, 4> s = ewl::score(data, p);
    for (int k = 0; k < 4; ++k) {
      EwlParams lo = p, hi = p;
      double* plo = k == 0 ? &lo.alpha : k == 1 ? &lo.beta
                                      : k == 2 ? &lo.gamma_
                                               : &lo.theta;
      double* phi = k == 0 ? &hi.alpha : k == 1 ? &hi.beta
                                      : k == 2 ? &hi.gamma_
                                               : &hi.theta;
      const double h = 1e-6 * std::max(std::fabs(*plo), 0.1);
      *plo -= h;
      *phi += h;
      const double fd =
          (ewl::loglik(data, hi) - ewl::loglik(data, lo)) / (2.0 * h);
      worst = std::max(worst, rel1(s[k], fd));
    }
  }
  detail = fmt("20 random (data, params) pairs: max rel gap=%.2e", worst);
  return worst <= 1e-5;
}

// --- criterion 8: hazard endpoints match their classified limits ---------

bool crit8(std::string& detail) {
  using ewl::LimitKind;
  struct Case {
    EwlParams p;
    LimitKind zero_kind;
    double zero_value;  // only read when Finite
    LimitKind inf_kind;
    double inf_value;
  };
  const Case cases[5] = {
      {{0.5, 1.0, 0.3, 0.3}, LimitKind::Infinite, 0, LimitKind::Zero, 0},
      {{6.0, 1.0, 0.3, 0.3}, LimitKind::Zero, 0, LimitKind::Zero, 0},
      {{0.2, 1.0, 1.0, 0.5}, LimitKind::Infinite, 0, LimitKind::Finite, 1.0},
      {{1.0, 2.0, 1.0, 0.5}, LimitKind::Finite, 1.4426950408889634,
       LimitKind::Finite, 2.0},
      {{3.0, 1.0, 2.0, 0.5}, LimitKind::Zero, 0, LimitKind::Infinite, 0}};

  bool ok = true;
  std::ostringstream oss;
  auto check_end = [&](LimitKind kind, double limit_value, double h_num) {
    switch (kind) {
      case LimitKind::Zero: return h_num <= 1e-6;
      case LimitKind::Infinite: return h_num >= 1e6;
      default: return rel(h_num, limit_value) <= 1e-6;
    }
  };
  for (const Case& c : cases) {
    const ewl::HazardLimit hl = ewl::hazard_limits(c.p);
    const double h0 = ewl::hazard(c.p, 1e-9);
    const double h9 = ewl::hazard(c.p, 1e9);
    const bool kinds = hl.at_zero_kind == c.zero_kind &&
                       hl.at_infinity_kind == c.inf_kind;
    const bool zero_ok =
        check_end(c.zero_kind,
                  c.zero_kind == LimitKind::Finite ? hl.at_zero : 0.0, h0) &&
        (c.zero_kind != LimitKind::Finite ||
         rel(hl.at_zero, c.zero_value) <= 1e-9);
    const bool inf_ok =
        check_end(c.inf_kind,
                  c.inf_kind == LimitKind::Finite ? hl.at_infinity : 0.0, h9) &&
        (c.inf_kind != LimitKind::Finite ||
         rel(hl.at_infinity, c.inf_value) <= 1e-9);
    ok = ok && kinds && zero_ok && inf_ok;
    oss << fmt(" (%.1f,%.0f,%.1f): h(1e-9)=%.3g h(1e9)=%.3g %s;", c.p.alpha,
               c.p.beta, c.p.gamma_, h0, h9,
               (kinds && zero_ok && inf_ok) ? "ok" : "MISMATCH");
  }
  detail = "5 classification cases:" + oss.str();
  return ok;
}

// --- criterion 9: sub-model closed forms against the restricted family ---

bool crit9(std::string& detail) {
  struct Setup {
    Family f;
    EwlParams p;
  };
  const Setup grid[9] = {
      {Family::Cwl, {1.0, 0.8, 1.7, 0.35}},
      {Family::Cwl, {1.0, 2.0, 0.6, 0.7}},
      {Family::Cwl, {1.0, 1.0, 1.2, 0.15}},
      {Family::Gel, {0.5, 1.3, 1.0, 0.4}},
      {Family::Gel, {2.5, 0.6, 1.0, 0.8}},
      {Family::Gel, {7.0, 1.0, 1.0, 0.2}},
      {Family::Cel, {1.0, 1.0, 1.0, 0.5}},
      {Family::Cel, {1.0, 0.4, 1.0, 0.9}},
      {Family::Cel, {1.0, 3.0, 1.0, 0.1}}};
  const double xs[4] = {0.2, 0.7, 1.5, 3.0};

  double worst = 0.0;
  for (const Setup& s : grid) {
    const EwlParams p = ewl::restrict_params(s.p, s.f);
    for (double x : xs) {
      const double pdf_full = std::exp(ewl::family_log_pdf(s.f, p, x));
      const double cdf_full = ewl::family_cdf(s.f, p, x);
      const double haz_full = pdf_full / (1.0 - cdf_full);
      worst = std::max(worst, rel(ewl::submodel_pdf_closed(s.f, p, x), pdf_full));
      worst = std::max(worst, rel(ewl::submodel_cdf_closed(s.f, p, x), cdf_full));
      worst = std::max(worst,
                       rel(ewl::submodel_hazard_closed(s.f, p, x), haz_full));
    }
  }

  const double cel_mean =
      ewl::submodel_mean(Family::Cel, EwlParams{1.0, 1.0, 1.0, 0.5});
  const bool mean_ok = std::fabs(cel_mean - 1.18657) <= 1e-6;

  detail = fmt("closed-form max rel=%.2e over 9 setups x 4 points; "
               "exponential-logarithmic mean=%.8f",
               worst, cel_mean);
  return worst <= 1e-12 && mean_ok;
}

// --- criterion 10: likelihood-ratio calibration --------------------------

bool crit10(std::string& detail) {
  // simulate under the alpha = 1 sub-model and test it against the full
  // family; the pinned value is interior, so the statistic is chi-square(1)
  const EwlParams truth{1.0, 1.0, 1.5, 0.4};
  const int reps = 200;
  std::vector<double> pvals;
  pvals.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    const std::vector<double> data =
        ewl::sample_inverse(truth, 500, 33000 + rep);
    const ewl::FitResult null_fit =
        ewl::fit_from(data, truth, Family::Cwl, ewl::FitMethod::Direct);
    const ewl::FitResult alt_fit = ewl::fit_from(
        data, null_fit.params, Family::Ewl, ewl::FitMethod::Direct);
    const double w = std::max(0.0, 2.0 * (alt_fit.loglik - null_fit.loglik));
    pvals.push_back(ewl::chisq_sf(w, 1));
  }
  std::sort(pvals.begin(), pvals.end());
  double d = 0.0;
  for (int i = 0; i < reps; ++i) {
    d = std::max(d, std::max((i + 1.0) / reps - pvals[i],
                             pvals[i] - (double)i / reps));
  }
  const double unif_p = ewl::kolmogorov_sf(std::sqrt((double)reps) * d);

  const std::vector<double> fatigue = load("fatigue_6061T6.txt");
  const ewl::LrTestResult lr = ewl::lr_test(fatigue, Family::Ew, Family::Ewl);
  const double direct_gap = 2.0 * (ewl::fit(fatigue, Family::Ewl).loglik -
                                   ewl::fit(fatigue, Family::Ew).loglik);
  const bool identity_ok = std::fabs(lr.statistic - direct_gap) <= 1e-6;

  detail = fmt(
      "200 null replications: KS(p-values vs uniform) D=%.4f p=%.4f; fatigue "
      "LR statistic=%.6f vs refit gap=%.6f",
      d, unif_p, lr.statistic, direct_gap);
  return unif_p > 0.01 && identity_ok;
}

// --- criterion 11: entropy series against quadrature ----------------------

bool crit11(std::string& detail) {
  const EwlParams pts[5] = {{1.0, 1.0, 1.0, 0.5},
                            {2.0, 0.5, 1.5, 0.3},
                            {1.0, 1.0, 2.0, 0.2},
                            {3.0, 0.5, 0.8, 0.6},
                            {0.8, 2.0, 1.2, 0.9}};
  double worst = 0.0;
  double worst_sandwich = 0.0;
  for (const EwlParams& p : pts) {
    for (double r : {0.5, 2.0, 3.0}) {
      worst = std::max(
          worst, rel1(ewl::renyi_entropy(p, r), ewl::renyi_entropy_quadrature(p, r)));
    }
    const double shannon = ewl::shannon_entropy(p);
    worst_sandwich = std::max(
        worst_sandwich,
        std::fabs(ewl::renyi_entropy(p, 1.0 + 1e-4) - shannon));
    worst_sandwich = std::max(
        worst_sandwich,
        std::fabs(ewl::renyi_entropy(p, 1.0 - 1e-4) - shannon));
  }
  detail = fmt(
      "max rel gap=%.2e over 5 points x r in {0.5,2,3}; max |renyi(1+-1e-4) "
      "- shannon|=%.2e",
      worst, worst_sandwich);
  return worst <= 1e-6 && worst_sandwich < 1e-3;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..11>\n");
    return 1;
  }
  const int n = std::atoi(argv[1]);
  bool (*checks[])(std::string&) = {crit1, crit2, crit3, crit4, crit5, crit6,
                                    crit7, crit8, crit9, crit10, crit11};
  if (n < 1 || n > 11) {
    std::fprintf(stderr, "criterion number must be 1..11\n");
    return 1;
  }
  std::string detail;
  bool pass = false;
  try {
    pass = checks[n - 1](detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    pass = false;
  }
  std::printf("criterion %d: %s (%s)\n", n, pass ? "PASS" : "FAIL",
              detail.c_str());
  return pass ? 0 : 1;
}
