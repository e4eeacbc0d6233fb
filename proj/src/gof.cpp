#include "ewl/gof.hpp"

#include "ewl/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewl {

namespace {

// Probability transforms u_i = F(y_(i)) on the sorted sample, clamped away
// from {0,1} so the AD logs stay finite.
std::vector<double> probability_transform(const std::vector<double>& data,
                                          const EwlParams& p, Family f) {
  if (data.empty()) throw std::domain_error("gof: data must be nonempty");
  std::vector<double> u;
  u.reserve(data.size());
  std::vector<double> y = data;
  std::sort(y.begin(), y.end());
  for (double yi : y) {
    double ui = family_cdf(f, p, yi);
    ui = std::min(1.0 - 1e-15, std::max(1e-15, ui));
    u.push_back(ui);
  }
  return u;
}

}  // namespace

std::pair<double, double> ks_statistic(const std::vector<double>& data,
                                       const EwlParams& p, Family f) {
  const std::vector<double> u = probability_transform(data, p, f);
  const double n = (double)u.size();
  double d = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double hi = (i + 1.0) / n - u[i];
    const double lo = u[i] - (double)i / n;
    d = std::max(d, std::max(hi, lo));
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

std::pair<double, double> ad_cm_statistics_raw(const std::vector<double>& data,
                                               const EwlParams& p, Family f) {
  const std::vector<double> u = probability_transform(data, p, f);
  const size_t n = u.size();
  double ad = 0.0, cm = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double wgt = 2.0 * (i + 1.0) - 1.0;
    ad += wgt * (std::log(u[i]) + std::log1p(-u[n - 1 - i]));
    const double dev = u[i] - wgt / (2.0 * n);
    cm += dev * dev;
  }
  ad = -(double)n - ad / (double)n;
  cm += 1.0 / (12.0 * (double)n);
  return {ad, cm};
}

std::pair<double, double> ad_cm_statistics(const std::vector<double>& data,
                                           const EwlParams& p, Family f) {
  const auto [ad, cm] = ad_cm_statistics_raw(data, p, f);
  const double n = (double)data.size();
  return {ad * (1.0 + 0.75 / n + 2.25 / (n * n)), cm * (1.0 + 0.5 / n)};
}

GofReport gof_report(const std::vector<double>& data, const FitResult& fit) {
  GofReport rep;
  rep.n = (int)data.size();
  const auto [d, pval] = ks_statistic(data, fit.params, fit.family);
  rep.ks = d;
  rep.ks_pvalue = pval;
  std::tie(rep.ad_raw, rep.cm_raw) =
      ad_cm_statistics_raw(data, fit.params, fit.family);
  const double n = (double)rep.n;
  rep.ad = rep.ad_raw * (1.0 + 0.75 / n + 2.25 / (n * n));
  rep.cm = rep.cm_raw * (1.0 + 0.5 / n);
  rep.aic = fit.aic;
  return rep;
}

std::pair<double, double> two_sample_ks(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::domain_error("two_sample_ks: both samples must be nonempty");
  }
  std::vector<double> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = (double)x.size(), n2 = (double)y.size();
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs((double)i / n1 - (double)j / n2));
  }
  const double n_eff = n1 * n2 / (n1 + n2);
  return {d, kolmogorov_sf(std::sqrt(n_eff) * d)};
}

std::vector<std::pair<double, double>> empirical_scaled_ttt(
    const std::vector<double>& data) {
  if (data.empty()) throw std::domain_error("gof: data must be nonempty");
  std::vector<double> y = data;
  std::sort(y.begin(), y.end());
  const size_t n = y.size();
  double total = 0.0;
  for (double v : y) total += v;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n + 1);
  pts.emplace_back(0.0, 0.0);
  double cum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    cum += y[i];
    const double ti = (cum + (double)(n - i - 1) * y[i]) / total;
    pts.emplace_back((double)(i + 1) / (double)n, ti);
  }
  return pts;
}

std::vector<std::pair<double, double>> empirical_survival(
    const std::vector<double>& data) {
  if (data.empty()) throw std::domain_error("gof: data must be nonempty");
  std::vector<double> y = data;
  std::sort(y.begin(), y.end());
  const double n = (double)y.size();
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < y.size(); ++i) {
    if (i + 1 < y.size() && y[i + 1] == y[i]) continue;  // last of a tie run
    pts.emplace_back(y[i], (double)(y.size() - i - 1) / n);
  }
  return pts;
}

std::vector<ModelRow> model_table(const std::vector<double>& data,
                                  const std::vector<Family>& families) {
  std::vector<ModelRow> rows;
  for (Family f : families) {
    ModelRow row;
    row.family = f;
    try {
      row.fit = fit(data, f);
      row.gof = gof_report(data, row.fit);
    } catch (const std::exception& e) {
      row.fit_failed = true;
      row.failure = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ModelRow& a, const ModelRow& b) {
                     if (a.fit_failed != b.fit_failed) return !a.fit_failed;
                     if (a.fit_failed) return false;
                     if (a.gof.aic != b.gof.aic) return a.gof.aic < b.gof.aic;
                     if (a.gof.ad != b.gof.ad) return a.gof.ad < b.gof.ad;
                     return a.gof.cm < b.gof.cm;
                   });
  return rows;
}

}  // namespace ewl
