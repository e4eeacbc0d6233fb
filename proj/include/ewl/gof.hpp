#pragma once

#include <utility>
#include <vector>

#include "ewl/inference.hpp"

namespace ewl {

struct GofReport {
  double ks = 0.0;
  double ks_pvalue = 1.0;
  double ad = 0.0;  // Anderson-Darling, small-sample corrected
  double cm = 0.0;  // Cramer-von Mises, small-sample corrected
  double ad_raw = 0.0;
  double cm_raw = 0.0;
  double aic = 0.0;
  int n = 0;
};

// One-sample Kolmogorov-Smirnov: D_n = max_i max(i/n - u_i, u_i - (i-1)/n)
// on u_i = F(y_(i)), with the asymptotic p-value kolmogorov_sf(sqrt(n) D_n).
std::pair<double, double> ks_statistic(const std::vector<double>& data,
                                       const EwlParams& p, Family f);

// Anderson-Darling and Cramer-von Mises on the probability transform,
//   AD = -n - (1/n) sum (2i-1)[log u_i + log(1-u_{n+1-i})],
//   CM = sum (u_i - (2i-1)/(2n))^2 + 1/(12n),
// returned with the small-sample correction factors for estimated
// parameters, AD*(1 + 0.75/n + 2.25/n^2) and CM*(1 + 0.5/n).
std::pair<double, double> ad_cm_statistics(const std::vector<double>& data,
                                           const EwlParams& p, Family f);
// The same statistics without the correction factors.
std::pair<double, double> ad_cm_statistics_raw(const std::vector<double>& data,
                                               const EwlParams& p, Family f);

// Full report for a fitted model (ks, p, corrected and raw AD/CM, aic).
GofReport gof_report(const std::vector<double>& data, const FitResult& fit);

// Two-sample Kolmogorov-Smirnov distance and asymptotic p-value.
std::pair<double, double> two_sample_ks(const std::vector<double>& a,
                                        const std::vector<double>& b);

// Empirical scaled TTT points (i/n, T_i),
// T_i = [sum_{j<=i} y_(j) + (n-i) y_(i)] / sum_j y_(j); T_n = 1.
std::vector<std::pair<double, double>> empirical_scaled_ttt(
    const std::vector<double>& data);

// Empirical survival S_n(t) = #{y_i > t}/n as a right-continuous step
// function: pairs (y_(i), S_n(y_(i))) after each distinct jump.
std::vector<std::pair<double, double>> empirical_survival(
    const std::vector<double>& data);

struct ModelRow {
  Family family = Family::Ewl;
  FitResult fit;
  GofReport gof;
  bool fit_failed = false;
  std::string failure;
};

// Fits each family and ranks rows by AIC ascending, ties broken by
// corrected AD then CM ascending. Per-family failures land in the row.
std::vector<ModelRow> model_table(const std::vector<double>& data,
                                  const std::vector<Family>& families);

}  // namespace ewl
