#pragma once

#include <utility>

#include "ewl/distribution.hpp"
#include "ewl/special.hpp"

namespace ewl {

enum class MomentMethod { Series, Quadrature };

struct MomentResult {
  double value = 0.0;
  MomentMethod method = MomentMethod::Series;
  int terms_used = 0;      // 0 for quadrature results
  double est_error = 0.0;  // relative error estimate
};

// E(Y^k) via the double series
//   E(Y^k) = Gamma(1+k/gamma) beta^{-k} (alpha theta / Ltilde)
//            sum_{n>=0} theta^n sum_{j>=0} (-1)^j C(alpha(n+1)-1, j)
//            (j+1)^{-(1+k/gamma)},          Ltilde = -log(1-theta).
// Falls back to quadrature (flagged in method) when the series cannot meet
// its internal accuracy target.
MomentResult raw_moment(const EwlParams& p, int k,
                        const SeriesPolicy& policy = {});

// Quadrature twin of raw_moment: adaptive integration of the density in the
// Weibull-kernel variable z = (beta y)^gamma. Independent of the series path.
double raw_moment_quadrature(const EwlParams& p, int k);

std::pair<double, double> mean_and_variance(const EwlParams& p,
                                            const SeriesPolicy& policy = {});

// Moment generating function as the power series sum_k t^k E(Y^k)/k!.
// Converges for all t when gamma > 1 and for |t| < beta when gamma = 1;
// throws NonConvergence outside (detected, not asserted a priori), in
// particular for any t != 0 when gamma < 1.
double mgf(const EwlParams& p, double t, const SeriesPolicy& policy = {});
double mgf_quadrature(const EwlParams& p, double t);

// r-th conditional moment of the residual life, E[(Y-t)^r | Y > t], via the
// binomial expansion of (y-t)^r and the upper-incomplete-gamma series for
// each partial moment int_t^inf y^i f dy. Falls back to the quadrature twin
// when the series exhausts its term budget; so do the other series
// evaluators below that have one.
double residual_moment(const EwlParams& p, int r, double t,
                       const SeriesPolicy& policy = {});
double residual_moment_quadrature(const EwlParams& p, int r, double t);

// Mean residual life m(t) = residual_moment(p, 1, t).
double mean_residual_life(const EwlParams& p, double t,
                          const SeriesPolicy& policy = {});

// r-th conditional moment of the reversed residual life,
// E[(t-Y)^r | Y <= t], via the lower-incomplete-gamma series.
double reversed_residual_moment(const EwlParams& p, int r, double t,
                                const SeriesPolicy& policy = {});
double reversed_residual_moment_quadrature(const EwlParams& p, int r,
                                           double t);

// (delta1, delta2): mean absolute deviations about the mean and the median,
//   delta1 = 2 mu F(mu) - 2 I(mu),   delta2 = mu - 2 I(M),
// with I(x) = int_0^x y f dy evaluated by series and M = quantile(0.5).
std::pair<double, double> mean_deviations(const EwlParams& p,
                                          const SeriesPolicy& policy = {});
std::pair<double, double> mean_deviations_quadrature(const EwlParams& p);

// Bonferroni curve B_F[F(x)] = I(x) / (mu F(x)) and Lorenz curve
// L_F[F(x)] = B_F[F(x)] F(x), both at the abscissa x > 0.
double bonferroni(const EwlParams& p, double x,
                  const SeriesPolicy& policy = {});
double lorenz(const EwlParams& p, double x, const SeriesPolicy& policy = {});
double bonferroni_quadrature(const EwlParams& p, double x);
double lorenz_quadrature(const EwlParams& p, double x);

// Scaled total time on test transform S_F[F(t)] = (1/mu) int_0^t S(u) du,
// by the series
//   int_0^t S = (1/(gamma beta Ltilde)) sum_{k>=1} (theta^k/k)
//               sum_{i>=1} (-1)^{i+1} C(alpha k, i) i^{-1/gamma}
//               gammainc_lower(1/gamma; i (beta t)^gamma).
double scaled_ttt(const EwlParams& p, double t,
                  const SeriesPolicy& policy = {});
double scaled_ttt_quadrature(const EwlParams& p, double t);

// Gini index G = 1 - C_F with C_F = int_0^inf S_F[F(t)] f(t) dt, reduced by
// integration by parts to C_F = (1/mu) int_0^inf S(y)^2 dy (quadrature).
double gini(const EwlParams& p, const SeriesPolicy& policy = {});

// Renyi entropy I_R(r) = log(int f^r) / (1-r), r > 0, r != 1, via the series
//   int f^r = (alpha theta/Ltilde)^r (gamma beta)^{r-1} Gamma(s_r)
//             sum_{j>=0} [Gamma(r+j)/(Gamma(r) j!)] theta^j
//             sum_{k>=0} (-1)^k C(alpha(r+j)-r, k) (k+r)^{-s_r},
// s_r = (r(gamma-1)+1)/gamma. Requires s_r > 0 and r(alpha gamma - 1) + 1 > 0
// (existence of int f^r); domain_error otherwise.
double renyi_entropy(const EwlParams& p, double r,
                     const SeriesPolicy& policy = {});
double renyi_entropy_quadrature(const EwlParams& p, double r);

// Shannon entropy E[-log f(Y)] by adaptive quadrature (no closed form).
double shannon_entropy(const EwlParams& p);

}  // namespace ewl
