#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ewl {

// Thrown when a series evaluator exhausts its term budget before meeting
// tolerance. Callers with a quadrature backend catch this and fall back.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncation policy shared by all series evaluators. Stagnation is judged
// over a window of consecutive terms, not a single term, because the sums
// we evaluate alternate in sign and individual terms can pass through zero.
struct SeriesPolicy {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_terms_per_index = 10000;
  int stagnation_window = 50;
};

struct SumInfo {
  double value = 0.0;
  int terms = 0;        // number of terms actually added
  double est_error = 0.0;  // absolute: rounding/cancellation estimate
};

// Sums term(0) + term(1) + ... until the last `stagnation_window` terms are
// all below rel_tol*|partial| + abs_tol in magnitude. Accumulates in long
// double and estimates cancellation from the largest term seen.
// Throws NonConvergence if max_terms_per_index is exhausted first.
SumInfo truncated_sum(const std::function<double(int)>& term,
                      const SeriesPolicy& policy);

// log Gamma(x), x > 0.
double log_gamma(double x);

// Digamma psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

// Regularized incomplete gamma functions: P(s,t) = gamma(s;t)/Gamma(s),
// Q(s,t) = Phi(s;t)/Gamma(s), P + Q = 1. Series expansion for t < s+1,
// Lentz continued fraction for t >= s+1.
double gamma_p(double s, double t);
double gamma_q(double s, double t);

// Unnormalized incomplete gammas: lower gamma(s;t) = int_0^t x^{s-1}e^{-x}dx
// and upper Phi(s;t) = int_t^inf x^{s-1}e^{-x}dx.
double lower_incomplete_gamma(double s, double t);
double upper_incomplete_gamma(double s, double t);

// Generalized binomial coefficient C(a, j) for real a and integer j >= 0,
// computed as the falling-factorial product prod_{i<j}(a-i)/j!. Total
// function: well defined (and exactly zero) at nonpositive integer gaps.
double gen_binomial(double a, int j);

// Standard normal quantile (inverse cdf), p in (0,1). Wichura's AS 241
// rational approximations, accurate to ~1e-15 relative.
double norm_quantile(double p);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chisq_sf(double w, int df);

// Upper tail of the asymptotic Kolmogorov distribution at lambda >= 0:
// P(sup|B(t)| > lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

}  // namespace ewl
