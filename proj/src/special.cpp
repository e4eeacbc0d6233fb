#include "ewl/special.hpp"

#include <cmath>
#include <limits>

namespace ewl {

namespace {
constexpr double kPosEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny =
    std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
}  // namespace

SumInfo truncated_sum(const std::function<double(int)>& term,
                      const SeriesPolicy& policy) {
  if (policy.rel_tol <= 0 || policy.max_terms_per_index < 1 ||
      policy.stagnation_window < 1) {
    throw std::domain_error("truncated_sum: invalid policy");
  }
  long double sum = 0.0L;
  long double max_abs = 0.0L;
  int quiet = 0;  // consecutive terms below tolerance
  for (int i = 0; i < policy.max_terms_per_index; ++i) {
    const double t = term(i);
    if (!std::isfinite(t)) {
      throw NonConvergence("truncated_sum: non-finite term at index " +
                           std::to_string(i));
    }
    sum += t;
    const long double a = fabsl((long double)t);
    if (a > max_abs) max_abs = a;
    const double gate =
        policy.rel_tol * std::fabs((double)sum) + policy.abs_tol;
    quiet = (std::fabs(t) <= gate) ? quiet + 1 : 0;
    if (quiet >= policy.stagnation_window) {
      SumInfo out;
      out.value = (double)sum;
      out.terms = i + 1;
      // Cancellation estimate: the largest term bounds the rounding noise.
      out.est_error =
          (double)(max_abs * std::numeric_limits<long double>::epsilon() * (i + 1));
      return out;
    }
  }
  throw NonConvergence("truncated_sum: term budget exhausted");
}

double log_gamma(double x) {
  if (!(x > 0)) throw std::domain_error("log_gamma: x must be positive");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0)) throw std::domain_error("digamma: x must be positive");
  // Recur upward to x >= 10, then the asymptotic expansion; with terms
  // through B_12 the truncation there is below 1e-16 relative.
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  // psi(x) ~ log x - 1/(2x) - sum B_{2k}/(2k x^{2k})
  double series = std::log(x) - 0.5 * inv -
                  inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 -
                          inv2 * (1.0 / 240 - inv2 * (1.0 / 132 -
                          inv2 * (691.0 / 32760))))));
  return acc + series;
}

namespace {

// Regularized lower incomplete gamma by its power series; valid t < s+1.
double gamma_p_series(double s, double t) {
  double ap = s;
  double del = 1.0 / s;
  double sum = del;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= t / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kPosEps) break;
  }
  return sum * std::exp(-t + s * std::log(t) - std::lgamma(s));
}

// Regularized upper incomplete gamma by the Lentz continued fraction;
// valid t >= s+1.
double gamma_q_cf(double s, double t) {
  double b = t + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kPosEps) break;
  }
  return std::exp(-t + s * std::log(t) - std::lgamma(s)) * h;
}

}  // namespace

double gamma_p(double s, double t) {
  if (!(s > 0) || t < 0) throw std::domain_error("gamma_p: need s>0, t>=0");
  if (t == 0.0) return 0.0;
  if (t < s + 1.0) return gamma_p_series(s, t);
  return 1.0 - gamma_q_cf(s, t);
}

double gamma_q(double s, double t) {
  if (!(s > 0) || t < 0) throw std::domain_error("gamma_q: need s>0, t>=0");
  if (t == 0.0) return 1.0;
  if (t < s + 1.0) return 1.0 - gamma_p_series(s, t);
  return gamma_q_cf(s, t);
}

double lower_incomplete_gamma(double s, double t) {
  return gamma_p(s, t) * std::exp(std::lgamma(s));
}

double upper_incomplete_gamma(double s, double t) {
  return gamma_q(s, t) * std::exp(std::lgamma(s));
}

double gen_binomial(double a, int j) {
  if (j < 0) throw std::domain_error("gen_binomial: j must be >= 0");
  // Falling-factorial product: exact zeros at integer a with j > a, no
  // poles anywhere on the real line.
  long double num = 1.0L;
  for (int i = 0; i < j; ++i) num *= (long double)(a - i);
  long double den = 1.0L;
  for (int i = 2; i <= j; ++i) den *= (long double)i;
  return (double)(num / den);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0,1)");
  }
  // Wichura's algorithm AS 241 (PPND16): three rational approximations on
  // the central region |q| <= 0.425 and the two tails.
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                 2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
               3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
             4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
               6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
             2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
               2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
             5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
             5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double chisq_sf(double w, int df) {
  if (w < 0 || df < 1) throw std::domain_error("chisq_sf: need w>=0, df>=1");
  return gamma_q(0.5 * df, 0.5 * w);
}

double kolmogorov_sf(double lambda) {
  if (lambda < 0) throw std::domain_error("kolmogorov_sf: lambda >= 0");
  if (lambda < 1e-3) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1) ? t : -t;
    if (t < 1e-18) break;
  }
  const double p = 2.0 * s;
  return std::fmin(1.0, std::fmax(0.0, p));
}

}  // namespace ewl
