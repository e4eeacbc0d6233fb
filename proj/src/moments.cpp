#include "ewl/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ewl/quadrature.hpp"

namespace ewl {

namespace {

// A series result is kept only when its internal error estimate clears this
// relative gate; otherwise the caller reruns the quantity by quadrature.
constexpr double kSeriesAcceptRel = 1e-7;

// Unit roundoff of the long double accumulators.
constexpr double kEpsAcc = 1.1e-19;

struct InnerVal {
  double value = 0.0;
  double abs_err = 0.0;
  int terms = 0;
};

// The four inner kernels share the shape sum_j (-1)^j C(m,j) g(j):
//   Plain:    g = (j+r)^{-s}            = int_0^inf t^{s-1}e^{-rt}(1-e^{-t})^m / Gamma(s)
//   Upper:    g = (j+1)^{-s} Q(s,(j+1)x) = int_x^inf t^{s-1}e^{-t}(1-e^{-t})^m / Gamma(s)
//   Lower:    g = (j+1)^{-s} P(s,(j+1)x) = int_0^x   t^{s-1}e^{-t}(1-e^{-t})^m / Gamma(s)
//   OneMinus: sum_{i>=1} (-1)^{i+1} C(m,i) i^{-s} P(s,ix)
//           = int_0^x t^{s-1}(1-(1-e^{-t})^m) dt / Gamma(s)
enum class InnerMode { Plain, Upper, Lower, OneMinus };

// Alternating-series evaluation. The binomial signs cancel only while
// j < m; past j = m+1 the terms are one-signed with |term_j| ~ j^{-(m+1+s)},
// so stopping leaves a power-law tail that is estimated and reported, not
// ignored. Cancellation noise is estimated from the largest term seen.
InnerVal inner_series(double m, double s, double r, double x, InnerMode mode,
                      const SeriesPolicy& pol) {
  long double sum = 0.0L;
  long double maxmag = 0.0L;
  // P_j = (-1)^j C(m,j) (or (-1)^{i+1} C(m,i) for OneMinus): one recurrence,
  // P <- P (j-m)/(j+1), covers both sign conventions.
  long double P = (mode == InnerMode::OneMinus) ? (long double)m : 1.0L;
  int j = (mode == InnerMode::OneMinus) ? 1 : 0;
  int consec = 0;
  for (int count = 0; count < pol.max_terms_per_index; ++count, ++j) {
    double g = 0.0;
    switch (mode) {
      case InnerMode::Plain:
        g = std::pow(j + r, -s);
        break;
      case InnerMode::Upper:
        g = std::pow(j + 1.0, -s) * gamma_q(s, (j + 1) * x);
        break;
      case InnerMode::Lower:
        g = std::pow(j + 1.0, -s) * gamma_p(s, (j + 1) * x);
        break;
      case InnerMode::OneMinus:
        g = std::pow((double)j, -s) * gamma_p(s, j * x);
        break;
    }
    const long double term = P * (long double)g;
    sum += term;
    maxmag = std::max(maxmag, fabsl(term));
    P *= ((long double)j - (long double)m) / ((long double)j + 1.0L);
    if ((double)j > m + 2.0) {
      const double mag = (double)fabsl(term);
      if (mag <= pol.rel_tol * (double)fabsl(sum) + pol.abs_tol) {
        if (++consec >= 3) {
          // integral bound on the remaining power-law tail
          const double tail = mag * (j + 1) / std::max(m + s, 0.05);
          const double cancel = (double)maxmag * (count + 1) * kEpsAcc;
          return {(double)sum, cancel + tail, count + 1};
        }
      } else {
        consec = 0;
      }
    }
  }
  throw NonConvergence("inner kernel series exhausted its term budget");
}

// log(1 - e^{-t}) for t > 0, accurate at both ends.
double log_one_minus_exp(double t) {
  return (t > 0.01) ? std::log1p(-std::exp(-t)) : std::log(-std::expm1(-t));
}

// Dyadic breakpoints lo, lo*f, lo*f^2, ..., hi (endpoints included).
std::vector<double> dyadic_points(double lo, double hi, double f) {
  std::vector<double> pts{lo};
  for (double t = lo * f; t < hi; t *= f) pts.push_back(t);
  if (pts.back() < hi) pts.push_back(hi);
  return pts;
}

InnerVal inner_integral(double m, double s, double r, double x,
                        InnerMode mode);

// int_0^a t^{s-1}e^{-rt}(1-e^{-t})^m dt by the two leading powers of the
// integrand t^{s+m-1}(1 - (r+m/2)t + O(t^2)). For large m the head
// underflows to zero, which is also exact to working precision.
double power_head(double m, double s, double r, double a, double* err) {
  const double e0 = (s + m) * std::log(a);
  if (e0 < -700.0) {
    *err = 0.0;
    return 0.0;
  }
  const double lead = std::exp(e0) / (s + m);
  const double corr = (r + 0.5 * m) * std::exp(e0 + std::log(a)) / (s + m + 1);
  const double sec = (std::fabs(r) + 0.5 * std::fabs(m) + 1.0) * a;
  *err = lead * sec * sec * 3.0;
  return lead - corr;
}

InnerVal inner_integral(double m, double s, double r, double x,
                        InnerMode mode) {
  // Differencing Plain - Lower beats integrating t^{s-1} panels all the way
  // from a small x out to the tail; the subtraction loses at most one bit
  // because the mass below t = 0.5 is a bounded fraction of the whole.
  if (mode == InnerMode::Upper && x < 0.5) {
    const InnerVal whole = inner_integral(m, s, r, 0.0, InnerMode::Plain);
    const InnerVal low = inner_integral(m, s, r, x, InnerMode::Lower);
    return {whole.value - low.value, whole.abs_err + low.abs_err, 0};
  }

  const double gs = std::exp(log_gamma(s));
  auto base = [m, s, r](double t) {
    const double e = (s - 1.0) * std::log(t) - r * t + m * log_one_minus_exp(t);
    return (e > -745.0) ? std::exp(e) : 0.0;
  };
  auto one_minus = [m, s](double t) {
    const double mg = m * log_one_minus_exp(t);
    const double om = (mg > -36.0) ? -std::expm1(mg) : 1.0;
    return std::exp((s - 1.0) * std::log(t)) * om;
  };

  double raw = 0.0, raw_err = 0.0;
  switch (mode) {
    case InnerMode::Plain:
    case InnerMode::Upper: {
      const double T = (780.0 + 10.0 * std::max(1.0, s)) / std::min(r, 1.0) +
                       4.0 * std::log1p(std::max(0.0, m));
      std::vector<double> pts;
      if (mode == InnerMode::Plain) {
        const double a = 1e-7;
        double herr = 0.0;
        raw += power_head(m, s, r, a, &herr);
        raw_err += herr;
        pts = dyadic_points(a, 1.0, 8.0);
        for (double t = 2.0; t < T; t *= 2) pts.push_back(t);
        pts.push_back(T);
      } else {
        pts = dyadic_points(x, std::max(T, 4.0 * x), 2.0);
      }
      const QuadResult q = integrate_segments(base, pts, 3e-12, 1e-300, 400);
      raw += q.value;
      raw_err += q.est_error;
      break;
    }
    case InnerMode::Lower: {
      const double a = std::min(1e-7, 0.25 * x);
      double herr = 0.0;
      if (x <= 2e-7) {
        raw = power_head(m, s, r, x, &herr);
        raw_err = herr;
      } else {
        raw = power_head(m, s, r, a, &herr);
        raw_err = herr;
        const QuadResult q =
            integrate_segments(base, dyadic_points(a, x, 8.0), 3e-12, 1e-300, 400);
        raw += q.value;
        raw_err += q.est_error;
      }
      break;
    }
    case InnerMode::OneMinus: {
      // head: int_0^a t^{s-1}(1-(1-e^{-t})^m) dt with the expansion
      // (1-e^{-t})^m = t^m (1 - mt/2 + O(t^2)), so the head is
      // a^s/s - a^{s+m}/(s+m) + (m/2) a^{s+m+1}/(s+m+1).
      auto om_head = [m, s](double a, double* err) {
        double herr = 0.0;
        const double e0 = (s + m) * std::log(a);
        double sub = 0.0;
        if (e0 > -700.0) {
          sub = std::exp(e0) / (s + m) -
                0.5 * m * std::exp(e0 + std::log(a)) / (s + m + 1);
          const double sec = (0.5 * std::fabs(m) + 1.0) * a;
          herr = std::exp(e0) / (s + m) * sec * sec * 3.0;
        }
        *err = herr;
        return std::exp(s * std::log(a)) / s - sub;
      };
      const double a = std::min(1e-7, 0.25 * x);
      double herr = 0.0;
      if (x <= 2e-7) {
        raw = om_head(x, &herr);
        raw_err = herr;
      } else {
        raw = om_head(a, &herr);
        raw_err = herr;
        const QuadResult q = integrate_segments(one_minus, dyadic_points(a, x, 8.0),
                                                3e-12, 1e-300, 400);
        raw += q.value;
        raw_err += q.est_error;
      }
      break;
    }
  }
  const double value = raw / gs;
  return {value, raw_err / gs + std::fabs(value) * 1e-15, 0};
}

// Kernel dispatcher. Small m: the alternating series is exact up to a known
// cancellation/tail estimate; if that estimate is not comfortably small the
// integral representation redoes the term. Large m: the series would lose
// ~C(m,m/2)*eps to cancellation, so go straight to the integral.
InnerVal eval_kernel(double m, double s, double r, double x, InnerMode mode,
                     const SeriesPolicy& pol) {
  if (mode == InnerMode::Upper && x <= 0.0) mode = InnerMode::Plain;
  if ((mode == InnerMode::Lower || mode == InnerMode::OneMinus) && x <= 0.0) {
    return {0.0, 0.0, 0};
  }
  if (m <= 38.0) {
    bool series_ok = true;
    InnerVal sv;
    try {
      sv = inner_series(m, s, r, x, mode, pol);
    } catch (const NonConvergence&) {
      series_ok = false;
    }
    if (series_ok && sv.abs_err <= 1e-9 * std::fabs(sv.value) + 1e-280) {
      return sv;
    }
    const InnerVal iv = inner_integral(m, s, r, x, mode);
    if (!series_ok) return iv;
    return (iv.abs_err < sv.abs_err) ? iv : sv;
  }
  return inner_integral(m, s, r, x, mode);
}

struct OuterSum {
  double value = 0.0;
  double abs_err = 0.0;
  int terms = 0;
};

// sum_{n>=0} theta^n K(m_n) with m_n = alpha(n+1)-1. Every kernel used here
// is nonincreasing in m (the factor (1-e^{-t})^m shrinks pointwise), so the
// remainder is bounded by the geometric tail of the last term.
template <class KernelFn>
OuterSum theta_power_sum(const EwlParams& p, const SeriesPolicy& pol,
                         KernelFn kf) {
  long double sum = 0.0L;
  double err = 0.0;
  double tpow = 1.0;
  for (int n = 0; n < pol.max_terms_per_index; ++n) {
    const double m = p.alpha * (n + 1) - 1.0;
    const InnerVal v = kf(m);
    sum += (long double)tpow * v.value;
    err += tpow * v.abs_err;
    const double tail = tpow * p.theta * std::fabs(v.value) / (1.0 - p.theta);
    tpow *= p.theta;
    if (tail <= pol.rel_tol * (double)fabsl(sum) + pol.abs_tol) {
      err += tail;
      return {(double)sum, err, n + 1};
    }
  }
  throw NonConvergence("mixing series exhausted its term budget");
}

// D(s) = sum_n theta^n A(alpha(n+1)-1, s, 1): the shared core of the raw
// moment and mgf series.
OuterSum moment_series_core(const EwlParams& p, double s,
                            const SeriesPolicy& pol) {
  return theta_power_sum(p, pol, [&](double m) {
    return eval_kernel(m, s, 1.0, 0.0, InnerMode::Plain, pol);
  });
}

double wkernel_at(const EwlParams& p, double y) {
  return std::exp(p.gamma_ * (std::log(p.beta) + std::log(y)));
}

// ---- quadrature-side helpers ----

// Density weight in the Weibull-kernel variable z = (beta y)^gamma:
// f(y) dy = [alpha theta / Ltilde] e^{-z} G^{alpha-1} / (1-theta G^alpha) dz.
double z_weight(const EwlParams& p, double z) {
  const double lg = log_one_minus_exp(z);
  const double Ga = std::exp(p.alpha * lg);
  const double e = -z + (p.alpha - 1.0) * lg;
  if (e < -745.0) return 0.0;
  return std::exp(e) / (1.0 - p.theta * Ga);
}

QuadResult raw_moment_quad_impl(const EwlParams& p, int k) {
  const double Lt = -std::log1p(-p.theta);
  const double kg = (double)k / p.gamma_;
  auto f = [&](double z) {
    return std::exp(kg * std::log(z)) * z_weight(p, z);
  };
  const double a0 = 1e-6 * 0x1p-40;
  std::vector<double> pts = dyadic_points(a0, 1.0, 8.0);
  const double T = 780.0 + 8.0 * kg;
  for (double t = 2.0; t < T; t *= 2) pts.push_back(t);
  pts.push_back(T);
  QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  // analytic head below a0, where the integrand is ~ z^{k/gamma+alpha-1}
  const double c = kg + p.alpha;
  const double head = std::exp(c * std::log(a0)) / c;
  const double head_err =
      head * (std::exp(std::min(1.0, p.alpha) * std::log(a0)) + a0);
  const double pref = p.alpha * p.theta / (Lt * std::exp(k * std::log(p.beta)));
  q.value = pref * (q.value + head);
  q.est_error = pref * (q.est_error + head_err);
  return q;
}

// y below which f(y) = c0 y^{alpha gamma - 1} holds to ~1e-12 relative.
double head_cutoff(const EwlParams& p) {
  const double ag = p.alpha * p.gamma_;
  const double y1 = std::exp(std::log(1e-12) / p.gamma_) / p.beta;
  const double y2 = std::exp(std::log(1e-12 / p.theta) / ag) / p.beta;
  return std::min(y1, y2);
}

double pdf_head_coeff(const EwlParams& p) {
  const double Lt = -std::log1p(-p.theta);
  return p.alpha * p.theta * p.gamma_ *
         std::exp(p.alpha * p.gamma_ * std::log(p.beta)) / Lt;
}

std::vector<double> quantile_points(const EwlParams& p, double lo, double hi) {
  static const double levels[] = {1e-12,   1e-9,    1e-6,  1e-4,  1e-3, 0.01,
                                  0.05,    0.15,    0.3,   0.5,   0.7,  0.85,
                                  0.95,    0.99,    0.999, 1 - 1e-4,
                                  1 - 1e-6, 1 - 1e-9, 1 - 1e-12, 1 - 1e-14};
  std::vector<double> pts;
  for (double lv : levels) {
    const double y = quantile(p, lv);
    if (y > lo && y < hi) pts.push_back(y);
  }
  return pts;
}

// Appends doubling segments [Y,2Y], [2Y,4Y], ... until a segment stops
// mattering. Needed wherever the integrand decays slower than the density
// itself (entropies with r < 1, polynomial residual weights).
void extend_tail(const std::function<double(double)>& f, double Y,
                 double* total, double* err) {
  for (int it = 0; it < 200; ++it) {
    const QuadResult seg = integrate(f, Y, 2.0 * Y, 1e-11, 1e-300, 200);
    *total += seg.value;
    *err += seg.est_error;
    Y *= 2.0;
    if (std::fabs(seg.value) <= 1e-15 * std::fabs(*total) + 1e-300) return;
  }
}

// int_0^x y f dy by quadrature with an analytic power head.
double partial_mean_quad(const EwlParams& p, double x) {
  const double ag = p.alpha * p.gamma_;
  const double c0 = pdf_head_coeff(p);
  const double y0 = std::min(head_cutoff(p), 0.5 * x);
  double total = c0 * std::exp((ag + 1.0) * std::log(y0)) / (ag + 1.0);
  if (x <= y0 * (1.0 + 1e-12)) {
    return c0 * std::exp((ag + 1.0) * std::log(x)) / (ag + 1.0);
  }
  auto f = [&](double y) {
    const double lp = log_pdf(p, y);
    return (lp > -720.0) ? y * std::exp(lp) : 0.0;
  };
  std::vector<double> pts = dyadic_points(y0, x, 4.0);
  const std::vector<double> qs = quantile_points(p, pts.back(), x);
  // dyadic_points already ends at x; splice interior quantiles before x
  pts.pop_back();
  double last = pts.back();
  for (double q : qs) {
    if (q > last * 1.0000001 && q < x) {
      pts.push_back(q);
      last = q;
    }
  }
  pts.push_back(x);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  total += q.value;
  return total;
}

}  // namespace

MomentResult raw_moment(const EwlParams& p, int k, const SeriesPolicy& pol) {
  validate(p);
  if (k < 1) throw std::domain_error("raw_moment: k must be a positive integer");
  const double s = 1.0 + (double)k / p.gamma_;
  bool ok = true;
  OuterSum D;
  try {
    D = moment_series_core(p, s, pol);
  } catch (const NonConvergence&) {
    ok = false;
  }
  if (ok && D.value > 0.0) {
    const double Lt = -std::log1p(-p.theta);
    const double pref = std::exp(log_gamma(s) - k * std::log(p.beta)) *
                        p.alpha * p.theta / Lt;
    const double rel = D.abs_err / D.value + 1e-14;
    if (rel <= kSeriesAcceptRel) {
      return {pref * D.value, MomentMethod::Series, D.terms, rel};
    }
  }
  const QuadResult q = raw_moment_quad_impl(p, k);
  return {q.value, MomentMethod::Quadrature, 0,
          q.est_error / std::fabs(q.value) + 1e-15};
}

double raw_moment_quadrature(const EwlParams& p, int k) {
  validate(p);
  if (k < 1) throw std::domain_error("raw_moment_quadrature: k must be a positive integer");
  return raw_moment_quad_impl(p, k).value;
}

std::pair<double, double> mean_and_variance(const EwlParams& p,
                                            const SeriesPolicy& pol) {
  const double m1 = raw_moment(p, 1, pol).value;
  const double m2 = raw_moment(p, 2, pol).value;
  return {m1, m2 - m1 * m1};
}

double mgf(const EwlParams& p, double t, const SeriesPolicy& pol) {
  validate(p);
  if (t == 0.0) return 1.0;
  const double Lt = -std::log1p(-p.theta);
  const double log_scale = std::log(p.alpha * p.theta / Lt);
  long double sum = 1.0L;
  double prev_mag = std::numeric_limits<double>::infinity();
  int grow = 0, small = 0;
  for (int k = 1; k <= 400; ++k) {
    const double s = 1.0 + (double)k / p.gamma_;
    const OuterSum D = moment_series_core(p, s, pol);
    // term = t^k mu_k / k! assembled in log space: Gamma(1+k/gamma)/k! can
    // overflow on its own long before the product does.
    const double log_mag = k * std::log(std::fabs(t)) - log_gamma(k + 1.0) +
                           log_gamma(s) - k * std::log(p.beta) + log_scale +
                           std::log(D.value);
    double term = (log_mag > -745.0) ? std::exp(log_mag) : 0.0;
    if (t < 0.0 && (k & 1)) term = -term;
    sum += term;
    const double mag = std::fabs(term);
    if (k > 12) {
      grow = (mag > prev_mag) ? grow + 1 : 0;
      if (grow >= 4) {
        throw NonConvergence("mgf: power series diverges at this t");
      }
    }
    if (mag <= pol.rel_tol * (double)fabsl(sum) + pol.abs_tol) {
      if (++small >= 3) return (double)sum;
    } else {
      small = 0;
    }
    prev_mag = mag;
  }
  throw NonConvergence("mgf: power series did not converge in 400 terms");
}

double mgf_quadrature(const EwlParams& p, double t) {
  validate(p);
  if (t == 0.0) return 1.0;
  const double Lt = -std::log1p(-p.theta);
  const double ig = 1.0 / p.gamma_;
  auto expo = [&](double z) { return t * std::exp(ig * std::log(z)) / p.beta - z; };
  double Z = 64.0;
  while (expo(Z) > -760.0) {
    Z *= 2.0;
    if (Z > 1e12) {
      throw NonConvergence("mgf: integral diverges at this t");
    }
  }
  auto f = [&](double z) {
    const double lg = log_one_minus_exp(z);
    const double Ga = std::exp(p.alpha * lg);
    const double e = expo(z) + (p.alpha - 1.0) * lg;
    if (e < -745.0) return 0.0;
    return std::exp(e) / (1.0 - p.theta * Ga);
  };
  const double a0 = 1e-6 * 0x1p-40;
  std::vector<double> pts = dyadic_points(a0, 1.0, 8.0);
  for (double z = 2.0; z < Z; z *= 2) pts.push_back(z);
  pts.push_back(Z);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  const double head = std::exp(p.alpha * std::log(a0)) / p.alpha;
  return p.alpha * p.theta / Lt * (q.value + head);
}

double residual_moment(const EwlParams& p, int r, double t,
                       const SeriesPolicy& pol) {
  validate(p);
  if (r < 1) throw std::domain_error("residual_moment: order must be >= 1");
  if (t < 0) throw std::domain_error("residual_moment: t must be >= 0");
  if (t == 0.0) return raw_moment(p, r, pol).value;
  const double S = survival(p, t);
  if (!(S > 0.0)) {
    throw std::domain_error("residual_moment: survival underflows at t");
  }
  const double wt = wkernel_at(p, t);
  const double Lt = -std::log1p(-p.theta);
  std::vector<double> J(r + 1, 0.0);
  J[0] = S;
  try {
    for (int i = 1; i <= r; ++i) {
      const double s = 1.0 + (double)i / p.gamma_;
      const OuterSum o = theta_power_sum(p, pol, [&](double m) {
        return eval_kernel(m, s, 1.0, wt, InnerMode::Upper, pol);
      });
      J[i] = std::exp(log_gamma(s) - i * std::log(p.beta)) * p.alpha *
             p.theta / Lt * o.value;
    }
  } catch (const NonConvergence&) {
    return residual_moment_quadrature(p, r, t);
  }
  long double sum = 0.0L;
  double Cri = 1.0;  // C(r, i)
  for (int i = 0; i <= r; ++i) {
    const double tp = (i == r) ? 1.0 : std::exp((r - i) * std::log(t));
    const double coef = (((r - i) & 1) ? -1.0 : 1.0) * Cri * tp;
    sum += (long double)coef * J[i];
    Cri *= (double)(r - i) / (double)(i + 1);
  }
  return (double)sum / S;
}

double residual_moment_quadrature(const EwlParams& p, int r, double t) {
  validate(p);
  if (r < 1) throw std::domain_error("residual_moment_quadrature: order must be >= 1");
  if (t < 0) throw std::domain_error("residual_moment_quadrature: t must be >= 0");
  const double S = (t > 0) ? survival(p, t) : 1.0;
  if (!(S > 0.0)) {
    throw std::domain_error("residual_moment_quadrature: survival underflows at t");
  }
  auto f = [&](double y) {
    const double lp = log_pdf(p, y);
    if (lp < -720.0) return 0.0;
    return std::exp(lp + r * std::log(y - t));
  };
  std::vector<double> pts{t};
  for (double q : quantile_points(p, t, std::numeric_limits<double>::infinity()))
    pts.push_back(q);
  if (pts.size() == 1) pts.push_back(2.0 * t + 1.0);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  double total = q.value, err = q.est_error;
  extend_tail(f, pts.back(), &total, &err);
  return total / S;
}

double mean_residual_life(const EwlParams& p, double t,
                          const SeriesPolicy& pol) {
  return residual_moment(p, 1, t, pol);
}

double reversed_residual_moment(const EwlParams& p, int r, double t,
                                const SeriesPolicy& pol) {
  validate(p);
  if (r < 1) throw std::domain_error("reversed_residual_moment: order must be >= 1");
  if (!(t > 0)) throw std::domain_error("reversed_residual_moment: t must be > 0");
  const double F = cdf(p, t);
  if (!(F > 0.0)) {
    throw std::domain_error("reversed_residual_moment: cdf underflows at t");
  }
  const double wt = wkernel_at(p, t);
  const double Lt = -std::log1p(-p.theta);
  std::vector<double> I(r + 1, 0.0);
  I[0] = F;
  try {
    for (int i = 1; i <= r; ++i) {
      const double s = 1.0 + (double)i / p.gamma_;
      const OuterSum o = theta_power_sum(p, pol, [&](double m) {
        return eval_kernel(m, s, 1.0, wt, InnerMode::Lower, pol);
      });
      I[i] = std::exp(log_gamma(s) - i * std::log(p.beta)) * p.alpha *
             p.theta / Lt * o.value;
    }
  } catch (const NonConvergence&) {
    return reversed_residual_moment_quadrature(p, r, t);
  }
  long double sum = 0.0L;
  double Cri = 1.0;
  for (int i = 0; i <= r; ++i) {
    const double coef = ((i & 1) ? -1.0 : 1.0) * Cri *
                        std::exp((r - i) * std::log(t));
    sum += (long double)coef * I[i];
    Cri *= (double)(r - i) / (double)(i + 1);
  }
  return (double)sum / F;
}

double reversed_residual_moment_quadrature(const EwlParams& p, int r,
                                           double t) {
  validate(p);
  if (r < 1) throw std::domain_error("reversed_residual_moment_quadrature: order must be >= 1");
  if (!(t > 0)) throw std::domain_error("reversed_residual_moment_quadrature: t must be > 0");
  const double F = cdf(p, t);
  if (!(F > 0.0)) {
    throw std::domain_error("reversed_residual_moment_quadrature: cdf underflows at t");
  }
  const double ag = p.alpha * p.gamma_;
  const double c0 = pdf_head_coeff(p);
  const double y0 = std::min(head_cutoff(p), 0.5 * t);
  // below y0 the integrand is (t-y)^r c0 y^{ag-1} ~ t^r c0 y^{ag-1}
  double total = std::exp(r * std::log(t)) * c0 *
                 std::exp(ag * std::log(y0)) / ag;
  auto f = [&](double y) {
    const double lp = log_pdf(p, y);
    if (lp < -720.0) return 0.0;
    return std::exp(lp + r * std::log(t - y));
  };
  std::vector<double> pts = dyadic_points(y0, t, 4.0);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  total += q.value;
  return total / F;
}

namespace {

// I(x) = int_0^x y f dy by the lower-kernel series.
double partial_mean_series(const EwlParams& p, double x,
                           const SeriesPolicy& pol) {
  const double wx = wkernel_at(p, x);
  const double s = 1.0 + 1.0 / p.gamma_;
  const OuterSum o = theta_power_sum(p, pol, [&](double m) {
    return eval_kernel(m, s, 1.0, wx, InnerMode::Lower, pol);
  });
  const double Lt = -std::log1p(-p.theta);
  return std::exp(log_gamma(s) - std::log(p.beta)) * p.alpha * p.theta / Lt *
         o.value;
}

}  // namespace

std::pair<double, double> mean_deviations(const EwlParams& p,
                                          const SeriesPolicy& pol) {
  validate(p);
  try {
    const double mu = raw_moment(p, 1, pol).value;
    const double M = quantile(p, 0.5);
    const double d1 =
        2.0 * mu * cdf(p, mu) - 2.0 * partial_mean_series(p, mu, pol);
    const double d2 = mu - 2.0 * partial_mean_series(p, M, pol);
    return {d1, d2};
  } catch (const NonConvergence&) {
    return mean_deviations_quadrature(p);
  }
}

std::pair<double, double> mean_deviations_quadrature(const EwlParams& p) {
  validate(p);
  const double mu = raw_moment_quadrature(p, 1);
  const double M = quantile(p, 0.5);
  const double d1 = 2.0 * mu * cdf(p, mu) - 2.0 * partial_mean_quad(p, mu);
  const double d2 = mu - 2.0 * partial_mean_quad(p, M);
  return {d1, d2};
}

double bonferroni(const EwlParams& p, double x, const SeriesPolicy& pol) {
  validate(p);
  if (!(x > 0)) throw std::domain_error("bonferroni: x must be > 0");
  try {
    const double mu = raw_moment(p, 1, pol).value;
    return partial_mean_series(p, x, pol) / (mu * cdf(p, x));
  } catch (const NonConvergence&) {
    return bonferroni_quadrature(p, x);
  }
}

double lorenz(const EwlParams& p, double x, const SeriesPolicy& pol) {
  validate(p);
  if (!(x > 0)) throw std::domain_error("lorenz: x must be > 0");
  try {
    const double mu = raw_moment(p, 1, pol).value;
    return partial_mean_series(p, x, pol) / mu;
  } catch (const NonConvergence&) {
    return lorenz_quadrature(p, x);
  }
}

double bonferroni_quadrature(const EwlParams& p, double x) {
  validate(p);
  if (!(x > 0)) throw std::domain_error("bonferroni_quadrature: x must be > 0");
  return partial_mean_quad(p, x) / (raw_moment_quadrature(p, 1) * cdf(p, x));
}

double lorenz_quadrature(const EwlParams& p, double x) {
  validate(p);
  if (!(x > 0)) throw std::domain_error("lorenz_quadrature: x must be > 0");
  return partial_mean_quad(p, x) / raw_moment_quadrature(p, 1);
}

double scaled_ttt(const EwlParams& p, double t, const SeriesPolicy& pol) {
  validate(p);
  if (!(t >= 0)) throw std::domain_error("scaled_ttt: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double wt = wkernel_at(p, t);
  const double s = 1.0 / p.gamma_;
  const double Lt = -std::log1p(-p.theta);
  // K_om(alpha k, s, wt) grows to K_max = wt^s / Gamma(s+1) as k -> inf,
  // so the remainder after k terms is below K_max theta^{k+1}/((k+1)(1-theta)).
  const double K_max = std::exp(s * std::log(wt) - log_gamma(s + 1.0));
  long double sum = 0.0L;
  double tpow = p.theta;
  bool done = false;
  for (int k = 1; k < pol.max_terms_per_index; ++k) {
    const InnerVal v =
        eval_kernel(p.alpha * k, s, 1.0, wt, InnerMode::OneMinus, pol);
    sum += (long double)(tpow / k) * v.value;
    const double tail = K_max * tpow * p.theta / ((k + 1) * (1.0 - p.theta));
    tpow *= p.theta;
    if (tail <= pol.rel_tol * (double)fabsl(sum) + pol.abs_tol) {
      done = true;
      break;
    }
  }
  if (!done) return scaled_ttt_quadrature(p, t);
  const double integral_S =
      std::exp(log_gamma(s)) / (p.gamma_ * p.beta * Lt) * (double)sum;
  return integral_S / raw_moment(p, 1, pol).value;
}

double scaled_ttt_quadrature(const EwlParams& p, double t) {
  validate(p);
  if (!(t >= 0)) throw std::domain_error("scaled_ttt_quadrature: t must be >= 0");
  if (t == 0.0) return 0.0;
  auto S = [&](double y) { return survival(p, y); };
  std::vector<double> pts{0.0};
  for (double q : quantile_points(p, 0.0, t)) pts.push_back(q);
  pts.push_back(t);
  const QuadResult q = integrate_segments(S, pts, 1e-11, 1e-300, 400);
  return q.value / raw_moment_quadrature(p, 1);
}

double gini(const EwlParams& p, const SeriesPolicy& pol) {
  validate(p);
  const double mu = raw_moment(p, 1, pol).value;
  auto S2 = [&](double y) {
    const double s = survival(p, y);
    return s * s;
  };
  std::vector<double> pts{0.0};
  const double hi = quantile(p, 1.0 - 1e-14);
  for (double q : quantile_points(p, 0.0, hi)) pts.push_back(q);
  pts.push_back(hi);
  const QuadResult q = integrate_segments(S2, pts, 1e-11, 1e-300, 400);
  // int_hi^inf S^2 <= S(hi) * mu = 1e-14 mu: inside tolerance, count as error
  return 1.0 - (q.value) / mu;
}

double renyi_entropy(const EwlParams& p, double r, const SeriesPolicy& pol) {
  validate(p);
  if (!(r > 0) || r == 1.0) {
    throw std::domain_error("renyi_entropy: order must be positive and != 1");
  }
  const double s_r = (r * (p.gamma_ - 1.0) + 1.0) / p.gamma_;
  if (!(s_r > 0)) {
    throw std::domain_error("renyi_entropy: diverges, r(gamma-1)+1 must be positive");
  }
  if (!(r * (p.alpha * p.gamma_ - 1.0) + 1.0 > 0)) {
    throw std::domain_error("renyi_entropy: diverges, r(alpha gamma-1)+1 must be positive");
  }
  const double Lt = -std::log1p(-p.theta);
  long double sum = 0.0L;
  double w = 1.0;  // Gamma(r+j)/(Gamma(r) j!) theta^j
  bool done = false;
  for (int j = 0; j < pol.max_terms_per_index; ++j) {
    const double m = p.alpha * (r + j) - r;
    const InnerVal v = eval_kernel(m, s_r, r, 0.0, InnerMode::Plain, pol);
    const double term = w * v.value;
    sum += term;
    const double rho = p.theta * (r + j) / (j + 1.0);  // next/current weight
    w *= rho;
    if (rho < 1.0) {
      // terms shrink at least geometrically once rho < 1 (A_j decreasing)
      const double tail = term * rho / (1.0 - rho);
      if (tail <= pol.rel_tol * (double)fabsl(sum) + pol.abs_tol) {
        done = true;
        break;
      }
    }
  }
  if (!done) return renyi_entropy_quadrature(p, r);
  const double log_integral = r * std::log(p.alpha * p.theta / Lt) +
                              (r - 1.0) * std::log(p.gamma_ * p.beta) +
                              log_gamma(s_r) + std::log((double)sum);
  return log_integral / (1.0 - r);
}

double renyi_entropy_quadrature(const EwlParams& p, double r) {
  validate(p);
  if (!(r > 0) || r == 1.0) {
    throw std::domain_error("renyi_entropy_quadrature: order must be positive and != 1");
  }
  const double e_head = r * (p.alpha * p.gamma_ - 1.0) + 1.0;
  const double s_r = (r * (p.gamma_ - 1.0) + 1.0) / p.gamma_;
  if (!(s_r > 0) || !(e_head > 0)) {
    throw std::domain_error("renyi_entropy_quadrature: integral diverges at this order");
  }
  const double c0 = pdf_head_coeff(p);
  const double y0 = std::min(head_cutoff(p), 0.5 * quantile(p, 1e-6));
  double total = std::exp(r * std::log(c0) + e_head * std::log(y0)) / e_head;
  auto f = [&](double y) {
    const double e = r * log_pdf(p, y);
    return (e > -745.0) ? std::exp(e) : 0.0;
  };
  std::vector<double> pts = dyadic_points(y0, quantile(p, 1e-6), 4.0);
  const double hi = quantile(p, 1.0 - 1e-14);
  for (double q : quantile_points(p, pts.back(), hi)) pts.push_back(q);
  pts.push_back(hi);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  total += q.value;
  double err = q.est_error;
  extend_tail(f, hi, &total, &err);
  return std::log(total) / (1.0 - r);
}

double shannon_entropy(const EwlParams& p) {
  validate(p);
  const double ag = p.alpha * p.gamma_;
  const double c0 = pdf_head_coeff(p);
  const double y0 = std::min(head_cutoff(p), 0.5 * quantile(p, 1e-6));
  // head: -int_0^{y0} c0 y^{ag-1} (log c0 + (ag-1) log y) dy
  const double t1 = c0 * std::exp(ag * std::log(y0)) / ag;
  double total =
      -t1 * (std::log(c0) + (ag - 1.0) * std::log(y0) - (ag - 1.0) / ag);
  auto f = [&](double y) {
    const double lp = log_pdf(p, y);
    if (lp < -720.0) return 0.0;
    return -std::exp(lp) * lp;
  };
  std::vector<double> pts = dyadic_points(y0, quantile(p, 1e-6), 4.0);
  const double hi = quantile(p, 1.0 - 1e-14);
  for (double q : quantile_points(p, pts.back(), hi)) pts.push_back(q);
  pts.push_back(hi);
  const QuadResult q = integrate_segments(f, pts, 1e-11, 1e-300, 400);
  total += q.value;
  double err = q.est_error;
  extend_tail(f, hi, &total, &err);
  return total;
}

}  // namespace ewl
