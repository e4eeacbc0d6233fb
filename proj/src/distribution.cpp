#include "ewl/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ewl {

namespace {

// Shared per-point quantities. lw = gamma log(beta y), w = (beta y)^gamma,
// u = e^{-w}, G = 1 - u (Weibull kernel cdf), log_G = log G,
// log_Ga = alpha log G.
struct Kernel {
  double lw;
  double w;
  double u;
  double log_G;
  double log_Ga;  // log G^alpha
  double Ga;      // G^alpha
};

Kernel kernel(const EwlParams& p, double y) {
  Kernel k;
  // exp(gamma(log beta + log y)) instead of pow: survives beta*y values
  // whose direct power would round through subnormals prematurely.
  k.lw = p.gamma_ * (std::log(p.beta) + std::log(y));
  k.w = std::exp(k.lw);
  k.u = std::exp(-k.w);
  // G = -expm1(-w) keeps full precision for small w; below 1e-8 the series
  // log G = lw + log1p(-w/2) + O(w^2) carries full double precision and,
  // unlike log(-expm1(-w)), survives w underflowing to zero.
  if (k.w < 1e-8) {
    k.log_G = k.lw + std::log1p(-0.5 * k.w);
  } else if (k.w < 1e-3) {
    k.log_G = std::log(-std::expm1(-k.w));
  } else {
    k.log_G = std::log1p(-k.u);
  }
  k.log_Ga = p.alpha * k.log_G;
  k.Ga = std::exp(k.log_Ga);
  return k;
}

// lw - w + (alpha-1) log G without catastrophic cancellation. For tiny w,
// lw and (alpha-1) log_G are opposing values of order |lw| (which can reach
// 1e27 at extreme gamma), so group them as alpha lw + (alpha-1)(log_G - lw)
// where log_G - lw = log1p(-w/2) is the exact series correction. Elsewhere
// lw is moderate (w >= 1e-8 and exp(lw) finite) and the direct form is safe.
double log_weibull_core(const EwlParams& p, const Kernel& k) {
  if (k.w < 1e-8) {
    return p.alpha * k.lw + (p.alpha - 1.0) * std::log1p(-0.5 * k.w) - k.w;
  }
  return k.lw - k.w + (p.alpha - 1.0) * k.log_G;
}

}  // namespace

void validate(const EwlParams& p) {
  if (!(p.alpha > 0) || !std::isfinite(p.alpha)) {
    throw std::domain_error("EwlParams: alpha must be positive");
  }
  if (!(p.beta > 0) || !std::isfinite(p.beta)) {
    throw std::domain_error("EwlParams: beta must be positive");
  }
  if (!(p.gamma_ > 0) || !std::isfinite(p.gamma_)) {
    throw std::domain_error("EwlParams: gamma must be positive");
  }
  if (!(p.theta > 0 && p.theta < 1)) {
    throw std::domain_error("EwlParams: theta must lie in (0,1)");
  }
}

double log_pdf(const EwlParams& p, double y) {
  validate(p);
  if (!(y > 0)) throw std::domain_error("log_pdf: y must be positive");
  const Kernel k = kernel(p, y);
  const double Ltilde = -std::log1p(-p.theta);
  // log f = log(alpha theta gamma) - log y + [lw - w + (alpha-1) log G]
  //         - log(1 - theta G^alpha) - log Ltilde,
  // with gamma log beta + (gamma-1) log y folded into lw - log y so extreme
  // gamma never splits into a pair of huge cancelling terms.
  return std::log(p.alpha) + std::log(p.theta) + std::log(p.gamma_) -
         std::log(y) + log_weibull_core(p, k) -
         std::log1p(-p.theta * k.Ga) - std::log(Ltilde);
}

double pdf(const EwlParams& p, double y) { return std::exp(log_pdf(p, y)); }

double cdf(const EwlParams& p, double y) {
  validate(p);
  if (!(y > 0)) return 0.0;
  const Kernel k = kernel(p, y);
  const double F = std::log1p(-p.theta * k.Ga) / std::log1p(-p.theta);
  // The direct ratio carries a couple of ulps of noise, which complements
  // taken downstream would amplify once F is near 1; the survival route
  // has no cancellation there, so 1 - S rounds the right tail correctly.
  return (F > 0.5) ? 1.0 - survival(p, y) : F;
}

double survival(const EwlParams& p, double y) {
  validate(p);
  if (!(y > 0)) return 1.0;
  const Kernel k = kernel(p, y);
  // 1 - F without cancellation: S = log1p(-theta(1-G^a)/(1-theta G^a)) /
  // log(1-theta); 1-G^a = -expm1(alpha log G) keeps the tail accurate.
  const double one_minus_Ga = -std::expm1(k.log_Ga);
  const double num = std::log1p(-p.theta * one_minus_Ga /
                                (1.0 - p.theta * k.Ga));
  return num / std::log1p(-p.theta);
}

double hazard(const EwlParams& p, double y) {
  validate(p);
  if (!(y > 0)) throw std::domain_error("hazard: y must be positive");
  const double lw = p.gamma_ * (std::log(p.beta) + std::log(y));
  // Beyond w ~ 600 both pdf and survival underflow; the exact ratio tends
  // to the Weibull-kernel hazard gamma beta^gamma y^{gamma-1} (rel. error
  // O(e^{-w})), so switch to that form.
  if (lw > std::log(600.0)) {
    return p.gamma_ * std::exp(lw - std::log(y));
  }
  const double s = survival(p, y);
  if (s <= 0 || !std::isfinite(s)) {
    return p.gamma_ * std::exp(lw - std::log(y));
  }
  return pdf(p, y) / s;
}

double reversed_hazard(const EwlParams& p, double y) {
  validate(p);
  if (!(y > 0)) throw std::domain_error("reversed_hazard: y must be positive");
  const double F = cdf(p, y);
  return pdf(p, y) / F;
}

double quantile(const EwlParams& p, double xi) {
  validate(p);
  if (!(xi > 0 && xi < 1)) {
    throw std::domain_error("quantile: xi must lie in (0,1)");
  }
  const double Ltilde = -std::log1p(-p.theta);
  // inner = (1 - (1-theta)^xi)/theta; for xi -> 1 compute its complement
  // 1 - inner = (1-theta) expm1((1-xi) Ltilde)/theta exactly.
  const double one_minus_inner =
      (1.0 - p.theta) * std::expm1((1.0 - xi) * Ltilde) / p.theta;
  double w;
  if (one_minus_inner > 1e-3) {
    const double inner = 1.0 - one_minus_inner;
    w = -std::log1p(-std::pow(inner, 1.0 / p.alpha));
  } else {
    // v = inner^{1/alpha} near 1: 1 - v = -expm1(log1p(-one_minus_inner)/alpha)
    const double one_minus_v =
        -std::expm1(std::log1p(-one_minus_inner) / p.alpha);
    w = -std::log(one_minus_v);
  }
  return std::exp(std::log(w) / p.gamma_ - std::log(p.beta));
}

HazardLimit hazard_limits(const EwlParams& p) {
  validate(p);
  HazardLimit h;
  if (p.gamma_ < 1.0) {
    h.at_zero_kind = (p.alpha <= 1.0) ? LimitKind::Infinite : LimitKind::Zero;
    h.at_infinity_kind = LimitKind::Zero;
  } else if (p.gamma_ == 1.0) {
    if (p.alpha < 1.0) {
      h.at_zero_kind = LimitKind::Infinite;
    } else if (p.alpha == 1.0) {
      h.at_zero_kind = LimitKind::Finite;
      h.at_zero = -p.theta * p.beta / std::log1p(-p.theta);
    } else {
      h.at_zero_kind = LimitKind::Zero;
    }
    h.at_infinity_kind = LimitKind::Finite;
    h.at_infinity = p.beta;
  } else {
    h.at_zero_kind = LimitKind::Zero;
    h.at_infinity_kind = LimitKind::Infinite;
  }
  return h;
}

HazardShape hazard_shape(const EwlParams& p) {
  // Finite differences of log h on a quantile-spaced grid. A diagnostic
  // label, not a proof: ties and multiple interior extrema map to Other.
  const int m = 400;
  double prev = 0.0;
  int sign_changes = 0;
  int first_sign = 0, last_sign = 0;
  for (int i = 0; i <= m; ++i) {
    const double q = 1e-6 + (1.0 - 2e-6) * (double)i / m;
    const double h = std::log(hazard(p, quantile(p, q)));
    if (i > 0) {
      const int s = (h > prev) ? 1 : (h < prev ? -1 : 0);
      if (s != 0) {
        if (first_sign == 0) first_sign = s;
        if (last_sign != 0 && s != last_sign) ++sign_changes;
        last_sign = s;
      }
    }
    prev = h;
  }
  if (sign_changes == 0 && first_sign > 0) return HazardShape::Increasing;
  if (sign_changes == 0 && first_sign < 0) return HazardShape::Decreasing;
  if (sign_changes == 1 && first_sign > 0) return HazardShape::Unimodal;
  if (sign_changes == 1 && first_sign < 0) return HazardShape::Bathtub;
  return HazardShape::Other;
}

namespace {

// Uniform in (0,1): 53 random bits centered in the cell, never 0 or 1.
double uniform01(std::mt19937_64& eng) {
  return ((double)(eng() >> 11) + 0.5) * 0x1p-53;
}

// Exponentiated-Weibull quantile (the theta -> 0 kernel of `quantile`).
double ew_quantile(const EwlParams& p, double v) {
  const double w = -std::log1p(-std::pow(v, 1.0 / p.alpha));
  return std::exp(std::log(w) / p.gamma_ - std::log(p.beta));
}

}  // namespace

int sample_logarithmic(double theta, std::mt19937_64& eng) {
  // Sequential search on the pmf theta^k/(k Ltilde); E[N] is finite for
  // theta < 1 so the loop terminates quickly in the supported domain.
  const double Ltilde = -std::log1p(-theta);
  const double u = uniform01(eng);
  double pk = theta / Ltilde;
  double cum = pk;
  int k = 1;
  while (u > cum && k < 100000000) {
    pk *= theta * (double)k / (double)(k + 1);
    cum += pk;
    ++k;
  }
  return k;
}

std::vector<double> sample_inverse(const EwlParams& p, int n,
                                   std::uint64_t seed) {
  validate(p);
  if (n < 1) throw std::domain_error("sample_inverse: n must be >= 1");
  std::mt19937_64 eng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(quantile(p, uniform01(eng)));
  return out;
}

std::vector<double> sample_compound(const EwlParams& p, int n,
                                    std::uint64_t seed) {
  validate(p);
  if (n < 1) throw std::domain_error("sample_compound: n must be >= 1");
  std::mt19937_64 eng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int N = sample_logarithmic(p.theta, eng);
    double best = 0.0;
    for (int j = 0; j < N; ++j) {
      best = std::fmax(best, ew_quantile(p, uniform01(eng)));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace ewl
