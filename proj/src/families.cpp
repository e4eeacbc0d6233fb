#include "ewl/families.hpp"

#include <cmath>
#include <stdexcept>

namespace ewl {

FamilyConstraints constraints(Family f) {
  switch (f) {
    case Family::Ewl:
      return {};
    case Family::Cwl:
      return {1.0, std::nullopt, false};
    case Family::Gel:
      return {std::nullopt, 1.0, false};
    case Family::Cel:
      return {1.0, 1.0, false};
    case Family::Erl:
      return {std::nullopt, 2.0, false};
    case Family::Rl:
      return {1.0, 2.0, false};
    case Family::Ew:
      return {std::nullopt, std::nullopt, true};
    case Family::Weibull:
      return {1.0, std::nullopt, true};
    case Family::Ge:
      return {std::nullopt, 1.0, true};
  }
  throw std::logic_error("constraints: unknown family");
}

int n_free_params(Family f) {
  const FamilyConstraints c = constraints(f);
  int n = 4;
  if (c.alpha) --n;
  if (c.gamma_) --n;
  if (c.theta_limit_zero) --n;
  return n;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Ewl: return "ewl";
    case Family::Cwl: return "cwl";
    case Family::Gel: return "gel";
    case Family::Cel: return "cel";
    case Family::Erl: return "erl";
    case Family::Rl: return "rl";
    case Family::Ew: return "ew";
    case Family::Weibull: return "weibull";
    case Family::Ge: return "ge";
  }
  throw std::logic_error("family_name: unknown family");
}

std::optional<Family> family_from_name(const std::string& name) {
  static const Family all[] = {Family::Ewl, Family::Cwl, Family::Gel,
                               Family::Cel, Family::Erl, Family::Rl,
                               Family::Ew,  Family::Weibull, Family::Ge};
  for (Family f : all) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

EwlParams restrict_params(const EwlParams& p, Family f) {
  const FamilyConstraints c = constraints(f);
  EwlParams q = p;
  if (c.alpha) q.alpha = *c.alpha;
  if (c.gamma_) q.gamma_ = *c.gamma_;
  if (c.theta_limit_zero) q.theta = kThetaEps;
  return q;
}

bool is_nested_in(Family null_family, Family alt_family) {
  const FamilyConstraints n = constraints(null_family);
  const FamilyConstraints a = constraints(alt_family);
  // every pin of the alternative must be shared by the null...
  if (a.alpha && (!n.alpha || *n.alpha != *a.alpha)) return false;
  if (a.gamma_ && (!n.gamma_ || *n.gamma_ != *a.gamma_)) return false;
  if (a.theta_limit_zero && !n.theta_limit_zero) return false;
  // ...and the null must pin strictly more.
  return n_free_params(null_family) < n_free_params(alt_family);
}

namespace {

void validate_ew(const EwlParams& p) {
  if (!(p.alpha > 0) || !(p.beta > 0) || !(p.gamma_ > 0)) {
    throw std::domain_error("exponentiated Weibull: parameters must be positive");
  }
}

// log G = log(1 - e^{-w}) for w = exp(lw); the series fallback below 1e-8
// carries full precision and survives w underflowing to zero.
double ew_log_G(double lw, double w) {
  if (w < 1e-8) return lw + std::log1p(-0.5 * w);
  if (w < 1e-3) return std::log(-std::expm1(-w));
  return std::log1p(-std::exp(-w));
}

// Exponentiated Weibull log-density: the exact theta -> 0 limit family.
double ew_log_pdf(const EwlParams& p, double y) {
  validate_ew(p);
  if (!(y > 0)) throw std::domain_error("log_pdf: y must be positive");
  const double lw = p.gamma_ * (std::log(p.beta) + std::log(y));
  const double w = std::exp(lw);
  // Group lw - w + (alpha-1) log G so extreme gamma never splits into huge
  // cancelling terms; for tiny w use log_G - lw = log1p(-w/2) exactly.
  const double core =
      (w < 1e-8)
          ? p.alpha * lw + (p.alpha - 1.0) * std::log1p(-0.5 * w) - w
          : lw - w + (p.alpha - 1.0) * ew_log_G(lw, w);
  return std::log(p.alpha) + std::log(p.gamma_) - std::log(y) + core;
}

double ew_cdf(const EwlParams& p, double y) {
  validate_ew(p);
  if (!(y > 0)) return 0.0;
  const double lw = p.gamma_ * (std::log(p.beta) + std::log(y));
  const double w = std::exp(lw);
  return std::exp(p.alpha * ew_log_G(lw, w));
}

}  // namespace

double family_log_pdf(Family f, const EwlParams& p, double y) {
  const EwlParams q = restrict_params(p, f);
  if (constraints(f).theta_limit_zero) return ew_log_pdf(q, y);
  return log_pdf(q, y);
}

double family_cdf(Family f, const EwlParams& p, double y) {
  const EwlParams q = restrict_params(p, f);
  if (constraints(f).theta_limit_zero) return ew_cdf(q, y);
  return cdf(q, y);
}

double submodel_pdf_closed(Family f, const EwlParams& p, double x) {
  if (!(x > 0)) throw std::domain_error("submodel_pdf_closed: x must be positive");
  if (!(p.theta > 0 && p.theta < 1) || !(p.beta > 0)) {
    throw std::domain_error("submodel_pdf_closed: invalid parameters");
  }
  const double Lt = -std::log1p(-p.theta);
  switch (f) {
    case Family::Cwl: {
      // f(x) = theta gamma beta^gamma x^{gamma-1} e^{-(beta x)^gamma}
      //        / (Ltilde (1 - theta + theta e^{-(beta x)^gamma}))
      const double u = std::exp(-std::pow(p.beta * x, p.gamma_));
      return p.theta * p.gamma_ * std::pow(p.beta, p.gamma_) *
             std::pow(x, p.gamma_ - 1.0) * u /
             (Lt * (1.0 - p.theta + p.theta * u));
    }
    case Family::Gel: {
      // f(x) = alpha theta beta e^{-beta x} (1-e^{-beta x})^{alpha-1}
      //        / (Ltilde (1 - theta (1-e^{-beta x})^alpha))
      const double G = 1.0 - std::exp(-p.beta * x);
      const double Ga = std::pow(G, p.alpha);
      return p.alpha * p.theta * p.beta * std::exp(-p.beta * x) *
             std::pow(G, p.alpha - 1.0) / (Lt * (1.0 - p.theta * Ga));
    }
    case Family::Cel: {
      // f(x) = theta beta e^{-beta x} / (Ltilde (1 - theta + theta e^{-beta x}))
      const double u = std::exp(-p.beta * x);
      return p.theta * p.beta * u / (Lt * (1.0 - p.theta + p.theta * u));
    }
    default:
      throw std::domain_error("submodel_pdf_closed: no dedicated closed form for this family");
  }
}

double submodel_cdf_closed(Family f, const EwlParams& p, double x) {
  if (!(x > 0)) return 0.0;
  if (!(p.theta > 0 && p.theta < 1) || !(p.beta > 0)) {
    throw std::domain_error("submodel_cdf_closed: invalid parameters");
  }
  const double denom = std::log(1.0 - p.theta);
  switch (f) {
    case Family::Cwl: {
      const double u = std::exp(-std::pow(p.beta * x, p.gamma_));
      return std::log(1.0 - p.theta + p.theta * u) / denom;
    }
    case Family::Gel: {
      const double G = 1.0 - std::exp(-p.beta * x);
      return std::log(1.0 - p.theta * std::pow(G, p.alpha)) / denom;
    }
    case Family::Cel: {
      const double u = std::exp(-p.beta * x);
      return std::log(1.0 - p.theta + p.theta * u) / denom;
    }
    default:
      throw std::domain_error("submodel_cdf_closed: no dedicated closed form for this family");
  }
}

double submodel_hazard_closed(Family f, const EwlParams& p, double x) {
  if (!(x > 0)) {
    throw std::domain_error("submodel_hazard_closed: x must be positive");
  }
  if (!(p.theta > 0 && p.theta < 1) || !(p.beta > 0)) {
    throw std::domain_error("submodel_hazard_closed: invalid parameters");
  }
  // h(x) = theta K(x) / ((1 - theta G^alpha) log((1 - theta G^alpha)/(1 - theta)))
  // with K the kernel factor of the pdf display and the survival written in
  // its log form, which stays cancellation-free on the right tail where the
  // complement 1 - F would shed digits.
  switch (f) {
    case Family::Cwl: {
      const double u = std::exp(-std::pow(p.beta * x, p.gamma_));
      const double K = p.gamma_ * std::pow(p.beta, p.gamma_) *
                       std::pow(x, p.gamma_ - 1.0) * u;
      return p.theta * K /
             ((1.0 - p.theta + p.theta * u) *
              std::log1p(p.theta * u / (1.0 - p.theta)));
    }
    case Family::Gel: {
      const double G = 1.0 - std::exp(-p.beta * x);
      const double K = p.alpha * p.beta * std::exp(-p.beta * x) *
                       std::pow(G, p.alpha - 1.0);
      const double one_minus_Ga = -std::expm1(p.alpha * std::log(G));
      return p.theta * K /
             ((1.0 - p.theta * std::pow(G, p.alpha)) *
              std::log1p(p.theta * one_minus_Ga / (1.0 - p.theta)));
    }
    case Family::Cel: {
      const double u = std::exp(-p.beta * x);
      return p.theta * p.beta * u /
             ((1.0 - p.theta + p.theta * u) *
              std::log1p(p.theta * u / (1.0 - p.theta)));
    }
    default:
      throw std::domain_error(
          "submodel_hazard_closed: no dedicated closed form for this family");
  }
}

double submodel_mean(Family f, const EwlParams& p, const SeriesPolicy& pol) {
  if (!(p.theta > 0 && p.theta < 1) || !(p.beta > 0)) {
    throw std::domain_error("submodel_mean: invalid parameters");
  }
  const double Lt = -std::log1p(-p.theta);
  switch (f) {
    case Family::Cwl: {
      // mu = Gamma(1+1/gamma)/(beta Ltilde) * theta sum_n theta^n A_n with
      // A_n = sum_{j=0}^n (-1)^j C(n,j) (j+1)^{-(1+1/gamma)}: exact integer
      // binomial sums. C(n, n/2) grows like 2^n, so the evaluation is exact
      // only while the binomials stay well inside the 64-bit mantissa; the
      // cancellation estimate below turns silent precision loss into a throw.
      if (!(p.gamma_ > 0)) throw std::domain_error("submodel_mean: invalid parameters");
      const double s = 1.0 + 1.0 / p.gamma_;
      long double sum = 0.0L;
      double tpow = 1.0;
      double cancel = 0.0;
      for (int n = 0;; ++n) {
        if (n >= pol.max_terms_per_index) {
          throw NonConvergence("submodel_mean: series exhausted its term budget");
        }
        long double A = 0.0L, C = 1.0L, maxterm = 0.0L;
        for (int j = 0; j <= n; ++j) {
          const long double t = C * (long double)std::pow(j + 1.0, -s);
          A += (j & 1) ? -t : t;
          maxterm = std::max(maxterm, fabsl(t));
          C = C * (long double)(n - j) / (long double)(j + 1);
        }
        sum += (long double)tpow * A;
        cancel += tpow * (double)maxterm * (n + 1) * 1.1e-19;
        const double tail = tpow * p.theta * (double)A / (1.0 - p.theta);
        tpow *= p.theta;
        if (tail <= pol.rel_tol * (double)sum + pol.abs_tol) break;
      }
      if (cancel > 1e-9 * (double)sum) {
        throw NonConvergence("submodel_mean: binomial sums lose precision at this theta");
      }
      return std::exp(log_gamma(s)) / (p.beta * Lt) * p.theta * (double)sum;
    }
    case Family::Gel: {
      // mu = (alpha theta/(beta Ltilde)) sum_n theta^n
      //      (psi(alpha(n+1)+1) - psi(1)) / (alpha(n+1)): all terms positive.
      if (!(p.alpha > 0)) throw std::domain_error("submodel_mean: invalid parameters");
      const double psi1 = digamma(1.0);
      long double sum = 0.0L;
      double tpow = 1.0;
      for (int n = 0;; ++n) {
        if (n >= pol.max_terms_per_index) {
          throw NonConvergence("submodel_mean: series exhausted its term budget");
        }
        const double a_n = p.alpha * (n + 1);
        const double term = (digamma(a_n + 1.0) - psi1) / a_n;
        sum += (long double)(tpow * term);
        // psi grows, but only logarithmically: bound the tail by the next
        // term over the geometric ratio adjusted for the slow psi growth.
        const double tail = tpow * p.theta * term * 2.0 / (1.0 - p.theta);
        tpow *= p.theta;
        if (tail <= pol.rel_tol * (double)sum + pol.abs_tol) break;
      }
      return p.alpha * p.theta / (p.beta * Lt) * (double)sum;
    }
    case Family::Cel: {
      // mu = (1/(beta Ltilde)) sum_{m>=1} theta^m H_m / m with harmonic H_m.
      long double sum = 0.0L;
      double H = 0.0;
      double tpow = 1.0;
      for (int m = 1;; ++m) {
        if (m >= pol.max_terms_per_index) {
          throw NonConvergence("submodel_mean: series exhausted its term budget");
        }
        H += 1.0 / m;
        tpow *= p.theta;
        const double term = tpow * H / m;
        sum += (long double)term;
        const double tail = term * p.theta / (1.0 - p.theta) * 2.0;
        if (tail <= pol.rel_tol * (double)sum + pol.abs_tol) break;
      }
      return (double)sum / (p.beta * Lt);
    }
    default:
      throw std::domain_error("submodel_mean: no dedicated series for this family");
  }
}

}  // namespace ewl
