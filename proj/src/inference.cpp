#include "ewl/inference.hpp"

#include "ewl/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ewl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-observation kernel pieces shared by loglik and score.
struct Obs {
  double log_y;
  double lw;     // gamma (log beta + log y)
  double w;      // (beta y)^gamma
  double log_G;  // log(1 - e^{-w})
  double Ga;     // G^alpha
  double r;      // w e^{-w} / G, computed in log space
};

Obs observe(const EwlParams& p, double y) {
  Obs o;
  o.log_y = std::log(y);
  o.lw = p.gamma_ * (std::log(p.beta) + o.log_y);
  o.w = std::exp(o.lw);
  const double u = std::exp(-o.w);
  // Series fallback below 1e-8 survives w underflowing to zero on extreme
  // gamma excursions; log(-expm1(-w)) would collapse to log(0) there.
  o.log_G = (o.w < 1e-8)   ? o.lw + std::log1p(-0.5 * o.w)
            : (o.w < 1e-3) ? std::log(-std::expm1(-o.w))
                           : std::log1p(-u);
  o.Ga = std::exp(p.alpha * o.log_G);
  o.r = std::exp(o.lw - o.w - o.log_G);
  return o;
}

void check_data(const std::vector<double>& data) {
  if (data.empty()) throw std::domain_error("inference: data must be nonempty");
  for (double y : data) {
    if (!(y > 0) || !std::isfinite(y)) {
      throw std::domain_error("inference: data must be positive and finite");
    }
  }
}

// ---- free-coordinate bookkeeping --------------------------------------

const char* kParamNames[4] = {"alpha", "beta", "gamma", "theta"};

// Indices into (alpha, beta, gamma, theta) that the family leaves free.
std::vector<int> free_indices(Family f) {
  const FamilyConstraints c = constraints(f);
  std::vector<int> idx;
  if (!c.alpha) idx.push_back(0);
  idx.push_back(1);
  if (!c.gamma_) idx.push_back(2);
  if (!c.theta_limit_zero) idx.push_back(3);
  return idx;
}

std::vector<std::string> free_names_of(Family f) {
  std::vector<std::string> names;
  for (int i : free_indices(f)) names.emplace_back(kParamNames[i]);
  return names;
}

double get_param(const EwlParams& p, int i) {
  switch (i) {
    case 0: return p.alpha;
    case 1: return p.beta;
    case 2: return p.gamma_;
    default: return p.theta;
  }
}

void set_param(EwlParams& p, int i, double v) {
  switch (i) {
    case 0: p.alpha = v; break;
    case 1: p.beta = v; break;
    case 2: p.gamma_ = v; break;
    default: p.theta = v; break;
  }
}

// Exponentiated-Weibull score (the exact theta -> 0 limit), components
// aligned to (alpha, beta, gamma).
std::array<double, 3> ew_score(const std::vector<double>& data,
                               const EwlParams& p) {
  double sa = 0.0, sb = 0.0, sg = 0.0;
  for (double y : data) {
    const Obs o = observe(p, y);
    const double T = 1.0 - o.w + o.r * (p.alpha - 1.0);
    sa += 1.0 / p.alpha + o.log_G;
    sb += T;
    sg += 1.0 / p.gamma_ + (o.lw / p.gamma_) * T;
  }
  return {sa, p.gamma_ / p.beta * sb, sg};
}

// ---- generic 1-d solvers ----------------------------------------------

// Root of g on [lo, hi] with g(lo), g(hi) of opposite sign: safeguarded
// secant/bisection.
double root_in(const std::function<double(double)>& g, double lo, double hi,
               double glo, double ghi, double xtol_rel) {
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= xtol_rel * (std::fabs(lo) + std::fabs(hi))) break;
    double mid = lo + 0.5 * (hi - lo);
    // secant candidate, accepted only if safely interior
    const double den = ghi - glo;
    if (den != 0.0) {
      const double sec = lo - glo * (hi - lo) / den;
      if (sec > lo + 0.01 * (hi - lo) && sec < hi - 0.01 * (hi - lo)) {
        mid = sec;
      }
    }
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  return lo + 0.5 * (hi - lo);
}

// Golden-section maximization of q on [lo, hi].
double golden_max(const std::function<double(double)>& q, double lo,
                  double hi) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double q1 = q(x1), q2 = q(x2);
  for (int it = 0; it < 80; ++it) {
    if (q1 < q2) {
      a = x1;
      x1 = x2;
      q1 = q2;
      x2 = a + gr * (b - a);
      q2 = q(x2);
    } else {
      b = x2;
      x2 = x1;
      q2 = q1;
      x1 = b - gr * (b - a);
      q1 = q(x1);
    }
  }
  return 0.5 * (a + b);
}

// ---- EM internals -------------------------------------------------------

// Expected complete-data objective at fixed posterior weights z:
//   Q = n log alpha + n log gamma + sum [lw_i - log y_i - w_i
//       + (alpha z_i - 1) log G_i] + log theta sum z - n log Ltilde,
// the per-point bracket grouped so extreme gamma never splits into huge
// cancelling terms (cf. log_pdf).
double q_function(const std::vector<double>& data,
                  const std::vector<double>& z, const EwlParams& p) {
  const size_t n = data.size();
  double acc = n * (std::log(p.alpha) + std::log(p.gamma_));
  for (size_t i = 0; i < n; ++i) {
    const Obs o = observe(p, data[i]);
    const double az = p.alpha * z[i];
    const double core =
        (o.w < 1e-8)
            ? az * o.lw + (az - 1.0) * std::log1p(-0.5 * o.w) - o.w
            : o.lw - o.w + (az - 1.0) * o.log_G;
    acc += core - o.log_y;
  }
  const double Lt = -std::log1p(-p.theta);
  acc += std::log(p.theta) * std::accumulate(z.begin(), z.end(), 0.0) -
         (double)n * std::log(Lt);
  return acc;
}

// Logarithmic-series mean theta/((1-theta) Ltilde), strictly increasing from
// 1 (theta -> 0) to infinity (theta -> 1).
double log_series_mean(double theta) {
  return theta / ((1.0 - theta) * (-std::log1p(-theta)));
}

constexpr double kThetaLo = 1e-8;
constexpr double kThetaHi = 1.0 - 1e-8;

}  // namespace

double loglik(const std::vector<double>& data, const EwlParams& p, Family f) {
  check_data(data);
  double acc = 0.0;
  for (double y : data) acc += family_log_pdf(f, p, y);
  return acc;
}

std::array<double, 4> score(const std::vector<double>& data,
                            const EwlParams& p) {
  check_data(data);
  validate(p);
  const double n = (double)data.size();
  const double Lt = -std::log1p(-p.theta);
  double sa = 0.0, sb = 0.0, sg = 0.0, sz = 0.0;
  for (double y : data) {
    const Obs o = observe(p, y);
    const double z = 1.0 / (1.0 - p.theta * o.Ga);
    const double T =
        1.0 - o.w + o.r * ((p.alpha - 1.0) + p.alpha * p.theta * z * o.Ga);
    sa += 1.0 / p.alpha + o.log_G * (1.0 + p.theta * z * o.Ga);
    sb += T;
    sg += 1.0 / p.gamma_ + (o.lw / p.gamma_) * T;
    sz += z;
  }
  const double st = sz / p.theta - n / ((1.0 - p.theta) * Lt);
  return {sa, p.gamma_ / p.beta * sb, sg, st};
}

std::vector<double> e_step(const std::vector<double>& data,
                           const EwlParams& p) {
  check_data(data);
  validate(p);
  std::vector<double> z;
  z.reserve(data.size());
  for (double y : data) {
    const Obs o = observe(p, y);
    z.push_back(1.0 / (1.0 - p.theta * o.Ga));
  }
  return z;
}

namespace {

// Maximum-likelihood point of f's non-theta coordinates with theta pinned
// at init's value (defined with the quasi-Newton machinery below); boundary
// probes use it to resolve a theta slice in one shot.
FitResult theta_slice_fit(const std::vector<double>& data,
                          const EwlParams& init, Family f);

}  // namespace

FitResult em_fit(const std::vector<double>& data, const EwlParams& init,
                 const EmConfig& cfg, Family f) {
  check_data(data);
  const FamilyConstraints con = constraints(f);
  if (con.theta_limit_zero) {
    throw std::domain_error("em_fit: family takes theta to its limit; use direct_fit");
  }
  EwlParams p = restrict_params(init, f);
  validate(p);
  const double n = (double)data.size();

  FitResult res;
  res.family = f;
  res.method = FitMethod::EM;
  res.n_obs = (int)data.size();
  res.free_names = free_names_of(f);

  double ll = loglik(data, p, f);

  // One E-step plus conditional-maximization pass, in place; each accepted
  // step cannot lower Q, so the observed log-likelihood is nondecreasing
  // (EM inequality).
  auto sweep = [&](EwlParams& p) {
    const std::vector<double> z = e_step(data, p);
    const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / n;

    auto guard = [&](int ci, double cand, double lo, double hi) {
      EwlParams trial = p;
      set_param(trial, ci, cand);
      const double q_old = q_function(data, z, p);
      if (q_function(data, z, trial) >= q_old - 1e-12 * (1.0 + std::fabs(q_old))) {
        p = trial;
        return;
      }
      // exact step failed to improve (flat or bracketing artifact):
      // golden-section the Q section around the current value instead
      const double best = golden_max(
          [&](double v) {
            EwlParams t2 = p;
            set_param(t2, ci, v);
            return q_function(data, z, t2);
          },
          lo, hi);
      EwlParams t2 = p;
      set_param(t2, ci, best);
      if (q_function(data, z, t2) >= q_old) p = t2;
    };

    if (!con.alpha) {
      // dQ/dalpha = n/alpha + sum z_i log G_i = 0 in closed form
      double slg = 0.0;
      for (size_t i = 0; i < data.size(); ++i) {
        slg += z[i] * observe(p, data[i]).log_G;
      }
      guard(0, -n / slg, p.alpha / 8.0, p.alpha * 8.0);
    }

    {
      // dQ/dtheta = 0 <=> log_series_mean(theta) = zbar
      double th;
      if (zbar <= log_series_mean(kThetaLo)) {
        th = kThetaLo;
      } else if (zbar >= log_series_mean(kThetaHi)) {
        th = kThetaHi;
      } else {
        th = root_in([&](double t) { return log_series_mean(t) - zbar; },
                     kThetaLo, kThetaHi, log_series_mean(kThetaLo) - zbar,
                     log_series_mean(kThetaHi) - zbar, cfg.inner_solver_tol);
      }
      guard(3, th, std::max(kThetaLo, p.theta / 8.0),
            std::min(kThetaHi, 1.0 - (1.0 - p.theta) / 8.0));
    }

    {
      // dQ/dbeta = (gamma/beta)[n - sum w + sum (alpha z - 1) w u/G] = 0;
      // positive as beta -> 0, negative as beta -> inf
      auto gb = [&](double b) {
        EwlParams t = p;
        t.beta = b;
        double acc = n;
        for (size_t i = 0; i < data.size(); ++i) {
          const Obs o = observe(t, data[i]);
          acc += -o.w + (p.alpha * z[i] - 1.0) * o.r;
        }
        return acc;
      };
      double lo = p.beta, hi = p.beta, glo = gb(lo), ghi = glo;
      int tries = 0;
      while (glo <= 0 && tries++ < 200) glo = gb(lo /= 2.0);
      tries = 0;
      while (ghi >= 0 && tries++ < 200) ghi = gb(hi *= 2.0);
      if (glo > 0 && ghi < 0) {
        guard(1, root_in(gb, lo, hi, glo, ghi, cfg.inner_solver_tol),
              p.beta / 8.0, p.beta * 8.0);
      }
    }

    if (!con.gamma_) {
      // dQ/dgamma = n/gamma + sum log(beta y)[1 - w + (alpha z - 1) w u/G]
      auto gc = [&](double c) {
        EwlParams t = p;
        t.gamma_ = c;
        double acc = n / c;
        for (size_t i = 0; i < data.size(); ++i) {
          const Obs o = observe(t, data[i]);
          acc += (o.lw / c) * (1.0 - o.w + (p.alpha * z[i] - 1.0) * o.r);
        }
        return acc;
      };
      double lo = p.gamma_, hi = p.gamma_, glo = gc(lo), ghi = glo;
      int tries = 0;
      while (glo <= 0 && tries++ < 200) glo = gc(lo /= 2.0);
      tries = 0;
      while (ghi >= 0 && tries++ < 200) ghi = gc(hi *= 2.0);
      if (glo > 0 && ghi < 0) {
        guard(2, root_in(gc, lo, hi, glo, ghi, cfg.inner_solver_tol),
              p.gamma_ / 8.0, p.gamma_ * 8.0);
      }
    }
  };

  // Plain coordinate EM crawls along the alpha-theta ridge (its rate tends
  // to 1 there), so each macro-iteration extrapolates through two sweeps
  // (Varadhan-Roland squared step) and stabilizes the extrapolated point
  // with a third sweep. The candidate is accepted only when it beats the
  // two-sweep point, so the observed log-likelihood stays nondecreasing.
  const auto to_t = [](const EwlParams& q) {
    return std::array<double, 4>{std::log(q.alpha), std::log(q.beta),
                                 std::log(q.gamma_),
                                 std::log(q.theta / (1.0 - q.theta))};
  };
  const auto from_t = [&](std::array<double, 4> t) {
    for (double& v : t) v = std::clamp(v, -46.0, 60.0);
    EwlParams q{std::exp(t[0]), std::exp(t[1]), std::exp(t[2]),
                1.0 / (1.0 + std::exp(-t[3]))};
    q.theta = std::clamp(q.theta, kThetaLo, kThetaHi);
    return restrict_params(q, f);
  };

  int iter = 0;
  bool probe_done = false;
  while (iter < cfg.max_iter) {
    const EwlParams macro_start = p;
    const double ll_start = ll;

    EwlParams p1 = p;
    sweep(p1);
    ++iter;
    EwlParams adopt = p1;
    double ll_adopt = loglik(data, p1, f);

    if (iter < cfg.max_iter) {
      EwlParams p2 = p1;
      sweep(p2);
      ++iter;
      const double ll2 = loglik(data, p2, f);
      adopt = p2;
      ll_adopt = ll2;

      if (iter < cfg.max_iter) {
        const std::array<double, 4> t0 = to_t(macro_start);
        const std::array<double, 4> t1 = to_t(p1);
        const std::array<double, 4> t2 = to_t(p2);
        double rr = 0.0, vv = 0.0;
        std::array<double, 4> r{}, v{};
        for (int k = 0; k < 4; ++k) {
          r[k] = t1[k] - t0[k];
          v[k] = (t2[k] - t1[k]) - r[k];
          rr += r[k] * r[k];
          vv += v[k] * v[k];
        }
        if (rr > 0.0 && vv > 0.0) {
          // Backtrack the step toward -1 on rejection; at a = -1 the
          // candidate is the two-sweep point itself, so the stabilizing
          // sweep is a plain EM step and cannot lose ground.
          double a = std::min(-1.0, -std::sqrt(rr / vv));
          for (int attempt = 0; attempt < 4 && iter < cfg.max_iter;
               ++attempt) {
            std::array<double, 4> tc;
            for (int k = 0; k < 4; ++k) {
              tc[k] = t0[k] - 2.0 * a * r[k] + a * a * v[k];
            }
            bool accepted = false;
            try {
              EwlParams pc = from_t(tc);
              validate(pc);
              sweep(pc);
              ++iter;
              const double llc = loglik(data, pc, f);
              if (std::isfinite(llc) && llc >= ll_adopt) {
                adopt = pc;
                ll_adopt = llc;
                accepted = true;
              }
            } catch (const std::exception&) {
              // candidate left the numerical domain: shrink the step
            }
            if (accepted || a == -1.0) break;
            a = (attempt == 2) ? -1.0 : (a - 1.0) / 2.0;
          }
        }

        // A theta trajectory shrinking toward zero signals a possible
        // boundary optimum, which the proportional CM updates approach
        // only geometrically. Probe the boundary once: optimize the other
        // parameters on the pinned slice, then decide by the profile
        // slope at theta -> 0+, which is proportional to mean(G^alpha)
        // - 1/2 there. A nonpositive slope means theta = 0 attracts and
        // a genuine collapse can finish now instead of thousands of
        // sweeps later; a positive slope means the trajectory is heading
        // for an interior optimum and the probe point must be ignored.
        // The slice optimum does not depend on when it is computed, so
        // one verdict settles the question for the whole run.
        if (!probe_done && iter < cfg.max_iter && p2.theta < 0.25 &&
            p2.theta < p1.theta && p1.theta < macro_start.theta) {
          probe_done = true;
          EwlParams pb = p2;
          pb.theta = kThetaLo;
          try {
            const FitResult sf = theta_slice_fit(data, pb, f);
            iter = std::min(cfg.max_iter, iter + sf.iterations);
            const double llb = loglik(data, sf.params, f);
            double sga = 0.0;
            for (double y : data) sga += observe(sf.params, y).Ga;
            if (std::isfinite(llb) && sga / n <= 0.5 && llb >= ll_adopt) {
              adopt = sf.params;
              ll_adopt = llb;
            }
          } catch (const std::exception&) {
            // probe left the numerical domain: keep the current point
          }
        }
      }
    }

    res.convergence_gap = ll_adopt - ll_start;
    double dp = 0.0;
    for (int ci = 0; ci < 4; ++ci) {
      dp = std::max(dp,
                    std::fabs(get_param(adopt, ci) - get_param(macro_start, ci)) /
                        (1.0 + std::fabs(get_param(macro_start, ci))));
    }
    p = adopt;
    ll = ll_adopt;
    // Ridge plateaus admit equal-loglik drift along the flat direction, so
    // either a negligible loglik gain or a negligible parameter move counts
    // as convergence.
    if (std::fabs(res.convergence_gap) <= cfg.loglik_tol ||
        dp <= cfg.param_tol) {
      res.converged = true;
      break;
    }
  }
  res.iterations = iter;
  res.params = p;
  res.loglik = ll;
  res.aic = -2.0 * ll + 2.0 * n_free_params(f);
  res.theta_at_boundary = p.theta <= 2.0 * kThetaLo ||
                          p.theta >= 1.0 - 2.0 * (1.0 - kThetaHi);
  if (res.theta_at_boundary) res.converged = false;
  return res;
}

namespace {

// ---- BFGS on the unconstrained scale ------------------------------------

// Transformed coordinate boxes: log alpha/beta/gamma in [-46, 60], logit
// theta in [-34, 34]. Wide enough for genuine optima (including extreme
// alpha ridges), tight enough to keep exp/expm1 finite.
double clamp_coord(int param_idx, double v) {
  const double lim_lo = (param_idx == 3) ? -34.0 : -46.0;
  const double lim_hi = (param_idx == 3) ? 34.0 : 60.0;
  return std::min(lim_hi, std::max(lim_lo, v));
}

double to_unconstrained(int param_idx, double v) {
  return (param_idx == 3) ? std::log(v / (1.0 - v)) : std::log(v);
}

double from_unconstrained(int param_idx, double x) {
  return (param_idx == 3) ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x);
}

struct Objective {
  const std::vector<double>* data;
  Family f;
  std::vector<int> idx;
  EwlParams base;

  EwlParams params_at(const std::vector<double>& x) const {
    EwlParams p = base;
    for (size_t j = 0; j < idx.size(); ++j) {
      set_param(p, idx[j], from_unconstrained(idx[j], clamp_coord(idx[j], x[j])));
    }
    return p;
  }

  double value(const std::vector<double>& x) const {
    try {
      const double v = loglik(*data, params_at(x), f);
      // Non-finite evaluations (including +inf from pathological corners)
      // must read as invalid, never as an improvement.
      return std::isfinite(v) ? v : -kInf;
    } catch (const std::exception&) {
      return -kInf;
    }
  }

  // gradient of the loglik in the transformed coordinates
  std::vector<double> grad(const std::vector<double>& x) const {
    const EwlParams p = params_at(x);
    std::array<double, 4> s{0, 0, 0, 0};
    if (constraints(f).theta_limit_zero) {
      const std::array<double, 3> se = ew_score(*data, p);
      s[0] = se[0];
      s[1] = se[1];
      s[2] = se[2];
    } else {
      s = score(*data, p);
    }
    std::vector<double> g(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) {
      const double v = get_param(p, idx[j]);
      const double chain = (idx[j] == 3) ? v * (1.0 - v) : v;
      g[j] = s[idx[j]] * chain;
    }
    return g;
  }
};

struct BfgsRun {
  int iterations = 0;
  bool converged = false;
  double loglik = -kInf;
  double gap = kInf;  // gain of the last accepted step
};

// BFGS ascent with Armijo backtracking from x (updated in place), stopping
// on the sup-norm gradient test, a negligible gain, or a stalled line
// search near the optimum. H approximates the inverse of -Hessian.
BfgsRun bfgs_maximize(const Objective& obj, std::vector<double>& x,
                      int max_iter) {
  const size_t k = obj.idx.size();
  double H[4][4] = {};
  auto reset_H = [&] {
    for (size_t a = 0; a < k; ++a)
      for (size_t b = 0; b < k; ++b) H[a][b] = (a == b) ? 1.0 : 0.0;
  };
  reset_H();

  BfgsRun run;
  double ll = obj.value(x);
  std::vector<double> g = obj.grad(x);
  double gap = kInf;
  int iter = 0;
  for (iter = 1; iter <= max_iter; ++iter) {
    double gnorm = 0.0;
    for (double gj : g) gnorm = std::max(gnorm, std::fabs(gj));
    if (gnorm <= 1e-7 * (1.0 + std::fabs(ll))) {
      run.converged = true;
      break;
    }

    // ascent direction d = H g
    std::vector<double> d(k, 0.0);
    for (size_t a = 0; a < k; ++a)
      for (size_t b = 0; b < k; ++b) d[a] += H[a][b] * g[b];
    double dg = 0.0;
    for (size_t a = 0; a < k; ++a) dg += d[a] * g[a];
    if (!(dg > 0)) {
      reset_H();
      d = g;
      dg = 0.0;
      for (size_t a = 0; a < k; ++a) dg += g[a] * g[a];
    }

    // Armijo backtracking on the ascent
    double t = 1.0;
    std::vector<double> xn(k);
    double ll_new = -kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (size_t a = 0; a < k; ++a) {
        xn[a] = clamp_coord(obj.idx[a], x[a] + t * d[a]);
      }
      ll_new = obj.value(xn);
      if (ll_new >= ll + 1e-4 * t * dg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      run.converged = gnorm <= 1e-4 * (1.0 + std::fabs(ll));
      break;
    }

    const std::vector<double> gn = obj.grad(xn);
    // BFGS update on the minimization pair (s, y) with y = -(gn - g)
    double s[4], yv[4];
    double sy = 0.0, snorm = 0.0, ynorm = 0.0;
    for (size_t a = 0; a < k; ++a) {
      s[a] = xn[a] - x[a];
      yv[a] = -(gn[a] - g[a]);
      sy += s[a] * yv[a];
      snorm += s[a] * s[a];
      ynorm += yv[a] * yv[a];
    }
    if (sy > 1e-10 * std::sqrt(snorm * ynorm)) {
      const double rho = 1.0 / sy;
      double Hy[4] = {0, 0, 0, 0};
      double yHy = 0.0;
      for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) Hy[a] += H[a][b] * yv[b];
      }
      for (size_t a = 0; a < k; ++a) yHy += yv[a] * Hy[a];
      for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) {
          H[a][b] += (1.0 + rho * yHy) * rho * s[a] * s[b] -
                     rho * (s[a] * Hy[b] + Hy[a] * s[b]);
        }
      }
    }

    gap = ll_new - ll;
    x = xn;
    g = gn;
    ll = ll_new;
    if (std::fabs(gap) <= 1e-12 * (1.0 + std::fabs(ll))) {
      run.converged = true;
      ++iter;
      break;
    }
  }
  run.iterations = std::min(iter, max_iter);
  run.loglik = ll;
  run.gap = gap;
  return run;
}

std::vector<double> start_coords(const Objective& obj) {
  std::vector<double> x(obj.idx.size());
  for (size_t j = 0; j < x.size(); ++j) {
    x[j] = clamp_coord(obj.idx[j],
                       to_unconstrained(obj.idx[j], get_param(obj.base, obj.idx[j])));
  }
  return x;
}

FitResult theta_slice_fit(const std::vector<double>& data,
                          const EwlParams& init, Family f) {
  Objective obj{&data, f, {}, restrict_params(init, f)};
  for (int ci : free_indices(f)) {
    if (ci != 3) obj.idx.push_back(ci);
  }
  std::vector<double> x = start_coords(obj);
  const BfgsRun run = bfgs_maximize(obj, x, 600);
  FitResult res;
  res.family = f;
  res.method = FitMethod::Direct;
  res.n_obs = (int)data.size();
  res.free_names = free_names_of(f);
  res.params = obj.params_at(x);
  res.loglik = run.loglik;
  res.iterations = run.iterations;
  res.converged = run.converged;
  res.convergence_gap = std::isfinite(run.gap) ? run.gap : 0.0;
  return res;
}

}  // namespace

FitResult direct_fit(const std::vector<double>& data, const EwlParams& init,
                     Family f) {
  check_data(data);
  Objective obj{&data, f, free_indices(f), restrict_params(init, f)};
  const size_t k = obj.idx.size();
  std::vector<double> x = start_coords(obj);
  const BfgsRun run = bfgs_maximize(obj, x, 600);

  FitResult res;
  res.family = f;
  res.method = FitMethod::Direct;
  res.n_obs = (int)data.size();
  res.free_names = free_names_of(f);
  res.converged = run.converged;
  res.iterations = run.iterations;
  res.params = obj.params_at(x);
  res.loglik = run.loglik;
  res.aic = -2.0 * run.loglik + 2.0 * (double)k;
  res.convergence_gap = std::isfinite(run.gap) ? run.gap : 0.0;
  if (!constraints(f).theta_limit_zero) {
    const double lt = std::log(res.params.theta / (1.0 - res.params.theta));
    res.theta_at_boundary = std::fabs(lt) >= 33.0;
    if (res.theta_at_boundary) res.converged = false;
    // A fit that slides toward theta -> 0 degenerates to the theta-limit
    // sub-model. Flag it when that limit explains the data equally well;
    // the observed information in theta is singular there, so standard
    // errors for theta are not meaningful.
    if (!res.theta_at_boundary && res.params.theta < 1e-3 &&
        std::isfinite(res.loglik)) {
      const double ll_limit = loglik(data, res.params, Family::Ew);
      if (res.loglik - ll_limit <= 1e-6 * (1.0 + std::fabs(res.loglik))) {
        res.theta_at_boundary = true;
      }
    }
  }
  return res;
}

FitResult hybrid_fit(const std::vector<double>& data, const EwlParams& init,
                     Family f) {
  if (constraints(f).theta_limit_zero) {
    return direct_fit(data, init, f);
  }
  EmConfig warm;
  warm.max_iter = 500;
  warm.loglik_tol = 1e-4;
  warm.param_tol = 1e-4;
  const FitResult em = em_fit(data, init, warm, f);
  FitResult res = direct_fit(data, em.params, f);
  if (res.loglik < em.loglik) {
    // polish went nowhere (boundary ridge): keep the EM point
    res.params = em.params;
    res.loglik = em.loglik;
    res.aic = em.aic;
    res.theta_at_boundary = em.theta_at_boundary;
    res.converged = em.converged;
  }
  res.method = FitMethod::EMthenDirect;
  res.iterations += em.iterations;
  return res;
}

EwlParams default_init(const std::vector<double>& data) {
  check_data(data);
  std::vector<double> y = data;
  std::sort(y.begin(), y.end());
  const size_t n = y.size();
  // Weibull probability plot: log(-log S_n) on log y with median ranks
  double sx = 0, sy_ = 0, sxx = 0, sxy = 0;
  size_t used = 0;
  for (size_t i = 0; i < n; ++i) {
    const double Fi = ((double)i + 1.0 - 0.375) / ((double)n + 0.25);
    const double lx = std::log(y[i]);
    const double ly = std::log(-std::log1p(-Fi));
    sx += lx;
    sy_ += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  const double den = used * sxx - sx * sx;
  double gamma_hat = 1.0, beta_hat = 1.0;
  if (std::fabs(den) > 0) {
    const double slope = (used * sxy - sx * sy_) / den;
    const double icept = (sy_ - slope * sx) / used;
    if (slope > 1e-3 && std::isfinite(slope)) {
      gamma_hat = slope;
      beta_hat = std::exp(icept / slope);
    }
  }
  if (!(beta_hat > 0) || !std::isfinite(beta_hat)) beta_hat = 1.0;
  return {1.0, beta_hat, gamma_hat, 0.5};
}

FitResult fit_from(const std::vector<double>& data, const EwlParams& init,
                   Family f, FitMethod method) {
  check_data(data);
  FitResult r;
  switch (method) {
    case FitMethod::EM:
      r = em_fit(data, init, {}, f);
      break;
    case FitMethod::Direct:
      r = direct_fit(data, init, f);
      break;
    case FitMethod::EMthenDirect:
      r = hybrid_fit(data, init, f);
      break;
  }
  attach_std_errors(r, data);
  return r;
}

FitResult fit(const std::vector<double>& data, Family f, FitMethod method) {
  check_data(data);
  const EwlParams plot = default_init(data);
  const double mean_y =
      std::accumulate(data.begin(), data.end(), 0.0) / data.size();

  std::vector<EwlParams> starts{plot};
  {
    EwlParams exp_like{1.0, 1.0 / mean_y, 1.0, 0.5};
    starts.push_back(exp_like);
  }
  static const double alphas[] = {0.5, 2.0, 8.0, 64.0, 512.0, 4096.0};
  if (constraints(f).theta_limit_zero) {
    for (double a : alphas) {
      EwlParams s = plot;
      s.alpha = a;
      starts.push_back(s);
    }
  } else {
    static const double thetas[] = {0.1, 0.5, 0.9};
    for (double a : alphas) {
      for (double t : thetas) {
        EwlParams s = plot;
        s.alpha = a;
        s.theta = t;
        starts.push_back(s);
      }
    }
  }

  bool have = false;
  FitResult best;
  for (const EwlParams& s : starts) {
    FitResult r;
    try {
      switch (method) {
        case FitMethod::EM:
          r = em_fit(data, s, {}, f);
          break;
        case FitMethod::Direct:
          r = direct_fit(data, s, f);
          break;
        case FitMethod::EMthenDirect:
          r = hybrid_fit(data, s, f);
          break;
      }
    } catch (const std::domain_error&) {
      throw;  // family/method mismatch or bad data: not a start-point issue
    } catch (const std::exception&) {
      continue;
    }
    if (!std::isfinite(r.loglik)) continue;
    if (!have || r.loglik > best.loglik) {
      best = r;
      have = true;
    }
  }
  if (!have) throw NonConvergence("fit: no start point produced a finite fit");
  attach_std_errors(best, data);
  return best;
}

std::array<std::array<double, 4>, 4> observed_information(
    const std::vector<double>& data, const EwlParams& p) {
  check_data(data);
  validate(p);
  std::array<std::array<double, 4>, 4> info{};
  for (int j = 0; j < 4; ++j) {
    const double v = get_param(p, j);
    double h = 1e-5 * std::max(std::fabs(v), 1e-3);
    if (j == 3) h = std::min({h, 0.5 * v, 0.5 * (1.0 - v)});
    EwlParams lo = p, hi = p;
    set_param(lo, j, v - h);
    set_param(hi, j, v + h);
    const std::array<double, 4> slo = score(data, lo);
    const std::array<double, 4> shi = score(data, hi);
    for (int kk = 0; kk < 4; ++kk) {
      info[j][kk] = -(shi[kk] - slo[kk]) / (2.0 * h);
    }
  }
  for (int j = 0; j < 4; ++j) {
    for (int kk = j + 1; kk < 4; ++kk) {
      const double m = 0.5 * (info[j][kk] + info[kk][j]);
      info[j][kk] = m;
      info[kk][j] = m;
    }
  }
  // positive definiteness via Cholesky
  std::array<std::array<double, 4>, 4> c = info;
  for (int j = 0; j < 4; ++j) {
    for (int kk = 0; kk <= j; ++kk) {
      double sum = c[j][kk];
      for (int l = 0; l < kk; ++l) sum -= c[j][l] * c[kk][l];
      if (j == kk) {
        if (!(sum > 0)) {
          throw SingularInformation("observed_information: not positive definite");
        }
        c[j][j] = std::sqrt(sum);
      } else {
        c[j][kk] = sum / c[kk][kk];
      }
    }
  }
  return info;
}

namespace {

std::array<double, 4> masked_score(const std::vector<double>& data,
                                   const EwlParams& p, Family f) {
  if (constraints(f).theta_limit_zero) {
    const std::array<double, 3> se = ew_score(data, p);
    return {se[0], se[1], se[2], 0.0};
  }
  return score(data, p);
}

// Gauss-Jordan inverse with partial pivoting for k <= 4; false if singular.
bool invert_matrix(std::vector<std::vector<double>> a,
                   std::vector<std::vector<double>>* out) {
  const size_t k = a.size();
  std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i) inv[i][i] = 1.0;
  for (size_t col = 0; col < k; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < k; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (!(std::fabs(a[piv][col]) > 0) || !std::isfinite(a[piv][col])) {
      return false;
    }
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (size_t c = 0; c < k; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double m = a[r][col];
      if (m == 0.0) continue;
      for (size_t c = 0; c < k; ++c) {
        a[r][c] -= m * a[col][c];
        inv[r][c] -= m * inv[col][c];
      }
    }
  }
  *out = std::move(inv);
  return true;
}

}  // namespace

std::vector<std::vector<double>> observed_information_free(
    const std::vector<double>& data, const EwlParams& p, Family f) {
  check_data(data);
  const std::vector<int> idx = free_indices(f);
  const size_t k = idx.size();
  std::vector<std::vector<double>> info(k, std::vector<double>(k, 0.0));
  for (size_t j = 0; j < k; ++j) {
    const double v = get_param(p, idx[j]);
    double h = 1e-5 * std::max(std::fabs(v), 1e-3);
    if (idx[j] == 3) h = std::min({h, 0.5 * v, 0.5 * (1.0 - v)});
    EwlParams lo = p, hi = p;
    set_param(lo, idx[j], v - h);
    set_param(hi, idx[j], v + h);
    const std::array<double, 4> slo = masked_score(data, lo, f);
    const std::array<double, 4> shi = masked_score(data, hi, f);
    for (size_t kk = 0; kk < k; ++kk) {
      info[j][kk] = -(shi[idx[kk]] - slo[idx[kk]]) / (2.0 * h);
    }
  }
  for (size_t j = 0; j < k; ++j) {
    for (size_t kk = j + 1; kk < k; ++kk) {
      const double m = 0.5 * (info[j][kk] + info[kk][j]);
      info[j][kk] = m;
      info[kk][j] = m;
    }
  }
  return info;
}

std::vector<std::pair<double, double>> confidence_intervals(
    const FitResult& fit, const std::vector<std::vector<double>>& info,
    double level) {
  if (!(level > 0 && level < 1)) {
    throw std::domain_error("confidence_intervals: level must lie in (0,1)");
  }
  std::vector<std::vector<double>> inv;
  if (!invert_matrix(info, &inv)) {
    throw SingularInformation("confidence_intervals: information matrix is singular");
  }
  const std::vector<int> idx = free_indices(fit.family);
  const double zq = norm_quantile(0.5 * (1.0 + level));
  std::vector<std::pair<double, double>> ci;
  for (size_t j = 0; j < idx.size(); ++j) {
    if (!(inv[j][j] > 0)) {
      throw SingularInformation("confidence_intervals: information matrix is not positive definite");
    }
    const double se = std::sqrt(inv[j][j]);
    const double v = get_param(fit.params, idx[j]);
    ci.emplace_back(v - zq * se, v + zq * se);
  }
  return ci;
}

void attach_std_errors(FitResult& fit, const std::vector<double>& data) {
  const std::vector<int> idx = free_indices(fit.family);
  fit.free_names = free_names_of(fit.family);
  fit.std_errors.assign(idx.size(), kNaN);
  try {
    const std::vector<std::vector<double>> info =
        observed_information_free(data, fit.params, fit.family);
    std::vector<std::vector<double>> inv;
    if (!invert_matrix(info, &inv)) return;
    for (size_t j = 0; j < idx.size(); ++j) {
      fit.std_errors[j] = (inv[j][j] > 0) ? std::sqrt(inv[j][j]) : kNaN;
    }
  } catch (const std::exception&) {
    // leave NaNs: a boundary or flat fit has no usable curvature
  }
}

LrTestResult lr_test(const std::vector<double>& data, Family null_family,
                     Family alt_family) {
  if (!is_nested_in(null_family, alt_family)) {
    throw NestingError("lr_test: null family is not nested in the alternative");
  }
  const FitResult f0 = fit(data, null_family);
  FitResult f1 = fit(data, alt_family);
  if (f1.loglik < f0.loglik) {
    // the alternative contains the null: never accept a worse optimum
    const FitResult warm = fit_from(data, f0.params, alt_family,
                                    FitMethod::Direct);
    if (warm.loglik > f1.loglik) f1 = warm;
  }
  LrTestResult t;
  t.null_family = null_family;
  t.alt_family = alt_family;
  t.statistic = std::max(0.0, 2.0 * (f1.loglik - f0.loglik));
  t.df = n_free_params(alt_family) - n_free_params(null_family);
  t.p_value = chisq_sf(t.statistic, t.df);
  return t;
}

}  // namespace ewl
