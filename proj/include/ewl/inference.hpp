#pragma once

#include <array>
#include <vector>

#include "ewl/families.hpp"

namespace ewl {

struct SingularInformation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FitMethod { EM, Direct, EMthenDirect };

struct FitResult {
  Family family = Family::Ewl;
  EwlParams params;               // restricted coordinates already applied
  std::vector<double> std_errors;  // aligned to free parameters, may be NaN
  double loglik = 0.0;
  double aic = 0.0;
  int n_obs = 0;
  FitMethod method = FitMethod::EMthenDirect;
  int iterations = 0;
  bool converged = false;
  double convergence_gap = 0.0;  // last log-likelihood improvement seen
  // Set when theta finished pinned to its numeric box, or when the fit is
  // statistically indistinguishable from the theta -> 0 limit sub-model
  // (where the observed information in theta is singular).
  bool theta_at_boundary = false;
  // Names of the free parameters, in the order std_errors uses.
  std::vector<std::string> free_names;
};

struct EmConfig {
  int max_iter = 2000;
  // Converged when a macro-iteration gains at most loglik_tol log-likelihood
  // or moves every parameter by at most param_tol (relative); ridge plateaus
  // admit equal-loglik drift, so either signal alone suffices.
  double loglik_tol = 1e-8;
  double param_tol = 1e-8;
  double inner_solver_tol = 1e-10;
};

struct LrTestResult {
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  Family null_family = Family::Ew;
  Family alt_family = Family::Ewl;
};

// Observed-data log-likelihood sum_i log f(y_i) for the given family (limit
// families use their closed forms). Throws domain_error on y <= 0.
double loglik(const std::vector<double>& data, const EwlParams& p,
              Family f = Family::Ewl);

// Analytic score (d/d alpha, d/d beta, d/d gamma, d/d theta) of the full
// four-parameter log-likelihood. For restricted families the pinned
// components are still returned (callers mask them).
std::array<double, 4> score(const std::vector<double>& data,
                            const EwlParams& p);

// E-step posterior expectations z_i = E[N | Y = y_i] = 1/(1 - theta G^alpha),
// each >= 1.
std::vector<double> e_step(const std::vector<double>& data,
                           const EwlParams& p);

// EM for any family with theta free (Ewl, Cwl, Gel, Cel, Erl, Rl); the
// pinned coordinates of `f` are held fixed. Conditional-maximization steps
// in the order alpha (closed form), theta (scalar root of the
// logarithmic-mean equation), beta, gamma (bracketed root solves of the
// expected complete-data score, with a golden-section fallback on the
// expected complete-data objective if a step fails to improve it).
// Each macro-iteration extrapolates through two sweeps (squared
// extrapolation) and stabilizes with a third, accepting the candidate only
// when it improves on the plain point, so the observed-data log-likelihood
// is nondecreasing across iterations. `iterations` counts sweeps.
FitResult em_fit(const std::vector<double>& data, const EwlParams& init,
                 const EmConfig& cfg = {}, Family f = Family::Ewl);

// Quasi-Newton (BFGS) maximization with the analytic score, on the
// unconstrained scale (log alpha, log beta, log gamma, logit theta), free
// coordinates only. Works for every family including the theta-limit ones.
FitResult direct_fit(const std::vector<double>& data, const EwlParams& init,
                     Family f = Family::Ewl);

// EM warm start (loglik_tol 1e-4) followed by a direct polish; falls back
// to the pure direct path for the theta-limit families.
FitResult hybrid_fit(const std::vector<double>& data, const EwlParams& init,
                     Family f = Family::Ewl);

// Default pipeline: probability-plot initialization plus a deterministic
// multistart over (alpha, theta) inits, hybrid-fitted, best loglik kept.
FitResult fit(const std::vector<double>& data, Family f = Family::Ewl,
              FitMethod method = FitMethod::EMthenDirect);
FitResult fit_from(const std::vector<double>& data, const EwlParams& init,
                   Family f = Family::Ewl,
                   FitMethod method = FitMethod::EMthenDirect);

// Weibull probability-plot least squares on log(-log S_n); the default
// starting point (alpha = 1, theta = 0.5).
EwlParams default_init(const std::vector<double>& data);

// Observed information -Hessian(loglik) for the full four-parameter model,
// central finite differences of the analytic score, symmetrized.
// Throws SingularInformation if the result is not positive definite.
std::array<std::array<double, 4>, 4> observed_information(
    const std::vector<double>& data, const EwlParams& p);

// Free-coordinate observed information for an arbitrary family (finite
// differences of the loglik gradient restricted to free coordinates).
std::vector<std::vector<double>> observed_information_free(
    const std::vector<double>& data, const EwlParams& p, Family f);

// Wald intervals theta_r +- z_{(1+level)/2} sqrt((I^{-1})_{rr}) for the free
// parameters of the fit. Throws SingularInformation if I is not invertible.
std::vector<std::pair<double, double>> confidence_intervals(
    const FitResult& fit, const std::vector<std::vector<double>>& info,
    double level = 0.95);

// Fills std_errors of `fit` in place from the observed information (NaN on
// failure rather than throwing).
void attach_std_errors(FitResult& fit, const std::vector<double>& data);

// Likelihood-ratio test of null within alt: fits both families, enforces
// statistic >= 0 by warm-starting the alternative from the null optimum if
// needed, and returns the chi-square tail p-value. Throws NestingError for
// non-nested (or identical) pairs.
LrTestResult lr_test(const std::vector<double>& data, Family null_family,
                     Family alt_family);

}  // namespace ewl
