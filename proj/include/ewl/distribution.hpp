#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ewl {

// Parameters of the exponentiated Weibull-logarithmic law: the distribution
// of Y = max(X_1,...,X_N) where the X_i are i.i.d. exponentiated Weibull
// with cdf (1 - e^{-(beta x)^gamma})^alpha and N is logarithmic with
// parameter theta. beta is an inverse scale (the Weibull kernel is
// e^{-(beta y)^gamma}).
struct EwlParams {
  double alpha = 1.0;   // exponentiation shape, > 0
  double beta = 1.0;    // rate (inverse scale), > 0
  double gamma_ = 1.0;  // Weibull shape, > 0
  double theta = 0.5;   // mixing parameter, in (0,1)
};

// Throws std::domain_error on invalid parameters. theta is restricted to
// (0,1): the logarithmic pmf normalizer -log(1-theta) requires it.
void validate(const EwlParams& p);

// Core evaluation. pdf/log_pdf require y > 0 (domain_error otherwise, so
// that nonpositive data surfaces as a bug instead of a silent zero).
// cdf/survival accept any y and use the support convention F(y<=0) = 0.
double log_pdf(const EwlParams& p, double y);
double pdf(const EwlParams& p, double y);
double cdf(const EwlParams& p, double y);
double survival(const EwlParams& p, double y);

// Hazard h = pdf/survival and reversed hazard r = pdf/cdf, y > 0. Deep in
// the right tail, where survival underflows, hazard switches to its
// asymptotic form gamma * beta^gamma * y^{gamma-1} (relative error O(u)
// with u = e^{-(beta y)^gamma}).
double hazard(const EwlParams& p, double y);
double reversed_hazard(const EwlParams& p, double y);

// Quantile x_xi with cdf(x_xi) = xi, xi in (0,1). Stable up to
// xi = 1 - 1e-15 (expm1/log1p formulation in both tails).
double quantile(const EwlParams& p, double xi);

enum class LimitKind { Zero, Finite, Infinite };

struct HazardLimit {
  LimitKind at_zero_kind = LimitKind::Finite;
  double at_zero = 0.0;  // meaningful only when the kind is Finite
  LimitKind at_infinity_kind = LimitKind::Finite;
  double at_infinity = 0.0;
};

// Limiting behavior of the hazard:
//   gamma < 1: at 0 infinite if alpha <= 1 else zero; at infinity zero.
//   gamma = 1: at 0 infinite if alpha < 1, -theta*beta/log(1-theta) if
//              alpha = 1, zero if alpha > 1; at infinity beta.
//   gamma > 1: at 0 zero; at infinity infinite.
HazardLimit hazard_limits(const EwlParams& p);

// Numerically detected hazard shape between the limits (sign changes of
// finite differences on a quantile grid). Reported as a label only; unlike
// hazard_limits this is a numerical diagnostic, not a proved classification.
enum class HazardShape { Increasing, Decreasing, Unimodal, Bathtub, Other };
HazardShape hazard_shape(const EwlParams& p);

// n i.i.d. draws by inverting the cdf at uniform variates. Deterministic
// given (seed, n).
std::vector<double> sample_inverse(const EwlParams& p, int n,
                                   std::uint64_t seed);

// n draws by the compound construction: draw N from the logarithmic pmf
// P(N=k) = theta^k / (-k log(1-theta)), then the max of N exponentiated
// Weibull draws. Same law as sample_inverse; used as a structural
// cross-check. Deterministic given (seed, n).
std::vector<double> sample_compound(const EwlParams& p, int n,
                                    std::uint64_t seed);

// One logarithmic variate (sequential search on the pmf); exposed for tests.
int sample_logarithmic(double theta, std::mt19937_64& eng);

}  // namespace ewl
