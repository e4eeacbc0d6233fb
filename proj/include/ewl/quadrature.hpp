#pragma once

#include <functional>
#include <vector>

namespace ewl {

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;  // absolute error estimate
  bool converged = false;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod 15(7) on a finite interval [a, b]. Bisects the
// worst-error subinterval until the summed error estimate satisfies
// abs(err) <= max(abs_tol, rel_tol*|value|) or max_intervals is reached.
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double rel_tol = 1e-10, double abs_tol = 1e-14,
                     int max_intervals = 2000);

// Integrates over the union of [pts[0],pts[1]], [pts[1],pts[2]], ...
// Useful when the caller knows where the mass or the singular endpoints are.
QuadResult integrate_segments(const std::function<double(double)>& f,
                              const std::vector<double>& pts,
                              double rel_tol = 1e-10, double abs_tol = 1e-14,
                              int max_intervals_per_segment = 2000);

// Geometric ladder a, a/2, a/4, ..., down to a*2^-levels, in increasing
// order starting at 0. Prepend to integration breakpoints to resolve an
// integrable power singularity at the origin.
std::vector<double> geometric_ladder(double a, int levels = 48);

}  // namespace ewl
