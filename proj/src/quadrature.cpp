#include "ewl/quadrature.hpp"

#include <cmath>
#include <queue>

namespace ewl {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (Piessens et al.).
const double kXgk[8] = {.991455371120812639206854697526329,
                        .949107912342758524526189684047851,
                        .864864423359769072789712788640926,
                        .741531185599394439863864773280788,
                        .58608723546769113029414483825873,
                        .405845151377397166906606412076961,
                        .207784955007898467600689403773245,
                        0.};
const double kWgk[8] = {.02293532201052922496373200805897,
                        .063092092629978553290700663189204,
                        .104790010322250183839876322541518,
                        .140653259715525918745189590510238,
                        .16900472663926790282658342659855,
                        .190350578064785409913256402421014,
                        .204432940075298892414161999234649,
                        .209482141084727828012999174891714};
const double kWg[4] = {.129484966168869693270611432679082,
                       .27970539148927666790146777142378,
                       .381830050505118944950369775488975,
                       .417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b,
           long* evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0, resabs = 0.0;
  const double fc = f(c);
  resk = kWgk[7] * fc;
  resg = kWg[3] * fc;
  resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    const double fsum = fv1[j] + fv2[j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;  // Gauss nodes are 1,3,5 of xgk
  }
  *evals += 15;
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }
  double err = std::fabs((resk - resg) * h);
  resasc *= std::fabs(h);
  resabs *= std::fabs(h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::fmin(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  return {a, b, resk * h, err};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double rel_tol, double abs_tol,
                     int max_intervals) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b, &out.evaluations));
  double total = heap.top().value;
  double toterr = heap.top().err;
  int n = 1;
  while (n < max_intervals) {
    if (toterr <= std::fmax(abs_tol, rel_tol * std::fabs(total))) break;
    Panel worst = heap.top();
    heap.pop();
    // Stop splitting below the spacing floor; keep the panel's estimate.
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      total += 0.0;
      heap.push({worst.a, worst.b, worst.value, 0.0});
      toterr -= worst.err;
      continue;
    }
    Panel left = gk15(f, worst.a, mid, &out.evaluations);
    Panel right = gk15(f, mid, worst.b, &out.evaluations);
    total += left.value + right.value - worst.value;
    toterr += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  out.value = total;
  out.est_error = toterr;
  out.converged = toterr <= std::fmax(abs_tol, rel_tol * std::fabs(total));
  return out;
}

QuadResult integrate_segments(const std::function<double(double)>& f,
                              const std::vector<double>& pts, double rel_tol,
                              double abs_tol, int max_intervals_per_segment) {
  QuadResult out;
  out.converged = true;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    QuadResult part = integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol,
                                max_intervals_per_segment);
    out.value += part.value;
    out.est_error += part.est_error;
    out.evaluations += part.evaluations;
  }
  out.converged =
      out.est_error <= std::fmax(abs_tol * 10, rel_tol * 10 * std::fabs(out.value));
  return out;
}

std::vector<double> geometric_ladder(double a, int levels) {
  std::vector<double> pts;
  pts.push_back(0.0);
  for (int i = levels; i >= 0; --i) pts.push_back(a * std::ldexp(1.0, -i));
  return pts;
}

}  // namespace ewl
