#pragma once

// Adaptive Gauss-Kronrod quadrature with a resolution-doubling convergence check.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lognls/error.hpp"

namespace lognls::quad {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  double refined_change = 0.0;  // relative change when the resolution is doubled
};

/// Relative tolerances below this sit in the rule's rounding noise.
inline constexpr double kToleranceFloor = 2e-13;

namespace detail {

template <class F>
double gk(F&& f, double a, double b, unsigned depth, double tol, double* err) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol, err);
}

}  // namespace detail

/// Integral of f over [a, b] (b may be +infinity), split at `breaks`. The sum
/// is recomputed with twice the subdivision budget and a 100x tighter (floored)
/// tolerance; a relative change above `accept` raises QuadratureNonconvergent.
template <class F>
Result integrate(F&& f, double a, double b, std::vector<double> breaks = {},
                 double tol = 1e-12, double accept = 1e-3) {
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);

  // Single-rule L1 estimates per piece; each piece then gets a relative
  // tolerance scaled by its share of the total.
  const std::size_t pieces = pts.size() - 1;
  std::vector<double> l1(pieces);
  double l1_total = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    double err = 0.0, L1 = 0.0;
    boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 0, 0.0,
                                                                  &err, &L1);
    l1[i] = std::isfinite(L1) ? L1 : std::numeric_limits<double>::infinity();
    l1_total += l1[i];
  }
  auto run = [&](unsigned depth, double rtol, double* err_total) {
    double s = 0.0;
    *err_total = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
      double err = 0.0;
      double piece_tol = rtol;
      if (l1[i] > 0.0 && std::isfinite(l1_total)) piece_tol = std::min(0.1, rtol * l1_total / l1[i]);
      if (l1[i] == 0.0 && l1_total > 0.0) piece_tol = 0.1;
      s += detail::gk(f, pts[i], pts[i + 1], depth, std::max(piece_tol, rtol), &err);
      *err_total += err;
    }
    return s;
  };
  Result r;
  double e1 = 0.0, e2 = 0.0;
  const double coarse = run(10, tol, &e1);
  const double fine = run(20, std::max(tol * 1e-2, kToleranceFloor), &e2);
  r.value = fine;
  r.error_estimate = e2;
  const double scale = std::max(std::abs(fine), std::numeric_limits<double>::min());
  r.refined_change = std::abs(fine - coarse) / scale;
  if (!std::isfinite(fine) || r.refined_change > accept)
    fail(ErrorKind::QuadratureNonconvergent,
         "relative change " + std::to_string(r.refined_change) + " under refinement");
  return r;
}

}  // namespace lognls::quad
