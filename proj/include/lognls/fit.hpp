#pragma once

// Small least-squares fits used by the rate experiments.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "lognls/error.hpp"

namespace lognls {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Weighted polynomial least squares; returns coefficients (lowest degree first)
/// and the coefficient of determination.
inline Eigen::VectorXd poly_fit(std::span<const double> x, std::span<const double> y, int degree,
                                std::span<const double> w, double* r_squared) {
  const auto n = static_cast<Eigen::Index>(x.size());
  require(n > degree && static_cast<Eigen::Index>(y.size()) == n, ErrorKind::InsufficientData,
          "not enough points for the fit");
  Eigen::MatrixXd V(n, degree + 1);
  Eigen::VectorXd Y(n), W = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j, p *= x[i]) V(i, j) = p;
    Y[i] = y[i];
    if (!w.empty()) W[i] = std::sqrt(w[i]);
  }
  const Eigen::MatrixXd VW = W.asDiagonal() * V;
  const Eigen::VectorXd YW = W.asDiagonal() * Y;
  const Eigen::VectorXd coef = VW.colPivHouseholderQr().solve(YW);
  if (r_squared) {
    const Eigen::VectorXd res = YW - VW * coef;
    double wsum = W.squaredNorm(), mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += W[i] * W[i] * Y[i];
    mean /= wsum;
    double tot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) tot += W[i] * W[i] * (Y[i] - mean) * (Y[i] - mean);
    *r_squared = tot > 0.0 ? 1.0 - res.squaredNorm() / tot : 1.0;
  }
  return coef;
}

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const Eigen::VectorXd c = poly_fit(x, y, 1, {}, &f.r_squared);
  f.intercept = c[0];
  f.slope = c[1];
  return f;
}

}  // namespace lognls
