#pragma once

// Sums of Gaussians g = sum_k g_k with
//
//     g_k(x) = exp[i(theta_k + kappa_k . x) + omega_k - (x - x_k)^T Lambda_k (x - x_k)]
//
// and the nonlinear defect g ln|g| - sum_k g_k ln|g_k|, evaluated without
// cancellation as sum_k g_k ln|g / g_k|.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "lognls/error.hpp"
#include "lognls/gaussian_dynamics.hpp"

namespace lognls {

struct GaussianTerm {
  CMatrix Lambda;        // complex symmetric, Re part positive definite
  double omega = 0.0;
  RVector center;
  double theta = 0.0;
  RVector kappa;         // linear phase gradient (may be empty = 0)

  int dim() const { return static_cast<int>(center.size()); }

  /// log g_k(x) (complex).
  cdouble log_value(std::span<const double> x) const {
    cdouble q = 0.0;
    double lin = 0.0;
    const int d = dim();
    double y[3];
    for (int i = 0; i < d; ++i) {
      y[i] = x[i] - center[i];
      if (kappa.size() == d) lin += kappa[i] * x[i];
    }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) q += Lambda(i, j) * (y[i] * y[j]);
    return cdouble(omega - q.real(), theta + lin - q.imag());
  }
};

/// Gausson G_{omega,x0,v,theta} at time t in the normal form above
/// (Lambda = lambda I, amplitude exponent omega + d/2).
inline GaussianTerm gausson_term(const GaussianParams& p, double t) {
  GaussianTerm g;
  g.Lambda = CMatrix::Identity(p.dim, p.dim) * cdouble(p.lambda, 0.0);
  g.omega = p.omega + 0.5 * p.dim;
  g.center = p.x0 + p.v * t;
  g.theta = p.theta + 2.0 * p.lambda * p.omega * t - 0.5 * p.v.squaredNorm() * t;
  g.kappa = p.v;
  return g;
}

struct SeparationInfo {
  double epsilon;   // 1 / min pairwise center distance (0 for N = 1)
  double epsilon0;  // threshold below which the superposition estimate applies
  double lambda_plus;
  double lambda_minus;
  double delta_omega;
  double max_omega;
};

inline SeparationInfo separation_info(std::span<const GaussianTerm> terms) {
  require(!terms.empty(), ErrorKind::InvalidArgument, "need at least one term");
  const int d = terms.front().dim();
  SeparationInfo s{};
  s.lambda_plus = -std::numeric_limits<double>::infinity();
  s.lambda_minus = std::numeric_limits<double>::infinity();
  double wmin = std::numeric_limits<double>::infinity();
  s.max_omega = -std::numeric_limits<double>::infinity();
  for (const auto& g : terms) {
    require(g.dim() == d, ErrorKind::InvalidArgument, "terms must share one dimension");
    const RVector ev = real_part_spectrum(g.Lambda);
    s.lambda_plus = std::max(s.lambda_plus, ev.maxCoeff());
    s.lambda_minus = std::min(s.lambda_minus, ev.minCoeff());
    wmin = std::min(wmin, g.omega);
    s.max_omega = std::max(s.max_omega, g.omega);
  }
  require(s.lambda_minus > 0.0, ErrorKind::InvalidArgument, "Re Lambda must be positive definite");
  s.delta_omega = s.max_omega - wmin;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < terms.size(); ++j)
    for (std::size_t k = j + 1; k < terms.size(); ++k)
      dmin = std::min(dmin, (terms[j].center - terms[k].center).norm());
  s.epsilon = terms.size() > 1 ? 1.0 / dmin : 0.0;
  const double n = static_cast<double>(terms.size());
  const double denom = std::max(std::sqrt(s.delta_omega + 1.0), std::sqrt(std::log(n)));
  s.epsilon0 = std::min(std::sqrt(s.lambda_plus) / denom, std::sqrt(s.lambda_minus / (d + 2.0)));
  return s;
}

/// g ln|g| - sum_k g_k ln|g_k| at x.
inline cdouble log_defect(std::span<const GaussianTerm> terms, std::span<const double> x) {
  const std::size_t n = terms.size();
  if (n <= 1) return 0.0;
  std::vector<cdouble> lg(n);
  for (std::size_t k = 0; k < n; ++k) lg[k] = terms[k].log_value(x);
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& l : lg) lmax = std::max(lmax, l.real());
  cdouble s = 0.0;
  for (const auto& l : lg) s += std::exp(l - lmax);
  const double ln_abs_g = lmax + std::log(std::abs(s));

  cdouble out = 0.0;
  if (std::abs(s) < 0.5) {
    // Destructive interference: no member dominates, the direct form is stable.
    if (std::abs(s) > 0.0) out = std::exp(lmax) * s * ln_abs_g;
    for (std::size_t k = 0; k < n; ++k)
      if (lg[k].real() > -745.0) out -= std::exp(lg[k]) * lg[k].real();
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    double span = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m)
      if (m != k) span = std::max(span, lg[m].real() - lg[k].real());
    double ln_ratio;
    if (span < 300.0) {
      cdouble z = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        if (m != k) z += std::exp(lg[m] - lg[k]);
      ln_ratio = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
    } else {
      ln_ratio = ln_abs_g - lg[k].real();
    }
    if (lg[k].real() < -745.0) continue;  // g_k underflows; contribution is 0 in double
    out += std::exp(lg[k]) * ln_ratio;
  }
  return out;
}

inline cdouble superposition_value(std::span<const GaussianTerm> terms, std::span<const double> x) {
  cdouble s = 0.0;
  for (const auto& g : terms) s += std::exp(g.log_value(x));
  return s;
}

}  // namespace lognls
