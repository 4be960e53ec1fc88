#pragma once

// Localization around the members of a multi-soliton: a moving partition of
// unity psi_0 ... psi_N, localized mass / momentum / energy and actions, the
// slow variation of S^loc along a trajectory, and the Gausson tail and
// overlap quantities that control the localization errors.
//
// Two clocks appear: t' places the centers x_j + t' v_j, while t sets the
// radius v_* t / 2 + 2 of the transition shell. Along a run t = t' - T''.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lognls/error.hpp"
#include "lognls/fit.hpp"
#include "lognls/gaussian_dynamics.hpp"
#include "lognls/grid.hpp"
#include "lognls/inequalities.hpp"
#include "lognls/quadrature.hpp"
#include "lognls/solver.hpp"

namespace lognls {

/// Quintic smoothstep on [-1, 1]: 1 for s <= -1, 0 for s >= 1, |phi'| <= 15/16.
inline double cutoff(double s) {
  if (s <= -1.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double u = 0.5 * (s + 1.0);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double cutoff_derivative(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 0.5 * (s + 1.0);
  return -15.0 * u * u * (1.0 - u) * (1.0 - u);
}

inline constexpr double kCutoffSlope = 15.0 / 16.0;

struct Partition {
  Grid grid;
  double t_prime = 0.0;
  double t = 0.0;
  double v_star = 0.0;
  std::vector<RVector> centers;
  std::vector<RVector> velocities;
  double radius_inner = 0.0;
  double radius_outer = 0.0;
  std::vector<std::vector<double>> psi;  // psi[0] is the residual

  std::size_t members() const { return centers.size(); }
  double shell_offset() const { return 0.5 * v_star * t + 2.0; }
};

inline double min_center_distance(std::span<const GaussianParams> members, double t_prime) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < members.size(); ++j)
    for (std::size_t k = j + 1; k < members.size(); ++k)
      d = std::min(d, ((members[j].x0 + members[j].v * t_prime) -
                       (members[k].x0 + members[k].v * t_prime)).norm());
  return d;
}

/// Largest t for which the partition at t' has disjoint supports, minus `slack`.
inline double max_partition_time(std::span<const GaussianParams> members, double t_prime,
                                 double v_star, double slack = 1e-6) {
  return (min_center_distance(members, t_prime) - 6.0) / v_star - slack;
}

inline Partition build_partition(std::span<const GaussianParams> members, double t_prime, double t,
                                 double v_star, const Grid& grid) {
  require(!members.empty(), ErrorKind::InvalidArgument, "need at least one member");
  require(v_star > 0.0, ErrorKind::InvalidArgument, "v_star must be positive");
  require(0.5 * v_star * t + 1.0 > 0.0, ErrorKind::SupportsOverlap,
          "inner radius is negative at t = " + std::to_string(t));
  if (members.size() > 1) {
    const double d = min_center_distance(members, t_prime);
    if (!(d > v_star * t + 6.0))
      fail(ErrorKind::SupportsOverlap, "center distance " + std::to_string(d) +
                                           " <= v_* t + 6 = " + std::to_string(v_star * t + 6.0));
  }
  Partition p;
  p.grid = grid;
  p.t_prime = t_prime;
  p.t = t;
  p.v_star = v_star;
  p.radius_inner = 0.5 * v_star * t + 1.0;
  p.radius_outer = 0.5 * v_star * t + 3.0;
  for (const auto& m : members) {
    require(m.dim == grid.dim, ErrorKind::InvalidArgument, "member dimension differs from grid");
    p.centers.push_back(m.x0 + m.v * t_prime);
    p.velocities.push_back(m.v);
  }
  const std::size_t n = members.size();
  p.psi.assign(n + 1, std::vector<double>(grid.size(), 0.0));
  const double off = p.shell_offset();
  for_each_node(grid, [&](std::size_t i, std::span<const double> x) {
    double rest = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim; ++a) r2 += (x[a] - p.centers[j][a]) * (x[a] - p.centers[j][a]);
      const double v = cutoff(std::sqrt(r2) - off);
      p.psi[j + 1][i] = v;
      rest -= v;
    }
    p.psi[0][i] = rest;
  });
  return p;
}

/// d psi_j / dt' along the run t = t' - T'' (centers move with v_j, radius with v_* / 2).
inline std::vector<double> partition_time_derivative(const Partition& p, std::size_t j) {
  require(j >= 1 && j <= p.members(), ErrorKind::InvalidArgument, "member index out of range");
  std::vector<double> out(p.grid.size(), 0.0);
  const RVector& c = p.centers[j - 1];
  const RVector& v = p.velocities[j - 1];
  const double off = p.shell_offset();
  for_each_node(p.grid, [&](std::size_t i, std::span<const double> x) {
    double r2 = 0.0, yv = 0.0;
    for (int a = 0; a < p.grid.dim; ++a) {
      const double y = x[a] - c[a];
      r2 += y * y;
      yv += y * v[a];
    }
    const double r = std::sqrt(r2);
    const double radial_speed = r > 0.0 ? yv / r : 0.0;
    out[i] = cutoff_derivative(r - off) * (-radial_speed - 0.5 * p.v_star);
  });
  return out;
}

/// |grad psi_j| in closed form (|phi'| at the node).
inline std::vector<double> partition_gradient_norm(const Partition& p, std::size_t j) {
  require(j >= 1 && j <= p.members(), ErrorKind::InvalidArgument, "member index out of range");
  std::vector<double> out(p.grid.size(), 0.0);
  const RVector& c = p.centers[j - 1];
  const double off = p.shell_offset();
  for_each_node(p.grid, [&](std::size_t i, std::span<const double> x) {
    double r2 = 0.0;
    for (int a = 0; a < p.grid.dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
    out[i] = std::abs(cutoff_derivative(std::sqrt(r2) - off));
  });
  return out;
}

struct LocalizedReport {
  double t_prime = 0.0;
  std::vector<double> M;         // index 0 is the residual region
  std::vector<RVector> J;
  std::vector<double> E;
  std::vector<double> S;
  double S_loc = 0.0;
  double mass = 0.0;
  double energy = 0.0;           // same quadrature as E_j, so sum_j E_j = energy
};

/// M_j, J_j, E_j and S_j^loc for j = 0 ... N (omega_0 = 0, v_0 = 0).
inline LocalizedReport localized_quantities(const Field& u, const Partition& p,
                                            std::span<const GaussianParams> members, double lambda,
                                            double eps = 1e-14) {
  require(u.grid == p.grid, ErrorKind::GridMismatch, "field and partition grids differ");
  require(members.size() == p.members(), ErrorKind::InvalidArgument, "member count mismatch");
  const Grid& g = u.grid;
  const int d = g.dim;
  const std::size_t n = p.members();
  const auto grad = gradient(u);
  const double vol = g.cell_volume();
  const double eps2 = eps * eps;

  LocalizedReport r;
  r.t_prime = p.t_prime;
  r.M.assign(n + 1, 0.0);
  r.E.assign(n + 1, 0.0);
  r.S.assign(n + 1, 0.0);
  r.J.assign(n + 1, RVector::Zero(d));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cdouble z = u.values[i];
    const double a = std::norm(z);
    double g2 = 0.0;
    double jv[3] = {0.0, 0.0, 0.0};
    for (int ax = 0; ax < d; ++ax) {
      const cdouble dz = grad[ax].values[i];
      g2 += std::norm(dz);
      jv[ax] = (dz * std::conj(z)).imag();
    }
    const double e = 0.5 * g2 - lambda * a * (std::log(eps2 + a) - 1.0);
    r.mass += a;
    r.energy += e;
    for (std::size_t j = 0; j <= n; ++j) {
      const double w = p.psi[j][i];
      if (w == 0.0) continue;
      r.M[j] += a * w;
      r.E[j] += e * w;
      for (int ax = 0; ax < d; ++ax) r.J[j][ax] += jv[ax] * w;
    }
  }
  r.mass *= vol;
  r.energy *= vol;
  for (std::size_t j = 0; j <= n; ++j) {
    r.M[j] *= vol;
    r.E[j] *= vol;
    r.J[j] *= vol;
    r.S[j] = r.E[j];
    if (j >= 1) {
      const auto& m = members[j - 1];
      r.S[j] += (2.0 * lambda * m.omega + 0.5 * m.v.squaredNorm()) * r.M[j] - m.v.dot(r.J[j]);
    }
    r.S_loc += r.S[j];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Slow variation of S^loc.

struct SlowSample {
  double t_prime;
  double t;
  double S_loc;
  double dS_dt;
  double envelope;  // e^{-lambda (v_* t)^2 / 4}
};

struct SlowVariationReport {
  double T_shift = 0.0;
  std::vector<SlowSample> samples;  // interior points only
  double C = 0.0;                   // min C with |dS/dt| <= C envelope above the floor
  double floor = 0.0;
  std::size_t fitted = 0;
  double quad_coeff = 0.0;          // c in ln|dS/dt| ~ a + b t + c t^2
  double r_squared = 0.0;
  double energy_drift = 0.0;        // max |E - E(first)| / |E(first)|
};

/// Centered differences of S^loc(t', u(t')) with the partition at (t', t' - T_shift).
/// Samples with |dS/dt| <= floor are kept in the table but excluded from C and the fit.
/// A negative floor selects the roundoff level 1000 eps max|S| / (2 dt). With
/// require_fit = false a flat trajectory yields C = 0 and a NaN coefficient.
inline SlowVariationReport slow_variation_report(
    std::span<const std::pair<double, Field>> trajectory, std::span<const GaussianParams> members,
    double lambda, double v_star, double T_shift, double floor = -1.0, double eps = 1e-14,
    bool require_fit = true) {
  require(trajectory.size() >= 5, ErrorKind::InsufficientData,
          "slow variation needs at least 5 trajectory samples");
  SlowVariationReport rep;
  rep.T_shift = T_shift;
  std::vector<double> S(trajectory.size()), E(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& [tp, u] = trajectory[i];
    if (i > 0)
      require(tp > trajectory[i - 1].first, ErrorKind::InvalidArgument, "times must increase");
    const Partition part = build_partition(members, tp, tp - T_shift, v_star, u.grid);
    const LocalizedReport lr = localized_quantities(u, part, members, lambda, eps);
    S[i] = lr.S_loc;
    E[i] = lr.energy;
    rep.energy_drift = std::max(rep.energy_drift, std::abs(E[i] - E[0]) / std::abs(E[0]));
  }
  if (floor < 0.0) {
    double smax = 0.0, hmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < S.size(); ++i) {
      smax = std::max(smax, std::abs(S[i]));
      if (i > 0) hmin = std::min(hmin, trajectory[i].first - trajectory[i - 1].first);
    }
    floor = 1e3 * std::numeric_limits<double>::epsilon() * smax / (2.0 * hmin);
  }
  rep.floor = floor;
  std::vector<double> ft, fl;
  for (std::size_t i = 1; i + 1 < trajectory.size(); ++i) {
    SlowSample s;
    s.t_prime = trajectory[i].first;
    s.t = s.t_prime - T_shift;
    s.S_loc = S[i];
    s.dS_dt = (S[i + 1] - S[i - 1]) / (trajectory[i + 1].first - trajectory[i - 1].first);
    s.envelope = std::exp(-lambda * (v_star * s.t) * (v_star * s.t) / 4.0);
    rep.samples.push_back(s);
    if (std::abs(s.dS_dt) > floor) {
      rep.C = std::max(rep.C, std::abs(s.dS_dt) / s.envelope);
      ft.push_back(s.t);
      fl.push_back(std::log(std::abs(s.dS_dt)));
    }
  }
  rep.fitted = ft.size();
  if (!require_fit && ft.size() < 4) {
    rep.quad_coeff = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  require(ft.size() >= 4, ErrorKind::InsufficientData,
          "fewer than 4 derivative samples above the floor");
  const Eigen::VectorXd c = poly_fit(ft, fl, 2, {}, &rep.r_squared);
  rep.quad_coeff = c[2];
  return rep;
}

// ---------------------------------------------------------------------------
// Gausson tails outside the member's own region, by radial quadrature.

namespace detail {

/// Integral over R^d of f(r) * weight(r), with f radial and weight supported on r >= r_lo.
template <class F>
quad::Result radial_integral(int dim, F&& f, double r_lo, std::vector<double> breaks) {
  const double area = unit_sphere_area(dim);
  auto g = [&](double r) {
    const double v = f(r);
    return v == 0.0 ? 0.0 : area * std::pow(r, dim - 1) * v;
  };
  quad::Result res = quad::integrate(g, std::max(0.0, r_lo),
                                     std::numeric_limits<double>::infinity(), std::move(breaks),
                                     1e-12, 1e-6);
  return res;
}

}  // namespace detail

struct GaussonTail {
  double offset = 0.0;  // shell offset R0: weight 1 - phi(r - R0), or 1_{r > R0} when sharp
  double l2 = 0.0;      // ||G||_{L^2}
  double grad = 0.0;    // ||grad G||_{L^2}
  double lp = 0.0;      // ||G||_{L^{2+1/d}}
  double moment2 = 0.0; // || |x - x*|^2 G ||_{L^2}
  double moment3 = 0.0; // || |x - x*|^3 G ||_{L^2}
  double refined_change = 0.0;
};

/// Weighted Gausson norms. The modulus is radial around its center:
/// |G|^2 = exp(d + 2 omega - 2 lambda r^2), |grad G|^2 = |G|^2 (|v|^2 + 4 lambda^2 r^2).
inline GaussonTail gausson_tail_norms(const GaussianParams& m, double offset, bool sharp = false) {
  require(m.lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
  require(m.is_gausson(), ErrorKind::InvalidArgument, "member is not a Gausson");
  const int d = m.dim;
  const double lam = m.lambda, v2 = m.v.squaredNorm();
  const double base = d + 2.0 * m.omega;
  auto weight = [&](double r) {
    if (sharp) return r > offset ? 1.0 : 0.0;
    return 1.0 - cutoff(r - offset);
  };
  const double r_lo = sharp ? offset : offset - 1.0;
  std::vector<double> br;
  if (!sharp) br = {offset, offset + 1.0};
  const double p = 2.0 + 1.0 / d;
  GaussonTail out;
  out.offset = offset;
  auto run = [&](auto poly, double expo_scale) {
    auto f = [&](double r) {
      const double w = weight(r);
      if (w == 0.0) return 0.0;
      const double e = std::exp(expo_scale * (base - 2.0 * lam * r * r));
      return e == 0.0 ? 0.0 : w * poly(r) * e;
    };
    const auto res = detail::radial_integral(d, f, r_lo, br);
    out.refined_change = std::max(out.refined_change, res.refined_change);
    return res.value;
  };
  out.l2 = std::sqrt(run([](double) { return 1.0; }, 1.0));
  out.grad = std::sqrt(run([&](double r) { return v2 + 4.0 * lam * lam * r * r; }, 1.0));
  out.lp = std::pow(run([](double) { return 1.0; }, 0.5 * p), 1.0 / p);
  out.moment2 = std::sqrt(run([](double r) { return r * r * r * r; }, 1.0));
  out.moment3 = std::sqrt(run([](double r) { return r * r * r * r * r * r; }, 1.0));
  return out;
}

struct TailRung {
  double t = 0.0;
  GaussonTail raw;
  double l2_normalized = 0.0;      // x t^3 e^{lambda (v_* t)^2 / 4}
  double grad_normalized = 0.0;    // x t   e^{...}
  double lp_normalized = 0.0;      // x t^3 e^{...}
  double moment_normalized = 0.0;  // (moment2 + moment3) x t e^{...}
};

/// Tail quantities of one Gausson outside psi_j(t) along a ladder of t.
inline std::vector<TailRung> gausson_tail_report(const GaussianParams& m,
                                                 std::span<const double> ts, double v_star) {
  std::vector<TailRung> out;
  for (double t : ts) {
    require(t > 0.0, ErrorKind::InvalidArgument, "tail ladder needs t > 0");
    TailRung r;
    r.t = t;
    r.raw = gausson_tail_norms(m, 0.5 * v_star * t + 2.0);
    const double e = std::exp(m.lambda * (v_star * t) * (v_star * t) / 4.0);
    r.l2_normalized = r.raw.l2 * t * t * t * e;
    r.grad_normalized = r.raw.grad * t * e;
    r.lp_normalized = r.raw.lp * t * t * t * e;
    r.moment_normalized = (r.raw.moment2 + r.raw.moment3) * t * e;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Overlaps of two Gaussons.

struct Overlap {
  double separation = 0.0;
  double weighted = 0.0;   // int |G_j||G_k| (1 + |x - x_j*|^2)
  double grad_mod = 0.0;   // int |grad G_j||G_k|
  double grad_grad = 0.0;  // int |grad G_j||grad G_k|
  double plain = 0.0;      // int |G_j||G_k| (closed form)
};

namespace detail {

/// Integral over R^d of F(a, rho) where a is the coordinate along the line of
/// centers (from the midpoint) and rho the distance to that line.
template <class F>
double axial_integral(int dim, F&& f, double width) {
  const double inf = std::numeric_limits<double>::infinity();
  auto along = [&](double rho) {
    auto g = [&](double a) { return f(a, rho); };
    return quad::integrate(g, -inf, inf, {-width, 0.0, width}, 1e-11, 1e-6).value;
  };
  if (dim == 1) return along(0.0);
  const double area = unit_sphere_area(dim - 1);
  auto h = [&](double rho) {
    const double v = along(rho);
    return v == 0.0 ? 0.0 : area * std::pow(rho, dim - 2) * v;
  };
  return quad::integrate(h, 0.0, inf, {width}, 1e-11, 1e-6).value;
}

}  // namespace detail

/// Overlap integrals of two Gaussons with centers at time t'. The product
/// |G_j||G_k| = exp(d + w_j + w_k - lambda s^2 / 2 - 2 lambda |x - m|^2), m the midpoint.
inline Overlap gausson_overlap(const GaussianParams& a, const GaussianParams& b, double t_prime) {
  require(a.is_gausson() && b.is_gausson(), ErrorKind::InvalidArgument, "members must be Gaussons");
  require(a.dim == b.dim && a.lambda == b.lambda, ErrorKind::InvalidArgument,
          "members must share dimension and lambda");
  const int d = a.dim;
  const double lam = a.lambda;
  const RVector ca = a.x0 + a.v * t_prime, cb = b.x0 + b.v * t_prime;
  const double s = (ca - cb).norm();
  const double pref = std::exp(d + a.omega + b.omega - 0.5 * lam * s * s);
  const double gauss = std::pow(std::numbers::pi / (2.0 * lam), 0.5 * d);
  Overlap o;
  o.separation = s;
  o.plain = pref * gauss;
  o.weighted = pref * gauss * (1.0 + 0.25 * s * s + d / (4.0 * lam));
  const double va2 = a.v.squaredNorm(), vb2 = b.v.squaredNorm();
  const double width = 1.0 / std::sqrt(lam);
  auto core = [&](double x, double rho) { return std::exp(-2.0 * lam * (x * x + rho * rho)); };
  auto ga = [&](double x, double rho) {
    const double y = x + 0.5 * s;  // distance components from center a at -s/2
    return std::sqrt(va2 + 4.0 * lam * lam * (y * y + rho * rho));
  };
  auto gb = [&](double x, double rho) {
    const double y = x - 0.5 * s;
    return std::sqrt(vb2 + 4.0 * lam * lam * (y * y + rho * rho));
  };
  o.grad_mod = pref * detail::axial_integral(
                          d, [&](double x, double rho) { return ga(x, rho) * core(x, rho); }, width);
  o.grad_grad =
      pref * detail::axial_integral(
                 d, [&](double x, double rho) { return ga(x, rho) * gb(x, rho) * core(x, rho); },
                 width);
  return o;
}

struct OverlapRung {
  double t = 0.0;
  double t_prime = 0.0;
  Overlap raw;
  double weighted_normalized = 0.0;  // x t e^{lambda (v_* t)^2 / 2}
  double grad_mod_normalized = 0.0;
  double grad_grad_normalized = 0.0;
};

/// Overlap ladder along t with centers at t' = t + T_shift.
inline std::vector<OverlapRung> gausson_orthogonality_report(const GaussianParams& a,
                                                             const GaussianParams& b,
                                                             std::span<const double> ts,
                                                             double T_shift, double v_star) {
  std::vector<OverlapRung> out;
  for (double t : ts) {
    OverlapRung r;
    r.t = t;
    r.t_prime = t + T_shift;
    r.raw = gausson_overlap(a, b, r.t_prime);
    const double e = t * std::exp(a.lambda * (v_star * t) * (v_star * t) / 2.0);
    r.weighted_normalized = r.raw.weighted * e;
    r.grad_mod_normalized = r.raw.grad_mod * e;
    r.grad_grad_normalized = r.raw.grad_grad * e;
    out.push_back(r);
  }
  return out;
}

}  // namespace lognls
