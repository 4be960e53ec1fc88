#pragma once

// Exact Gaussian solutions of the focusing logarithmic Schrodinger equation
//
//     i u_t + (1/2) Laplace u + lambda u ln|u|^2 = 0.
//
// Gaussian data stay Gaussian: the quadratic form A(t) obeys the matrix
// Riccati equation dA/dt = -i A^2 + 2 i lambda Re A, and a scalar phase Phi(t)
// is obtained by quadrature. In one dimension the same flow reduces to the
// width equation r'' = 1/r^3 - 2 lambda / r ("breathers").
//
// A Gaussian moving with velocity v carries the Galilean phase exp(i(v.x - |v|^2 t / 2)).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "lognls/error.hpp"
#include "lognls/ode.hpp"

namespace lognls {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// One member of a Gaussian superposition: B^{A_in}_{omega, x0, v, theta}.
struct GaussianParams {
  int dim = 1;
  CMatrix A_in;
  double omega = 0.0;
  RVector x0;
  RVector v;
  double theta = 0.0;
  double lambda = 1.0;

  /// Gausson member (A_in = 2 lambda I).
  static GaussianParams gausson(int dim, double lambda, double omega, RVector x0, RVector v,
                                double theta) {
    GaussianParams p;
    p.dim = dim;
    p.A_in = CMatrix::Identity(dim, dim) * cdouble(2.0 * lambda, 0.0);
    p.omega = omega;
    p.x0 = std::move(x0);
    p.v = std::move(v);
    p.theta = theta;
    p.lambda = lambda;
    return p;
  }

  /// One-dimensional breather member with width data alpha = alpha_r + i alpha_i,
  /// i.e. A_in = 1/alpha_r^2 - i alpha_i/alpha_r.
  static GaussianParams breather(double lambda, double alpha_r, double alpha_i, double omega,
                                 double x0, double v, double theta) {
    GaussianParams p;
    p.dim = 1;
    p.A_in = CMatrix(1, 1);
    p.A_in(0, 0) = cdouble(1.0 / (alpha_r * alpha_r), -alpha_i / alpha_r);
    p.omega = omega;
    p.x0 = RVector::Constant(1, x0);
    p.v = RVector::Constant(1, v);
    p.theta = theta;
    p.lambda = lambda;
    return p;
  }

  bool is_gausson() const {
    const CMatrix ref = CMatrix::Identity(dim, dim) * cdouble(2.0 * lambda, 0.0);
    return (A_in - ref).cwiseAbs().maxCoeff() == 0.0;
  }

  void validate(bool allow_negative_lambda = false) const;
};

/// Symmetric eigenvalues of Re A, ascending.
inline RVector real_part_spectrum(const CMatrix& A) {
  const RMatrix re = 0.5 * (A.real() + A.real().transpose());
  if (re.rows() == 1) return RVector::Constant(1, re(0, 0));
  Eigen::SelfAdjointEigenSolver<RMatrix> es(re, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline void validate_quadratic_form(const CMatrix& A, const char* what) {
  require(A.rows() == A.cols() && A.rows() >= 1, ErrorKind::InvalidArgument,
          std::string(what) + " must be a square matrix");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff()), ErrorKind::InvalidArgument,
          std::string(what) + " must be complex symmetric");
  require(real_part_spectrum(A).minCoeff() > 0.0, ErrorKind::InvalidArgument,
          std::string(what) + ": Re part must be positive definite");
}

inline void GaussianParams::validate(bool allow_negative_lambda) const {
  require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  require(A_in.rows() == dim, ErrorKind::InvalidArgument, "A_in has wrong size");
  require(x0.size() == dim && v.size() == dim, ErrorKind::InvalidArgument,
          "x0 and v must have the member's dimension");
  validate_quadratic_form(A_in, "A_in");
  require(lambda != 0.0 && (allow_negative_lambda || lambda > 0.0), ErrorKind::InvalidArgument,
          "lambda must be positive");
}

/// Time slice of the exact Gaussian flow.
struct GaussianState {
  double t = 0.0;
  CMatrix A;
  double phi = 0.0;
  double det_ratio = 1.0;        // det Re A(t) / det Re A_in
  double eig_min = 0.0;          // running min of sigma(Re A) along the trajectory
  double eig_max = 0.0;          // running max
};

struct BreatherState {
  double t = 0.0;
  double r = 1.0;
  double rdot = 0.0;
  double phi = 0.0;
  double first_integral = 0.0;
};

namespace detail {

inline ode::Vec pack(const CMatrix& A) {
  const auto d = A.rows();
  ode::Vec y(2 * d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      y[i * d + j] = A(i, j).real();
      y[d * d + i * d + j] = A(i, j).imag();
    }
  return y;
}

inline CMatrix unpack(const ode::Vec& y, Eigen::Index d) {
  CMatrix A(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = cdouble(y[i * d + j], y[d * d + i * d + j]);
  return A;
}

inline CMatrix riccati_rhs(const CMatrix& A, double lambda) {
  const cdouble I(0.0, 1.0);
  return -I * (A * A) + (2.0 * lambda) * I * A.real().cast<cdouble>();
}

/// Integrand of the phase and its time derivative along the flow.
struct PhaseIntegrand {
  double value;
  double derivative;
};

inline PhaseIntegrand phase_integrand(const CMatrix& A, double lambda, double log_det_in) {
  const auto d = static_cast<double>(A.rows());
  const RMatrix re = 0.5 * (A.real() + A.real().transpose());
  const RMatrix dre = riccati_rhs(A, lambda).real();
  const Eigen::LDLT<RMatrix> ldlt(re);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < re.rows(); ++i) log_det += std::log(ldlt.vectorD()[i]);
  const double trace = re.trace();
  const double dtrace = dre.trace();
  const double dlogdet = ldlt.solve(dre).trace();
  return {0.5 * trace - 0.5 * lambda * (log_det - log_det_in) - d * lambda,
          0.5 * dtrace - 0.5 * lambda * dlogdet};
}

inline double log_det_real(const CMatrix& A) {
  const RVector ev = real_part_spectrum(A);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::log(ev[i]);
  return s;
}

/// Fourth-order rule on [t0, t1] from endpoint values and derivatives. Equal to
/// Simpson's rule with the midpoint taken from the cubic Hermite interpolant.
inline double hermite_simpson(double h, PhaseIntegrand a, PhaseIntegrand b) {
  return 0.5 * h * (a.value + b.value) + h * h / 12.0 * (a.derivative - b.derivative);
}

}  // namespace detail

/// Integrate dA/dt = -i A^2 + 2 i lambda Re A from A(0) = A_in and report the
/// state at each requested time (times[0] must be 0, increasing). The phase
/// Phi is accumulated on the accepted-step grid.
inline std::vector<GaussianState> evolve_matrix_ode(const CMatrix& A_in, double lambda,
                                                    std::span<const double> times,
                                                    double tol = 1e-10) {
  validate_quadratic_form(A_in, "A_in");
  require(!times.empty() && times.front() == 0.0, ErrorKind::InvalidArgument,
          "times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], ErrorKind::InvalidArgument, "times must be increasing");

  const Eigen::Index d = A_in.rows();
  const CMatrix A0 = 0.5 * (A_in + A_in.transpose());
  const double log_det_in = detail::log_det_real(A0);
  const RVector ev0 = real_part_spectrum(A0);

  auto rhs = [lambda, d](double, const ode::Vec& y) {
    return detail::pack(detail::riccati_rhs(detail::unpack(y, d), lambda));
  };
  ode::Options opts;
  opts.rtol = tol;
  opts.atol = tol;
  ode::DormandPrince45 integrator(rhs, 0.0, detail::pack(A0), opts);

  double phi = 0.0;
  double eig_min = ev0.minCoeff(), eig_max = ev0.maxCoeff();
  auto integrand_prev = detail::phase_integrand(A0, lambda, log_det_in);

  auto hook = [&](ode::Step& s) {
    CMatrix A = detail::unpack(s.y1, d);
    A = 0.5 * (A + A.transpose());
    s.y1 = detail::pack(A);
    const RVector ev = real_part_spectrum(A);
    if (!(ev.minCoeff() > 0.0))
      fail(ErrorKind::PositivityLost,
           "Re A lost positivity at t = " + std::to_string(s.t1));
    eig_min = std::min(eig_min, ev.minCoeff());
    eig_max = std::max(eig_max, ev.maxCoeff());
    const auto integrand = detail::phase_integrand(A, lambda, log_det_in);
    phi += detail::hermite_simpson(s.t1 - s.t0, integrand_prev, integrand);
    integrand_prev = integrand;
    return true;
  };

  std::vector<GaussianState> out;
  out.reserve(times.size());
  for (double t : times) {
    integrator.advance_to(t, hook);
    const CMatrix A = detail::unpack(integrator.state(), d);
    GaussianState s;
    s.t = t;
    s.A = A;
    s.phi = phi;
    s.det_ratio = std::exp(detail::log_det_real(A) - log_det_in);
    s.eig_min = eig_min;
    s.eig_max = eig_max;
    out.push_back(std::move(s));
  }
  return out;
}

/// Phase Phi(t) = 1/2 int Tr Re A - lambda/2 int ln(det Re A / det Re A_in) - d lambda t
/// on the time grid of `states`, by Simpson's rule with Hermite midpoints
/// (the derivative of the integrand is exact from the matrix equation).
inline std::vector<double> phase_integral(std::span<const GaussianState> states, double lambda) {
  require(states.size() >= 3, ErrorKind::GridTooCoarse, "phase quadrature needs >= 3 samples");
  require(states.front().t == 0.0, ErrorKind::InvalidArgument, "states must start at t = 0");
  const double log_det_in = detail::log_det_real(states.front().A);
  std::vector<double> phi(states.size(), 0.0);
  auto prev = detail::phase_integrand(states.front().A, lambda, log_det_in);
  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto cur = detail::phase_integrand(states[k].A, lambda, log_det_in);
    phi[k] = phi[k - 1] + detail::hermite_simpson(states[k].t - states[k - 1].t, prev, cur);
    prev = cur;
  }
  return phi;
}

/// Pointwise evaluator of B^{A_in}_{omega,x0,v,theta}(t, .) at a fixed state.
class GaussianEvaluator {
 public:
  GaussianEvaluator(const GaussianParams& p, const GaussianState& s)
      : dim_(p.dim), A_(s.A), x0_(p.x0), v_(p.v), t_(s.t) {
    const double v2 = p.v.squaredNorm();
    // x-independent part of the exponent.
    const double amp = p.omega + 0.25 * std::log(s.det_ratio) + 0.5 * p.dim;
    const double phase = p.theta + 2.0 * p.lambda * p.omega * s.t - 0.5 * v2 * s.t - s.phi;
    log_prefactor_ = cdouble(amp, phase);
    is_diagonal_ = A_.isDiagonal(0.0);
  }

  cdouble operator()(std::span<const double> x) const {
    double vx = 0.0;
    cdouble quad = 0.0;
    double y[3];
    for (int i = 0; i < dim_; ++i) {
      vx += v_[i] * x[i];
      y[i] = x[i] - x0_[i] - v_[i] * t_;
    }
    if (is_diagonal_) {
      for (int i = 0; i < dim_; ++i) quad += A_(i, i) * (y[i] * y[i]);
    } else {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) quad += A_(i, j) * (y[i] * y[j]);
    }
    return std::exp(log_prefactor_ + cdouble(-0.5 * quad.real(), vx - 0.5 * quad.imag()));
  }

  /// ln|B| at x (no underflow).
  double log_modulus(std::span<const double> x) const {
    double y[3];
    for (int i = 0; i < dim_; ++i) y[i] = x[i] - x0_[i] - v_[i] * t_;
    double quad = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) quad += A_(i, j).real() * (y[i] * y[j]);
    return log_prefactor_.real() - 0.5 * quad;
  }

  RVector center() const { return x0_ + v_ * t_; }

 private:
  int dim_;
  CMatrix A_;
  RVector x0_, v_;
  double t_;
  cdouble log_prefactor_;
  bool is_diagonal_ = false;
};

inline cdouble eval_gaussian_solution(const GaussianParams& p, const GaussianState& s,
                                      std::span<const double> x) {
  require(static_cast<int>(x.size()) == p.dim, ErrorKind::InvalidArgument,
          "point has wrong dimension");
  return GaussianEvaluator(p, s)(x);
}

/// Closed-form Gausson G^d_{omega,x0,v,theta}(t, x).
inline cdouble eval_gausson(double omega, std::span<const double> x0, std::span<const double> v,
                            double theta, double lambda, double t, std::span<const double> x) {
  require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
  const std::size_t d = x.size();
  require(x0.size() == d && v.size() == d, ErrorKind::InvalidArgument, "dimension mismatch");
  double vx = 0.0, v2 = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    vx += v[i] * x[i];
    v2 += v[i] * v[i];
    const double y = x[i] - x0[i] - v[i] * t;
    r2 += y * y;
  }
  const double phase = theta + 2.0 * lambda * omega * t + vx - 0.5 * v2 * t;
  return std::exp(cdouble(0.5 * static_cast<double>(d) + omega - lambda * r2, phase));
}

// ---------------------------------------------------------------------------
// One-dimensional breathers.

inline double breather_first_integral(double r, double rdot, double lambda) {
  return 0.5 * rdot * rdot + 0.5 / (r * r) + 2.0 * lambda * std::log(r);
}

namespace detail {

struct BreatherSystem {
  double lambda;
  ode::Vec operator()(double, const ode::Vec& y) const {
    ode::Vec f(2);
    f[0] = y[1];
    f[1] = 1.0 / (y[0] * y[0] * y[0]) - 2.0 * lambda / y[0];
    return f;
  }
};

inline PhaseIntegrand breather_phase_integrand(double r, double rdot, double lambda,
                                               double alpha_r) {
  return {0.5 / (r * r) + lambda * std::log(r / alpha_r) - lambda,
          -rdot / (r * r * r) + lambda * rdot / r};
}

}  // namespace detail

/// Integrate r'' = 1/r^3 - 2 lambda / r, r(0) = alpha_r, r'(0) = alpha_i and
/// report the state at each requested time (times[0] = 0, increasing).
inline std::vector<BreatherState> evolve_breather(double alpha_r, double alpha_i, double lambda,
                                                  std::span<const double> times,
                                                  double tol = 1e-10) {
  require(alpha_r > 0.0, ErrorKind::InvalidArgument, "alpha_r must be positive");
  require(lambda != 0.0, ErrorKind::InvalidArgument, "lambda must be nonzero");
  require(!times.empty() && times.front() == 0.0, ErrorKind::InvalidArgument,
          "times must start at 0");
  ode::Options opts;
  opts.rtol = tol;
  opts.atol = tol;
  ode::Vec y0(2);
  y0 << alpha_r, alpha_i;
  ode::DormandPrince45 integrator(detail::BreatherSystem{lambda}, 0.0, y0, opts);

  double phi = 0.0;
  auto prev = detail::breather_phase_integrand(alpha_r, alpha_i, lambda, alpha_r);
  auto hook = [&](ode::Step& s) {
    if (!(s.y1[0] > 0.0))
      fail(ErrorKind::NonpositiveWidth, "width became nonpositive at t = " + std::to_string(s.t1));
    const auto cur = detail::breather_phase_integrand(s.y1[0], s.y1[1], lambda, alpha_r);
    phi += detail::hermite_simpson(s.t1 - s.t0, prev, cur);
    prev = cur;
    return false;
  };

  std::vector<BreatherState> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0)
      require(times[i] > times[i - 1], ErrorKind::InvalidArgument, "times must be increasing");
    integrator.advance_to(times[i], hook);
    const auto& y = integrator.state();
    out.push_back({times[i], y[0], y[1], phi, breather_first_integral(y[0], y[1], lambda)});
  }
  return out;
}

/// Uniform output grid convenience overload on [0, t_end].
inline std::vector<BreatherState> evolve_breather(double alpha_r, double alpha_i, double lambda,
                                                  double t_end, double tol, std::size_t samples) {
  require(t_end > 0.0 && samples >= 2, ErrorKind::InvalidArgument, "need t_end > 0, samples >= 2");
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i)
    times[i] = t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
  times.back() = t_end;
  return evolve_breather(alpha_r, alpha_i, lambda, times, tol);
}

struct BreatherPeriod {
  double period;
  double first_maximum;    // time of the first maximum of r after t = 0
  double return_error;     // |r(T) - r(0)| + |r'(T) - r'(0)|
  double invariant_drift;  // |H(T) - H(0)|
};

/// Period of a lambda > 0 breather, located as the spacing of two successive
/// maxima of r (sign changes + to - of r'), each refined by re-stepping from
/// the start of the bracketing step.
inline BreatherPeriod breather_period(double alpha_r, double alpha_i, double lambda,
                                      double tol = 1e-12) {
  require(lambda > 0.0, ErrorKind::InvalidArgument, "breathers are periodic only for lambda > 0");
  require(alpha_r > 0.0, ErrorKind::InvalidArgument, "alpha_r must be positive");
  ode::Options opts;
  opts.rtol = tol;
  opts.atol = tol;
  ode::Vec y0(2);
  y0 << alpha_r, alpha_i;
  const detail::BreatherSystem sys{lambda};
  ode::DormandPrince45 integrator(sys, 0.0, y0, opts);

  std::vector<double> maxima;
  auto refine = [&](double ta, const ode::Vec& ya, double tb) {
    // r'(ta) > 0 >= r'(tb): bisection on single steps from (ta, ya).
    ode::DormandPrince45 local(sys, ta, ya, opts);
    double lo = ta, hi = tb;
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const ode::Vec ym = local.probe(mid - ta);
      (ym[1] > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto hook = [&](ode::Step& s) {
    if (s.y0[1] > 0.0 && s.y1[1] <= 0.0) maxima.push_back(refine(s.t0, s.y0, s.t1));
    return false;
  };
  // The orbit period is finite; grow the horizon until two maxima are seen.
  double horizon = 1.0;
  while (maxima.size() < 2) {
    integrator.advance_to(horizon, hook);
    horizon *= 2.0;
    require(horizon < 1e8, ErrorKind::InvalidArgument, "no periodic orbit detected");
  }
  BreatherPeriod out{};
  out.first_maximum = maxima[0];
  out.period = maxima[1] - maxima[0];

  const double times[] = {0.0, out.period};
  const auto traj = evolve_breather(alpha_r, alpha_i, lambda, times, tol);
  out.return_error = std::abs(traj[1].r - alpha_r) + std::abs(traj[1].rdot - alpha_i);
  out.invariant_drift = std::abs(traj[1].first_integral - traj[0].first_integral);
  return out;
}

struct AsymptoticSample {
  double t;
  double r;
  double ratio;  // r(t) / (2 t sqrt(|lambda| ln t))
};

/// For lambda < 0 the width grows like 2 t sqrt(|lambda| ln t). Returns the
/// ratio on a logarithmic grid (`per_decade` points per decade from t = 10).
/// The decade grid doubles as the integration blocks: the controller's
/// relative tolerance lets the step grow with r inside each block.
inline std::vector<AsymptoticSample> breather_asymptotic_check(double alpha_r, double alpha_i,
                                                               double lambda, double t_end,
                                                               int per_decade = 4,
                                                               double tol = 1e-10) {
  require(lambda < 0.0, ErrorKind::InvalidArgument, "asymptotic check needs lambda < 0");
  require(t_end >= 10.0, ErrorKind::InvalidArgument, "t_end must be >= 10");
  std::vector<double> times{0.0};
  const double decades = std::log10(t_end) - 1.0;
  const int n = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
  for (int k = 0; k <= n; ++k) times.push_back(10.0 * std::pow(t_end / 10.0, double(k) / n));
  times.back() = t_end;
  const auto traj = evolve_breather(alpha_r, alpha_i, lambda, times, tol);
  std::vector<AsymptoticSample> out;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double t = traj[i].t;
    out.push_back({t, traj[i].r, traj[i].r / (2.0 * t * std::sqrt(-lambda * std::log(t)))});
  }
  return out;
}

}  // namespace lognls
