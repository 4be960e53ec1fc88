#pragma once

// Split-step Fourier solver for i u_t + (1/2) Laplace u + lambda u ln|u|^2 = 0 on a
// periodic box, with the logarithm regularized as ln(eps^2 + |u|^2), and the
// conserved functionals and norms used throughout the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lognls/error.hpp"
#include "lognls/fft.hpp"
#include "lognls/grid.hpp"

namespace lognls {

enum class Splitting { Lie, Strang };

struct SolverConfig {
  double lambda = 1.0;
  double dt = 1e-3;
  double eps = 1e-14;
  Splitting splitting = Splitting::Strang;
  bool dealias = false;
  double tail_tol = 1e-10;
  bool monitor = true;  // aliasing / boundary-leak checks after each step

  void validate() const {
    require(std::isfinite(lambda), ErrorKind::InvalidArgument, "lambda must be finite");
    require(dt != 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "dt must be nonzero");
    require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
    require(tail_tol > 0.0, ErrorKind::InvalidArgument, "tail_tol must be positive");
  }
};

namespace detail {

inline double kinetic_symbol(const Grid& g, std::size_t idx) {
  const auto ijk = g.unravel(idx);
  double k2 = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double k = g.wavenumber(ijk[a]);
    k2 += k * k;
  }
  return k2;
}

/// True if any axis index lies in the upper third of |frequency|.
inline bool high_third(const Grid& g, std::size_t idx) {
  const auto ijk = g.unravel(idx);
  for (int a = 0; a < g.dim; ++a) {
    const int m = ijk[a] < g.n / 2 ? ijk[a] : g.n - ijk[a];
    if (3 * m > g.n) return true;
  }
  return false;
}

inline bool near_boundary(const Grid& g, std::size_t idx, int layers) {
  const auto ijk = g.unravel(idx);
  for (int a = 0; a < g.dim; ++a)
    if (ijk[a] < layers || ijk[a] >= g.n - layers) return true;
  return false;
}

}  // namespace detail

/// Split-step propagator bound to one grid. Multipliers are tabulated per dt.
class Solver {
 public:
  Solver(const Grid& grid, SolverConfig cfg) : grid_(grid), cfg_(cfg), fft_(Fft::for_grid(grid)) {
    grid_.validate();
    cfg_.validate();
    const std::size_t total = grid_.size();
    k2_.resize(total);
    high_.resize(total);
    edge_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      k2_[i] = detail::kinetic_symbol(grid_, i);
      high_[i] = detail::high_third(grid_, i);
      edge_[i] = detail::near_boundary(grid_, i, 4);
    }
    buf_.resize(total);
  }

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return cfg_; }

  /// One step of signed size dt (may differ from cfg.dt for fractional steps).
  void step(Field& u, double dt) {
    require(u.grid == grid_, ErrorKind::GridMismatch, "field grid does not match solver grid");
    const std::size_t total = grid_.size();
    const double inv_n = 1.0 / static_cast<double>(total);
    cdouble* data = u.values.data();

    auto kinetic = [&](double tau, bool monitor) {
      fft_.forward(data, buf_.data());
      prepare_multiplier(tau);
      double hi = 0.0, all = 0.0;
      for (std::size_t i = 0; i < total; ++i) {
        buf_[i] *= mult_[i];
        if (cfg_.dealias && high_[i]) buf_[i] = 0.0;
        if (monitor) {
          const double p = std::norm(buf_[i]);
          all += p;
          if (high_[i]) hi += p;
        }
      }
      if (monitor && all > 0.0 && hi > cfg_.tail_tol * all)
        fail(ErrorKind::AliasingOverflow,
             "high-frequency spectral fraction " + std::to_string(hi / all) + " exceeds tail_tol");
      fft_.backward(buf_.data(), data);
      for (std::size_t i = 0; i < total; ++i) data[i] *= inv_n;
    };
    auto nonlinear = [&](double tau) {
      const double eps2 = cfg_.eps * cfg_.eps;
      for (std::size_t i = 0; i < total; ++i) {
        const double a = std::norm(data[i]);
        const double th = cfg_.lambda * tau * std::log(eps2 + a);
        data[i] *= cdouble(std::cos(th), std::sin(th));
      }
    };

    if (cfg_.splitting == Splitting::Strang) {
      kinetic(0.5 * dt, false);
      nonlinear(dt);
      kinetic(0.5 * dt, cfg_.monitor);
    } else {
      kinetic(dt, cfg_.monitor);
      nonlinear(dt);
    }
    check_state(u);
  }

  /// Advance from t0 to t1 exactly: whole steps of |cfg.dt| then one fractional step.
  void advance(Field& u, double t0, double t1) {
    if (t1 == t0) return;
    const double span = t1 - t0;
    const double h = std::abs(cfg_.dt) * (span > 0 ? 1.0 : -1.0);
    const double ratio = span / h;
    auto whole = static_cast<long long>(std::floor(ratio));
    if (ratio - static_cast<double>(whole) < 1e-9) --whole;  // last step absorbs roundoff
    for (long long k = 0; k < whole; ++k) step(u, h);
    step(u, span - static_cast<double>(whole) * h);
  }

  /// Integrate from t0 to t1, recording the field at each observer time
  /// (observer times outside [t0, t1] are rejected).
  std::vector<std::pair<double, Field>> integrate(Field u, double t0, double t1,
                                                  std::vector<double> observers) {
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    for (double t : observers)
      require((t - t0) * dir >= 0.0 && (t1 - t) * dir >= 0.0, ErrorKind::InvalidArgument,
              "observer time outside the integration interval");
    std::sort(observers.begin(), observers.end(),
              [dir](double a, double b) { return a * dir < b * dir; });
    std::vector<std::pair<double, Field>> out;
    out.reserve(observers.size());
    double t = t0;
    for (double target : observers) {
      advance(u, t, target);
      t = target;
      out.emplace_back(t, u);
    }
    advance(u, t, t1);
    if (observers.empty() || observers.back() != t1) out.emplace_back(t1, std::move(u));
    return out;
  }

 private:
  void prepare_multiplier(double tau) {
    if (tau == mult_tau_ && !mult_.empty()) return;
    mult_.resize(k2_.size());
    for (std::size_t i = 0; i < k2_.size(); ++i) {
      const double th = -0.5 * k2_[i] * tau;
      mult_[i] = cdouble(std::cos(th), std::sin(th));
    }
    mult_tau_ = tau;
  }

  void check_state(const Field& u) const {
    double edge = 0.0, all = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const cdouble z = u.values[i];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        fail(ErrorKind::NonFiniteState, "solver produced a non-finite value");
      if (cfg_.monitor) {
        const double p = std::norm(z);
        all += p;
        if (edge_[i]) edge += p;
      }
    }
    if (cfg_.monitor && all > 0.0 && edge > cfg_.tail_tol * all)
      fail(ErrorKind::BoundaryLeak,
           "mass fraction " + std::to_string(edge / all) + " near the boundary exceeds tail_tol");
  }

  Grid grid_;
  SolverConfig cfg_;
  const Fft& fft_;
  std::vector<double> k2_;
  std::vector<char> high_, edge_;
  std::vector<cdouble> buf_, mult_;
  double mult_tau_ = 0.0;
};

/// Convenience single step returning a new field.
inline Field step(Field u, const SolverConfig& cfg) {
  Solver s(u.grid, cfg);
  s.step(u, cfg.dt);
  return u;
}

inline std::vector<std::pair<double, Field>> integrate(const Field& u0, double t0, double t1,
                                                       SolverConfig cfg,
                                                       std::vector<double> observers = {}) {
  if ((t1 - t0) * cfg.dt < 0.0) cfg.dt = -cfg.dt;
  Solver s(u0.grid, cfg);
  return s.integrate(u0, t0, t1, std::move(observers));
}

// ---------------------------------------------------------------------------
// Norms and functionals.

/// Spectral derivative along `axis` (Nyquist mode dropped).
inline Field partial(const Field& u, int axis) {
  const Grid& g = u.grid;
  const Fft& fft = Fft::for_grid(g);
  Field out(g);
  fft.forward(u.values.data(), out.values.data());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int k = g.unravel(i)[axis];
    out.values[i] *= g.is_nyquist(k) ? cdouble(0.0) : cdouble(0.0, g.wavenumber(k) * inv_n);
  }
  fft.backward(out.values.data(), out.values.data());
  return out;
}

inline std::vector<Field> gradient(const Field& u) {
  std::vector<Field> g;
  for (int a = 0; a < u.grid.dim; ++a) g.push_back(partial(u, a));
  return g;
}

struct NormReport {
  double mass = 0.0;
  Eigen::VectorXd momentum;
  double energy = 0.0;
  double kinetic = 0.0;  // (1/2)||grad u||^2
  double l2 = 0.0;
  double h1 = 0.0;
  double fh1 = 0.0;
  double linf = 0.0;
};

inline double mass(const Field& u) {
  double s = 0.0;
  for (const auto& z : u.values) s += std::norm(z);
  return s * u.grid.cell_volume();
}

inline double second_moment(const Field& u) {
  double s = 0.0;
  for_each_node(u.grid, [&](std::size_t i, std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    s += r2 * std::norm(u.values[i]);
  });
  return s * u.grid.cell_volume();
}

/// ||grad u||^2 from the spectrum (all modes, matching the kinetic propagator).
inline double gradient_sq(const Field& u) {
  const Grid& g = u.grid;
  std::vector<cdouble> hat(g.size());
  Fft::for_grid(g).forward(u.values.data(), hat.data());
  double s = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) s += detail::kinetic_symbol(g, i) * std::norm(hat[i]);
  return s * g.cell_volume() / static_cast<double>(g.size());
}

inline NormReport norms(const Field& u, const SolverConfig& cfg) {
  const Grid& g = u.grid;
  const double vol = g.cell_volume();
  std::vector<cdouble> hat(g.size());
  Fft::for_grid(g).forward(u.values.data(), hat.data());
  NormReport r;
  r.momentum = Eigen::VectorXd::Zero(g.dim);
  double grad2 = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double p = std::norm(hat[i]);
    const auto ijk = g.unravel(i);
    for (int a = 0; a < g.dim; ++a) {
      const double k = g.wavenumber(ijk[a]);
      grad2 += k * k * p;
      if (!g.is_nyquist(ijk[a])) r.momentum[a] += k * p;
    }
  }
  const double spec = vol / static_cast<double>(g.size());
  grad2 *= spec;
  r.momentum *= spec;

  const double eps2 = cfg.eps * cfg.eps;
  double m = 0.0, pot = 0.0, linf = 0.0;
  for (const auto& z : u.values) {
    const double a = std::norm(z);
    m += a;
    pot += a * (std::log(eps2 + a) - 1.0);
    linf = std::max(linf, std::sqrt(a));
  }
  r.mass = m * vol;
  r.kinetic = 0.5 * grad2;
  r.energy = r.kinetic - cfg.lambda * pot * vol;
  r.l2 = std::sqrt(r.mass);
  r.h1 = std::sqrt(r.mass + grad2);
  r.fh1 = std::sqrt(r.mass + second_moment(u));
  r.linf = linf;
  return r;
}

inline double energy(const Field& u, const SolverConfig& cfg) { return norms(u, cfg).energy; }

inline double l2_distance(const Field& a, const Field& b) {
  require(a.grid == b.grid, ErrorKind::GridMismatch, "fields live on different grids");
  return std::sqrt(mass(a - b));
}

inline double h1_distance(const Field& a, const Field& b) {
  require(a.grid == b.grid, ErrorKind::GridMismatch, "fields live on different grids");
  const Field w = a - b;
  return std::sqrt(mass(w) + gradient_sq(w));
}

inline double fh1_distance(const Field& a, const Field& b) {
  require(a.grid == b.grid, ErrorKind::GridMismatch, "fields live on different grids");
  const Field w = a - b;
  return std::sqrt(mass(w) + second_moment(w));
}

// ---------------------------------------------------------------------------
// L^2 stability envelope: ||u - v||(t) <= ||u0 - v0|| e^{2 lambda |t|}.

struct EnvelopeSample {
  double t;
  double distance;
  double ratio;
};

namespace detail {

inline std::vector<double> uniform_times(double t_end, int samples) {
  require(samples >= 1, ErrorKind::InvalidArgument, "need at least one sample");
  std::vector<double> ts;
  for (int i = 1; i <= samples; ++i) ts.push_back(t_end * i / samples);
  ts.back() = t_end;
  return ts;
}

/// Run u0 and v0 side by side and report ||u - v|| / (||u0 - v0|| e^{rate |t|}).
inline std::vector<EnvelopeSample> pair_ratio(const Field& u0, const Field& v0, SolverConfig cfg,
                                              double t_end, int samples, double rate) {
  require(u0.grid == v0.grid, ErrorKind::GridMismatch, "fields live on different grids");
  const double d0 = l2_distance(u0, v0);
  const auto ts = uniform_times(t_end, samples);
  const auto tu = integrate(u0, 0.0, t_end, cfg, ts);
  const auto tv = integrate(v0, 0.0, t_end, cfg, ts);
  std::vector<EnvelopeSample> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = l2_distance(tu[i].second, tv[i].second);
    const double env = d0 * std::exp(rate * std::abs(ts[i]));
    out.push_back({ts[i], d, d0 == 0.0 ? 0.0 : d / env});
  }
  return out;
}

}  // namespace detail

inline std::vector<EnvelopeSample> stability_envelope_check(const Field& u0, const Field& v0,
                                                            const SolverConfig& cfg, double t_end,
                                                            int samples = 20) {
  require(cfg.lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
  return detail::pair_ratio(u0, v0, cfg, t_end, samples, 2.0 * cfg.lambda);
}

}  // namespace lognls
