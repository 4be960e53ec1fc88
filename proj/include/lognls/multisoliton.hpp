#pragma once

// Backward construction of approximate multi-solitons: start from the exact
// superposition B(T_n) = sum_k B_k(T_n), integrate the PDE backward in time and
// measure w_n = u_n - B against the Gaussian-in-time decay rate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lognls/error.hpp"
#include "lognls/fit.hpp"
#include "lognls/gaussian_dynamics.hpp"
#include "lognls/grid.hpp"
#include "lognls/solver.hpp"
#include "lognls/superposition.hpp"

namespace lognls {

/// min_{j != k} |v_j - v_k| (0 for a single member).
inline double velocity_gap(std::span<const GaussianParams> members) {
  double vs = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < members.size(); ++j)
    for (std::size_t k = j + 1; k < members.size(); ++k)
      vs = std::min(vs, (members[j].v - members[k].v).norm());
  return members.size() > 1 ? vs : 0.0;
}

/// Spectral range of Re A_k(t) / 2 over members and t in [0, t_end], from the
/// accepted-step scan of the matrix flow.
struct WidthRange {
  double sigma_minus;  // (1/2) inf sigma(Re A_k(t))
  double sigma_plus;   // (1/2) sup sigma(Re A_k(t))
};

inline WidthRange width_range(std::span<const GaussianParams> members, double t_end,
                              double tol = 1e-10) {
  require(!members.empty(), ErrorKind::InvalidArgument, "need at least one member");
  require(t_end > 0.0, ErrorKind::InvalidArgument, "t_end must be positive");
  WidthRange w{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& p : members) {
    if (p.is_gausson()) {
      w.sigma_minus = std::min(w.sigma_minus, p.lambda);
      w.sigma_plus = std::max(w.sigma_plus, p.lambda);
      continue;
    }
    // Dense output so that extrema between accepted steps are not missed.
    const int n = std::max(64, static_cast<int>(std::ceil(t_end * 200.0)));
    std::vector<double> ts(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = t_end * i / n;
    const auto st = evolve_matrix_ode(p.A_in, p.lambda, ts, tol);
    for (const auto& s : st) {
      const RVector ev = real_part_spectrum(s.A);
      w.sigma_minus = std::min({w.sigma_minus, 0.5 * ev.minCoeff(), 0.5 * s.eig_min});
      w.sigma_plus = std::max({w.sigma_plus, 0.5 * ev.maxCoeff(), 0.5 * s.eig_max});
    }
  }
  return w;
}

struct MultiConfig {
  std::vector<GaussianParams> members;
  std::vector<double> T_n_list{6.0, 8.0, 10.0, 12.0};
  double T_obs = std::numeric_limits<double>::quiet_NaN();  // NaN selects T_sep
  double sample_dt = 0.125;
  double margin_widths = 12.0;

  // Derived by derive().
  double v_star = 0.0;
  double sigma_minus = 0.0;
  double sigma_plus = 0.0;
  double epsilon0 = 0.0;
  double T_sep = 0.0;

  void validate() const {
    require(!members.empty(), ErrorKind::InvalidArgument, "need at least one member");
    const int d = members.front().dim;
    const double lambda = members.front().lambda;
    for (const auto& m : members) {
      m.validate();
      require(m.dim == d, ErrorKind::InvalidArgument, "members must share one dimension");
      require(m.lambda == lambda, ErrorKind::InvalidArgument, "members must share lambda");
    }
    require(!T_n_list.empty(), ErrorKind::InvalidArgument, "T_n list is empty");
    for (std::size_t i = 0; i < T_n_list.size(); ++i) {
      require(T_n_list[i] > 0.0, ErrorKind::InvalidArgument, "T_n must be positive");
      if (i > 0)
        require(T_n_list[i] > T_n_list[i - 1], ErrorKind::InvalidArgument,
                "T_n list must be increasing");
    }
    require(sample_dt > 0.0, ErrorKind::InvalidArgument, "sample_dt must be positive");
  }

  double lambda() const { return members.front().lambda; }

  /// Fills v_*, sigma_-, epsilon_0, T_sep and a default T_obs.
  void derive() {
    validate();
    v_star = velocity_gap(members);
    require(members.size() == 1 || v_star > 0.0, ErrorKind::InvalidArgument,
            "members need pairwise distinct velocities");
    const auto w = width_range(members, T_n_list.back());
    sigma_minus = w.sigma_minus;
    sigma_plus = w.sigma_plus;
    // Superposition normal form: Lambda_k = A_k / 2.
    const double n = static_cast<double>(members.size());
    double wmax = -std::numeric_limits<double>::infinity(), wmin = -wmax;
    for (const auto& m : members) {
      wmax = std::max(wmax, m.omega);
      wmin = std::min(wmin, m.omega);
    }
    const double denom = std::max(std::sqrt(wmax - wmin + 1.0), std::sqrt(std::log(n)));
    const int d = members.front().dim;
    epsilon0 = std::min(std::sqrt(sigma_plus) / denom, std::sqrt(sigma_minus / (d + 2.0)));
    T_sep = 0.0;
    if (members.size() > 1) {
      for (std::size_t j = 0; j < members.size(); ++j)
        for (std::size_t k = 0; k < members.size(); ++k)
          if (j != k)
            T_sep = std::max(T_sep,
                             (1.0 / epsilon0 + (members[j].x0 - members[k].x0).norm()) / v_star);
    }
    if (std::isnan(T_obs)) T_obs = T_sep;
  }

  /// Sample grid of the observation window for final time T_n: T_obs, T_obs + sample_dt, ...
  std::vector<double> sample_times(double T_n) const {
    std::vector<double> ts;
    for (int i = 0;; ++i) {
      const double t = T_obs + i * sample_dt;
      if (t > T_n + 1e-12) break;
      ts.push_back(std::min(t, T_n));
    }
    return ts;
  }
};

/// Box half-width needed to keep every member `margin_widths` widths away from
/// the boundary over [t_lo, t_hi] (width 1/sqrt(2 sigma_-)).
inline double required_half_extent(const MultiConfig& cfg, double t_lo, double t_hi) {
  double reach = 0.0;
  for (const auto& m : cfg.members)
    for (double t : {t_lo, t_hi})
      reach = std::max(reach, (m.x0 + m.v * t).cwiseAbs().maxCoeff());
  return reach + cfg.margin_widths / std::sqrt(2.0 * cfg.sigma_minus);
}

/// Smallest power-of-two grid on a box covering [t_lo, t_hi] with spacing <= h_max.
inline Grid auto_grid(const MultiConfig& cfg, double t_lo, double t_hi, double h_max = 0.08) {
  const double L = 2.0 * std::ceil(required_half_extent(cfg, t_lo, t_hi));
  int n = 16;
  while (L / n > h_max) n *= 2;
  return Grid(cfg.members.front().dim, L, n);
}

namespace detail {

inline void check_box(const MultiConfig& cfg, const Grid& grid, double t) {
  const double need = required_half_extent(cfg, t, t);
  if (need > 0.5 * grid.extent)
    fail(ErrorKind::BoxTooSmall, "box half-width " + std::to_string(0.5 * grid.extent) +
                                     " < required " + std::to_string(need) +
                                     " at t = " + std::to_string(t));
}

/// Exact member states at the requested times (sorted, deduplicated).
class MemberFlows {
 public:
  MemberFlows(std::span<const GaussianParams> members, std::vector<double> times) {
    times.push_back(0.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    times_ = times;
    for (const auto& p : members) {
      members_.push_back(p);
      if (p.is_gausson()) {
        std::vector<GaussianState> st;
        for (double t : times_) {
          GaussianState s;
          s.t = t;
          s.A = p.A_in;
          s.eig_min = s.eig_max = 2.0 * p.lambda;
          st.push_back(s);
        }
        states_.push_back(std::move(st));
      } else {
        states_.push_back(evolve_matrix_ode(p.A_in, p.lambda, times_));
      }
    }
  }

  const GaussianState& state(std::size_t member, double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    require(it != times_.end() && *it == t, ErrorKind::InvalidArgument, "time not precomputed");
    return states_[member][static_cast<std::size_t>(it - times_.begin())];
  }

  Field superposition(const Grid& grid, double t) const {
    std::vector<GaussianEvaluator> ev;
    for (std::size_t k = 0; k < members_.size(); ++k) ev.emplace_back(members_[k], state(k, t));
    return sample(
        [&](std::span<const double> x) {
          cdouble s = 0.0;
          for (const auto& e : ev) s += e(x);
          return s;
        },
        grid);
  }

 private:
  std::vector<GaussianParams> members_;
  std::vector<double> times_;
  std::vector<std::vector<GaussianState>> states_;
};

}  // namespace detail

/// B(T_n) = sum_k B_k(T_n) on the grid.
inline Field make_final_data(const MultiConfig& cfg, double T_n, const Grid& grid) {
  cfg.validate();
  detail::check_box(cfg, grid, T_n);
  const detail::MemberFlows flows(cfg.members, {T_n});
  return flows.superposition(grid, T_n);
}

struct ErrorSample {
  double t;
  double l2;
  double h1;
  double fh1;
};

struct BuildResult {
  double T_n = 0.0;
  Grid grid;
  std::vector<ErrorSample> samples;  // increasing t
  std::vector<Field> fields;         // u_n at the sample times when requested
};

/// Integrate backward from u_n(T_n) = B(T_n) and record ||w_n|| at the sample
/// times (all in [T_obs, T_n]). Separation is enforced over the window.
inline BuildResult build_approximate_multisoliton(const MultiConfig& cfg, double T_n,
                                                  const SolverConfig& solver, const Grid& grid,
                                                  std::vector<double> sample_times,
                                                  bool keep_fields = false) {
  cfg.validate();
  std::sort(sample_times.begin(), sample_times.end());
  for (double t : sample_times) {
    require(t <= T_n && t >= cfg.T_obs - 1e-12, ErrorKind::InvalidArgument,
            "sample times must lie in [T_obs, T_n]");
    detail::check_box(cfg, grid, t);
    if (cfg.members.size() > 1 && cfg.epsilon0 > 0.0) {
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cfg.members.size(); ++j)
        for (std::size_t k = j + 1; k < cfg.members.size(); ++k) {
          const auto& a = cfg.members[j];
          const auto& b = cfg.members[k];
          dmin = std::min(dmin, ((a.x0 + a.v * t) - (b.x0 + b.v * t)).norm());
        }
      if (dmin < (1.0 - 1e-9) / cfg.epsilon0)
        fail(ErrorKind::SeparationViolated,
             "centers are " + std::to_string(dmin) + " apart at t = " + std::to_string(t) +
                 ", below 1/epsilon0 = " + std::to_string(1.0 / cfg.epsilon0));
    }
  }
  detail::check_box(cfg, grid, T_n);

  std::vector<double> flow_times = sample_times;
  flow_times.push_back(T_n);
  const detail::MemberFlows flows(cfg.members, flow_times);
  const Field uT = flows.superposition(grid, T_n);

  BuildResult res;
  res.T_n = T_n;
  res.grid = grid;
  if (sample_times.empty()) return res;
  SolverConfig sc = solver;
  sc.dt = -std::abs(sc.dt);
  const auto traj = integrate(uT, T_n, sample_times.front(), sc, sample_times);
  // traj is ordered backward in time.
  for (auto it = traj.rbegin(); it != traj.rend(); ++it) {
    const double t = it->first;
    if (!std::binary_search(sample_times.begin(), sample_times.end(), t)) continue;
    const Field B = flows.superposition(grid, t);
    res.samples.push_back(
        {t, l2_distance(it->second, B), h1_distance(it->second, B), fh1_distance(it->second, B)});
    if (keep_fields) res.fields.push_back(it->second);
  }
  return res;
}

struct DecayFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double floor = 0.0;
  std::size_t used = 0;
};

/// Least-squares fit ln err = a + b t + c t^2 on samples with err > 10 floor.
inline DecayFit fit_gaussian_decay(std::span<const double> times, std::span<const double> errors,
                                   double floor = 0.0, std::span<const double> weights = {}) {
  require(times.size() == errors.size(), ErrorKind::InvalidArgument, "length mismatch");
  std::vector<double> t, y, w;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (errors[i] > 10.0 * floor && errors[i] > 0.0) {
      t.push_back(times[i]);
      y.push_back(std::log(errors[i]));
      if (!weights.empty()) w.push_back(weights[i]);
    }
  require(t.size() >= 6, ErrorKind::InsufficientData,
          "need >= 6 samples above the floor, have " + std::to_string(t.size()));
  DecayFit f;
  const auto coef = poly_fit(t, y, 2, w, &f.r_squared);
  f.a = coef[0];
  f.b = coef[1];
  f.c = coef[2];
  f.t_lo = *std::min_element(t.begin(), t.end());
  f.t_hi = *std::max_element(t.begin(), t.end());
  f.floor = floor;
  f.used = t.size();
  return f;
}

/// ||u - v||(t) / (||u0 - v0|| e^{-2 lambda t}); distinct solutions cannot
/// approach each other faster than e^{-2 lambda t}.
inline std::vector<EnvelopeSample> rigidity_lower_bound_check(const Field& u0, const Field& v0,
                                                              const SolverConfig& cfg,
                                                              double t_end, int samples = 20) {
  require(cfg.lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
  require(l2_distance(u0, v0) > 0.0, ErrorKind::InvalidArgument, "u0 and v0 must differ");
  return detail::pair_ratio(u0, v0, cfg, t_end, samples, -2.0 * cfg.lambda);
}

struct LadderRun {
  MultiConfig config;
  Grid grid;
  std::vector<BuildResult> rungs;  // one per T_n
  BuildResult control;             // first member alone, on the largest rung
  double floor = 0.0;              // max control L^2 error over the window
  std::vector<std::string> notes;
};

/// Runs every rung of cfg.T_n_list plus the N = 1 control run.
inline LadderRun run_ladder(MultiConfig cfg, const SolverConfig& solver,
                            const Grid* grid_override = nullptr, bool keep_fields = false) {
  cfg.derive();
  LadderRun out;
  const double T_max = cfg.T_n_list.back();
  out.grid = grid_override ? *grid_override : auto_grid(cfg, cfg.T_obs, T_max);
  for (double T_n : cfg.T_n_list) {
    const auto ts = T_n >= cfg.T_obs ? cfg.sample_times(T_n) : std::vector<double>{};
    if (ts.empty())
      out.notes.push_back("T_n = " + std::to_string(T_n) + " ends before T_obs = " +
                          std::to_string(cfg.T_obs) + "; no samples in the window");
    out.rungs.push_back(
        build_approximate_multisoliton(cfg, T_n, solver, out.grid, ts, keep_fields));
  }
  MultiConfig single = cfg;
  single.members = {cfg.members.front()};
  out.control = build_approximate_multisoliton(single, T_max, solver, out.grid,
                                               cfg.sample_times(T_max));
  for (const auto& s : out.control.samples) out.floor = std::max(out.floor, s.l2);
  out.config = std::move(cfg);
  return out;
}

}  // namespace lognls
