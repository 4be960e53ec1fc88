#pragma once

// The twelve acceptance criteria at desk scale. Each criterion returns a
// pass flag, its measured metrics and the wall time it took.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lognls/lognls.hpp"

namespace lognls::acceptance {

using nlohmann::json;

struct Options {
  std::uint64_t seed = 42;
  std::uint64_t samples = 1000000;  // per inequality lemma
  unsigned jobs = 1;
  std::set<int> only;               // empty = all
  std::optional<int> corrupt;       // criterion whose tolerances are made unsatisfiable
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;
  json metrics = json::object();
};

inline json to_json(const Result& r) {
  return {{"id", r.id},           {"name", r.name},         {"pass", r.pass},
          {"seconds", r.seconds}, {"time_limit", r.time_limit}, {"detail", r.detail},
          {"metrics", r.metrics}};
}

namespace detail {

/// Tolerance helpers that collapse to impossible values for the corrupted criterion.
struct Tol {
  bool corrupted = false;
  double upper(double x) const { return corrupted ? -std::numeric_limits<double>::infinity() : x; }
  double lower(double x) const { return corrupted ? std::numeric_limits<double>::infinity() : x; }
};

inline bool in_range(double x, double lo, double hi, const Tol& t) {
  return x >= t.lower(lo) && x <= t.upper(hi);
}

inline GaussianParams unit_gausson(double lambda = 1.0, double omega = 0.0, double x0 = 0.0,
                                   double v = 0.0) {
  return GaussianParams::gausson(1, lambda, omega, RVector::Constant(1, x0),
                                 RVector::Constant(1, v), 0.0);
}

inline Field gausson_field(const GaussianParams& p, const Grid& g, double t = 0.0) {
  return sample(
      [&](std::span<const double> x) {
        return eval_gausson(p.omega, std::span<const double>(p.x0.data(), p.dim),
                            std::span<const double>(p.v.data(), p.dim), p.theta, p.lambda, t, x);
      },
      g);
}

/// Gausson and a nearby distinct solution datum (shifted, rescaled, kicked).
inline std::pair<Field, Field> perturbed_pair(const Grid& g) {
  const auto p = unit_gausson();
  const Field u0 = gausson_field(p, g);
  const auto q = unit_gausson(1.0, 0.02, 0.1, 0.05);
  Field v0 = gausson_field(q, g);
  return {u0, v0};
}

inline MultiConfig two_member_config(bool breathers) {
  MultiConfig cfg;
  if (breathers)
    cfg.members = {GaussianParams::breather(1.0, 1.0, 0.0, 0.0, -8.0, 1.0, 0.0),
                   GaussianParams::breather(1.0, 1.0, 0.0, 0.0, 8.0, -1.0, 0.0)};
  else
    cfg.members = {unit_gausson(1.0, 0.0, -8.0, 1.0), unit_gausson(1.0, 0.0, 8.0, -1.0)};
  return cfg;
}

inline constexpr double kFitCut = 1.0;  // samples within this of T_n are excluded

struct RateOutcome {
  DecayFit l2;
  std::optional<DecayFit> h1, fh1;
  bool h1_decreasing = true, fh1_decreasing = true;
  double floor = 0.0;
  double T_sep = 0.0, sigma_minus = 0.0, v_star = 0.0;
  std::vector<std::string> notes;
};

inline RateOutcome ladder_rate(bool breathers) {
  MultiConfig cfg = two_member_config(breathers);
  SolverConfig sc;
  sc.lambda = 1.0;
  sc.dt = 1e-3;
  const LadderRun run = run_ladder(cfg, sc);
  RateOutcome out;
  out.floor = run.floor;
  out.T_sep = run.config.T_sep;
  out.sigma_minus = run.config.sigma_minus;
  out.v_star = run.config.v_star;
  out.notes = run.notes;
  const BuildResult& top = run.rungs.back();
  std::vector<double> t, l2, h1, fh1;
  for (const auto& s : top.samples)
    if (s.t <= top.T_n - kFitCut) {
      t.push_back(s.t);
      l2.push_back(s.l2);
      h1.push_back(s.h1);
      fh1.push_back(s.fh1);
    }
  out.l2 = fit_gaussian_decay(t, l2, run.floor);
  // H^1 and F(H^1) are judged on the samples the L^2 fit used.
  std::vector<double> tw, hw, fw;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= out.l2.t_lo && t[i] <= out.l2.t_hi) {
      tw.push_back(t[i]);
      hw.push_back(h1[i]);
      fw.push_back(fh1[i]);
    }
  for (std::size_t i = 1; i < tw.size(); ++i) {
    out.h1_decreasing = out.h1_decreasing && hw[i] < hw[i - 1];
    out.fh1_decreasing = out.fh1_decreasing && fw[i] < fw[i - 1];
  }
  out.h1 = fit_gaussian_decay(tw, hw);
  out.fh1 = fit_gaussian_decay(tw, fw);
  return out;
}

inline json fit_json(const DecayFit& f) {
  return {{"a", f.a},       {"b", f.b},       {"c", f.c}, {"r_squared", f.r_squared},
          {"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"used", f.used}, {"floor", f.floor}};
}

}  // namespace detail

struct Criterion {
  int id;
  std::string name;
  double time_limit;
  std::function<void(Result&, const Options&, const detail::Tol&)> run;
};

inline std::vector<Criterion> criteria() {
  using detail::Tol;
  std::vector<Criterion> c;

  c.push_back({1, "gausson fixed point of the matrix ODE", 1.0,
               [](Result& r, const Options&, const Tol& tol) {
                 std::vector<double> ts;
                 for (int i = 0; i <= 200; ++i) ts.push_back(0.1 * i);
                 double worst = 0.0;
                 for (double lam : {0.5, 1.0, 2.0})
                   for (int d = 1; d <= 3; ++d) {
                     const CMatrix A = CMatrix::Identity(d, d) * cdouble(2.0 * lam, 0.0);
                     for (const auto& s : evolve_matrix_ode(A, lam, ts))
                       worst = std::max(worst, (s.A - A).cwiseAbs().maxCoeff());
                   }
                 r.metrics["max_deviation"] = worst;
                 r.pass = worst < tol.upper(1e-12);
                 r.detail = "max |A(t) - 2 lambda I| = " + io::format_double(worst);
               }});

  c.push_back({2, "breather periodicity", 1.0, [](Result& r, const Options&, const Tol& tol) {
                 const auto p = breather_period(1.0, 0.0, 1.0);
                 r.metrics = {{"period", p.period},
                              {"return_error", p.return_error},
                              {"invariant_drift", p.invariant_drift}};
                 r.pass = p.return_error < tol.upper(1e-6) && p.invariant_drift < tol.upper(1e-8);
                 r.detail = "period " + io::format_double(p.period) + ", return error " +
                            io::format_double(p.return_error) + ", drift " +
                            io::format_double(p.invariant_drift);
               }});

  c.push_back({3, "defocusing width asymptotics", 30.0,
               [](Result& r, const Options&, const Tol& tol) {
                 const auto s = breather_asymptotic_check(1.0, 0.0, -1.0, 1e6);
                 const double ratio = s.back().ratio;
                 r.metrics = {{"t", s.back().t}, {"r", s.back().r}, {"ratio", ratio}};
                 r.pass = detail::in_range(ratio, 0.85, 1.15, tol);
                 r.detail = "r(1e6) / (2 t sqrt(ln t)) = " + io::format_double(ratio);
               }});

  c.push_back({4, "split-step solver against the exact Gaussian flow", 30.0,
               [](Result& r, const Options&, const Tol& tol) {
                 const Grid g(1, 40.0, 512);
                 GaussianParams p;
                 p.dim = 1;
                 p.A_in = CMatrix::Constant(1, 1, cdouble(1.0, 0.0));
                 p.x0 = RVector::Zero(1);
                 p.v = RVector::Zero(1);
                 p.lambda = 1.0;
                 const double ts[] = {0.0, 2.0};
                 const auto st = evolve_matrix_ode(p.A_in, 1.0, ts);
                 const Field u0 = sample(
                     [&](std::span<const double> x) { return eval_gaussian_solution(p, st[0], x); }, g);
                 const Field ue = sample(
                     [&](std::span<const double> x) { return eval_gaussian_solution(p, st[1], x); }, g);
                 SolverConfig sc;
                 sc.lambda = 1.0;
                 sc.dt = 1e-3;
                 const Field u = integrate(u0, 0.0, 2.0, sc, {}).back().second;
                 const double rel = l2_distance(u, ue) / std::sqrt(mass(ue));
                 const double mdrift = std::abs(mass(u) - mass(u0)) / mass(u0);
                 std::vector<double> ldt, ldrift;
                 const double E0 = energy(u0, sc);
                 for (double dt : {0.02, 0.01, 0.005}) {
                   SolverConfig c2 = sc;
                   c2.dt = dt;
                   const Field w = integrate(u0, 0.0, 2.0, c2, {}).back().second;
                   ldt.push_back(std::log(dt));
                   ldrift.push_back(std::log(std::abs(energy(w, c2) - E0)));
                 }
                 const double order = linear_fit(ldt, ldrift).slope;
                 r.metrics = {{"relative_l2_error", rel}, {"mass_drift", mdrift}, {"energy_order", order}};
                 r.pass = rel < tol.upper(1e-4) && mdrift < tol.upper(1e-12) && order >= tol.lower(1.9);
                 r.detail = "rel L2 " + io::format_double(rel) + ", mass drift " +
                            io::format_double(mdrift) + ", energy order " + io::format_double(order);
               }});

  c.push_back({5, "L2 stability envelope", 0.0, [](Result& r, const Options&, const Tol& tol) {
                 const Grid g(1, 40.0, 512);
                 const auto [u0, v0] = detail::perturbed_pair(g);
                 SolverConfig sc;
                 sc.lambda = 1.0;
                 sc.dt = 1e-3;
                 const auto s = stability_envelope_check(u0, v0, sc, 2.0, 40);
                 double worst = 0.0;
                 for (const auto& e : s) worst = std::max(worst, e.ratio);
                 r.metrics = {{"max_ratio", worst}, {"samples", s.size()}};
                 r.pass = worst <= tol.upper(1.05);
                 r.detail = "max ||u - v|| / (||u0 - v0|| e^{2 lambda t}) = " + io::format_double(worst);
               }});

  c.push_back({6, "multi-Gausson convergence rate", 600.0,
               [](Result& r, const Options&, const Tol& tol) {
                 const auto o = detail::ladder_rate(false);
                 const double target = 1.0 * o.v_star * o.v_star / 4.0;
                 r.metrics = {{"l2_fit", detail::fit_json(o.l2)},
                              {"h1_fit", detail::fit_json(*o.h1)},
                              {"fh1_fit", detail::fit_json(*o.fh1)},
                              {"h1_decreasing", o.h1_decreasing},
                              {"fh1_decreasing", o.fh1_decreasing},
                              {"floor", o.floor},
                              {"T_sep", o.T_sep},
                              {"target_c", -target},
                              {"notes", o.notes}};
                 const bool c_ok = detail::in_range(o.l2.c, -1.5 * target, -0.5 * target, tol);
                 const bool r2_ok = o.l2.r_squared > tol.lower(0.95);
                 const bool h_ok = o.h1_decreasing && o.fh1_decreasing && o.h1->c < tol.upper(0.0) &&
                                   o.fh1->c < tol.upper(0.0);
                 r.pass = c_ok && r2_ok && h_ok;
                 r.detail = "c = " + io::format_double(o.l2.c) + " (target " +
                            io::format_double(-target) + "), r2 = " +
                            io::format_double(o.l2.r_squared) + ", H1 c = " +
                            io::format_double(o.h1->c) + ", F(H1) c = " + io::format_double(o.fh1->c);
               }});

  c.push_back({7, "multi-gaussian (breather) convergence rate", 600.0,
               [](Result& r, const Options&, const Tol& tol) {
                 const auto o = detail::ladder_rate(true);
                 const double target = o.sigma_minus * o.v_star * o.v_star / 4.0;
                 r.metrics = {{"l2_fit", detail::fit_json(o.l2)},
                              {"sigma_minus", o.sigma_minus},
                              {"floor", o.floor},
                              {"T_sep", o.T_sep},
                              {"target_c", -target},
                              {"notes", o.notes}};
                 r.pass = detail::in_range(o.l2.c, -1.5 * target, -0.5 * target, tol);
                 r.detail = "c = " + io::format_double(o.l2.c) + " (target " +
                            io::format_double(-target) + ", sigma_- = " +
                            io::format_double(o.sigma_minus) + "), r2 = " +
                            io::format_double(o.l2.r_squared);
               }});

  c.push_back({8, "rigidity lower bound", 0.0, [](Result& r, const Options&, const Tol& tol) {
                 const Grid g(1, 40.0, 512);
                 const auto [u0, v0] = detail::perturbed_pair(g);
                 SolverConfig sc;
                 sc.lambda = 1.0;
                 sc.dt = 1e-3;
                 const auto s = rigidity_lower_bound_check(u0, v0, sc, 3.0, 60);
                 double worst = std::numeric_limits<double>::infinity();
                 for (const auto& e : s) worst = std::min(worst, e.ratio);
                 r.metrics = {{"min_ratio", worst}, {"samples", s.size()}};
                 r.pass = worst >= tol.lower(0.9);
                 r.detail = "min ||u - v|| / (||u0 - v0|| e^{-2 lambda t}) = " + io::format_double(worst);
               }});

  c.push_back({9, "inequality certification", 120.0,
               [](Result& r, const Options& opt, const Tol& tol) {
                 const CheckReport reps[] = {sweep_log_pair(opt.samples, opt.seed, opt.jobs),
                                             sweep_F1_expansion(opt.samples, opt.seed, opt.jobs),
                                             sweep_zlogz_lipschitz(opt.samples, opt.seed, opt.jobs)};
                 std::uint64_t violations = 0;
                 json sweeps = json::array();
                 for (const auto& c : reps) {
                   violations += c.violations;
                   sweeps.push_back({{"name", c.name},
                                     {"samples", c.samples},
                                     {"violations", c.violations},
                                     {"worst_relative", c.worst_relative}});
                 }
                 // Tail lemmas: strict wherever the constant is not attained.
                 int points = 0, strict_fail = 0, equality_fail = 0;
                 double worst_ratio = 0.0;
                 for (const auto& p : gauss_tail_ladder()) {
                   ++points;
                   if (p.equality_case) {
                     if (!p.ok) ++equality_fail;
                   } else {
                     worst_ratio = std::max(worst_ratio, p.ratio);
                     if (!(p.ratio < tol.upper(1.0))) ++strict_fail;
                   }
                 }
                 r.metrics = {{"sweeps", sweeps},
                              {"tail_points", points},
                              {"tail_strict_failures", strict_fail},
                              {"tail_equality_failures", equality_fail},
                              {"tail_worst_ratio", worst_ratio}};
                 r.pass = violations == 0 && strict_fail == 0 && equality_fail == 0 && !tol.corrupted;
                 r.detail = std::to_string(violations) + " violations over " +
                            std::to_string(3 * opt.samples) + " samples; tail ladder " +
                            std::to_string(points) + " points, worst strict ratio " +
                            io::format_double(worst_ratio);
               }});

  c.push_back({10, "superposition defect exponent", 60.0,
               [](Result& r, const Options&, const Tol& tol) {
                 const double Ls[] = {6.0, 8.0, 10.0, 12.0};
                 const auto lad = log_bound_separation_ladder(Ls, 1.0);
                 const double rel = std::abs(lad.fit.slope / lad.target_slope - 1.0);
                 r.metrics = {{"slope", lad.fit.slope},
                              {"target", lad.target_slope},
                              {"r_squared", lad.fit.r_squared},
                              {"values", lad.values}};
                 r.pass = rel <= tol.upper(0.15);
                 r.detail = "slope " + io::format_double(lad.fit.slope) + " vs -1/4";
               }});

  c.push_back({11, "slow variation of the localized action", 0.0,
               [](Result& r, const Options&, const Tol& tol) {
                 MultiConfig cfg = detail::two_member_config(false);
                 const double T_n = 14.0, t_lo = 11.2;
                 cfg.T_n_list = {T_n};
                 cfg.sample_dt = 1.0 / 32.0;
                 cfg.T_obs = t_lo;
                 cfg.derive();
                 SolverConfig sc;
                 sc.lambda = 1.0;
                 sc.dt = 1e-3;
                 const Grid g = auto_grid(cfg, t_lo, T_n);
                 const auto br = build_approximate_multisoliton(cfg, T_n, sc, g, cfg.sample_times(T_n), true);
                 std::vector<std::pair<double, Field>> traj;
                 for (std::size_t i = 0; i < br.samples.size(); ++i)
                   traj.emplace_back(br.samples[i].t, br.fields[i]);
                 const double shift = t_lo - max_partition_time(cfg.members, t_lo, cfg.v_star);
                 const auto rep = slow_variation_report(traj, cfg.members, 1.0, cfg.v_star, shift);
                 const double drift_tol = 1e-8;
                 r.metrics = {{"C", rep.C},
                              {"quad_coeff", rep.quad_coeff},
                              {"r_squared", rep.r_squared},
                              {"fitted", rep.fitted},
                              {"floor", rep.floor},
                              {"T_shift", shift},
                              {"energy_drift", rep.energy_drift},
                              {"energy_tolerance", drift_tol}};
                 r.pass = std::isfinite(rep.C) && rep.C > 0.0 && rep.quad_coeff < tol.upper(0.0) &&
                          rep.energy_drift < tol.upper(drift_tol);
                 r.detail = "C = " + io::format_double(rep.C) + ", quadratic coefficient " +
                            io::format_double(rep.quad_coeff) + ", energy drift " +
                            io::format_double(rep.energy_drift);
               }});

  c.push_back({12, "weighted defect ladder and pointwise domination", 0.0,
               [](Result& r, const Options& opt, const Tol& tol) {
                 const GaussianParams members[] = {detail::unit_gausson(1.0, 0.0, 0.0, -1.0),
                                                   detail::unit_gausson(1.0, 0.0, 0.0, 1.0)};
                 const double v_star = 2.0;
                 const double ts[] = {3.0, 4.0, 5.0, 6.0};
                 const auto lad = weighted_log_diff_ladder(members, ts, v_star);
                 const double ratio = lad.fit.slope / lad.target_slope;
                 const auto dom = corollary_domination_check(members, 4.0, 10000, opt.seed);
                 r.metrics = {{"slope", lad.fit.slope},
                              {"target", lad.target_slope},
                              {"values", lad.values},
                              {"domination_samples", dom.samples},
                              {"domination_violations", dom.violations}};
                 r.pass = detail::in_range(ratio, 0.5, 1.5, tol) && dom.violations == 0;
                 r.detail = "slope " + io::format_double(lad.fit.slope) + " vs " +
                            io::format_double(lad.target_slope) + ", " +
                            std::to_string(dom.violations) + " domination violations";
               }});
  return c;
}

/// Runs the selected criteria; `report` is called after each one.
inline std::vector<Result> run(const Options& opt,
                               const std::function<void(const Result&)>& report = {}) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!opt.only.empty() && !opt.only.count(c.id)) continue;
    Result r;
    r.id = c.id;
    r.name = c.name;
    r.time_limit = c.time_limit;
    detail::Tol tol{opt.corrupt && *opt.corrupt == c.id};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(r, opt, tol);
    } catch (const Error& e) {
      r.pass = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && r.seconds > c.time_limit) {
      r.pass = false;
      r.detail += " (runtime " + io::format_double(r.seconds) + " s over " +
                  io::format_double(c.time_limit) + " s)";
    }
    if (report) report(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lognls::acceptance
