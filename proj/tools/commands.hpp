#pragma once

// Subcommands of the lognls executable. Each run writes into its own
// directory <out-dir>/<command>-<run id prefix> and finishes with manifest.json.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance_suite.hpp"
#include "config.hpp"
#include "json.hpp"
#include "lognls/lognls.hpp"

namespace lognls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kVersion = "lognls 0.1.0";
inline constexpr const char* kOutDirEnv = "LOGNLS_OUT_DIR";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kValidityGate = 3 };

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms
     << 'Z';
  return os.str();
}

/// run_id is the SHA-256 of the canonical (key-sorted) JSON of command and config.
inline std::string run_id_for(const std::string& command, const json& config) {
  return sha256_hex(json{{"command", command}, {"config", config}}.dump());
}

class Run {
 public:
  Run(std::string command, json config, std::uint64_t seed, const fs::path& out_root)
      : command_(std::move(command)), config_(std::move(config)), seed_(seed) {
    run_id_ = run_id_for(command_, config_);
    dir_ = out_root / (command_ + "-" + run_id_.substr(0, 12));
    fs::create_directories(dir_);
    started_ = utc_now();
  }

  /// Registers an output and returns its path.
  fs::path file(const std::string& name) {
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
    return dir_ / name;
  }

  void write_json(const std::string& name, const json& j) { io::write_json(file(name), j); }

  void write_field(const std::string& name, const Field& u, const json& meta = {}) {
    io::write_field(file(name), u, meta);
    file(name + ".json");
  }

  void finish(int exit_code, const std::string& error = {}) {
    json m = {{"run_id", run_id_},      {"command", command_},     {"config", config_},
              {"started", started_},    {"finished", utc_now()},   {"outputs", outputs_},
              {"version", kVersion},    {"seed", seed_},           {"exit_code", exit_code},
              {"run_dir", dir_.string()}};
    if (!error.empty()) m["error"] = error;
    io::write_json(dir_ / "manifest.json", m);
  }

  const fs::path& dir() const { return dir_; }
  const std::string& run_id() const { return run_id_; }

 private:
  std::string command_;
  json config_;
  std::uint64_t seed_;
  std::string run_id_;
  fs::path dir_;
  std::string started_;
  std::vector<std::string> outputs_;
};

struct Common {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 42;
  std::uint64_t samples = 1000000;
  unsigned jobs = 1;
  std::vector<int> only;
  std::optional<int> corrupt;

  fs::path out_root() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "runs";
  }
};

inline std::vector<double> linspace(double t_end, long samples) {
  if (samples < 2) config_fail("field 'samples': need at least 2 output times");
  std::vector<double> ts(samples);
  for (long i = 0; i < samples; ++i) ts[i] = t_end * double(i) / double(samples - 1);
  ts.back() = t_end;
  return ts;
}

inline double positive(const Section& s, const std::string& key) {
  const double v = s.number(key);
  if (!(v > 0.0)) config_fail(s.where(key) + ": must be positive");
  return v;
}

// ---------------------------------------------------------------------------
// gausson: split-step evolution of a Gaussian datum against the exact flow.

inline int cmd_gausson(const Section& root, Run& run, std::ostream& out) {
  const double lambda = root.number("lambda");
  const int dim = static_cast<int>(root.integer("dim", 1));
  const GaussianParams p = parse_member(root, dim, lambda);
  const Grid grid = parse_grid(root.sub("grid"), dim);
  const SolverConfig sc = parse_solver(root, lambda);
  const std::vector<double> ts = linspace(positive(root, "t_end"), root.integer("samples", 21));

  const auto states = evolve_matrix_ode(p.A_in, lambda, ts);
  auto exact = [&](std::size_t i) {
    const GaussianEvaluator ev(p, states[i]);
    return sample([&](std::span<const double> x) { return ev(x); }, grid);
  };
  const auto traj = integrate(exact(0), 0.0, ts.back(), sc, ts);

  io::CsvWriter csv(run.file("trajectory.csv"),
                    {"t", "l2_error", "relative_error", "mass", "energy"});
  double worst_rel = 0.0, mass_drift = 0.0, energy_drift = 0.0;
  double m0 = 0.0, e0 = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Field ref = exact(i);
    const double err = l2_distance(traj[i].second, ref);
    const double rel = err / std::sqrt(mass(ref));
    const NormReport nr = norms(traj[i].second, sc);
    if (i == 0) {
      m0 = nr.mass;
      e0 = nr.energy;
    }
    worst_rel = std::max(worst_rel, rel);
    mass_drift = std::max(mass_drift, std::abs(nr.mass - m0) / m0);
    energy_drift = std::max(energy_drift, std::abs(nr.energy - e0) / std::max(std::abs(e0), 1e-300));
    csv.row({traj[i].first, err, rel, nr.mass, nr.energy});
  }
  run.write_field("final.bin", traj.back().second, {{"t", traj.back().first}});
  run.write_json("summary.json", {{"max_relative_error", worst_rel},
                                  {"mass_drift", mass_drift},
                                  {"energy_drift", energy_drift},
                                  {"gausson", p.is_gausson()},
                                  {"grid", {{"dim", grid.dim}, {"extent", grid.extent}, {"n", grid.n}}},
                                  {"dt", sc.dt}});
  out << "max relative L2 error " << io::format_double(worst_rel) << ", mass drift "
      << io::format_double(mass_drift) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// breather: width ODE for d = 1.

inline int cmd_breather(const Section& root, Run& run, std::ostream& out) {
  const double lambda = root.number("lambda");
  const auto alpha = root.numbers("alpha", 2);
  if (!(alpha[0] > 0.0)) config_fail(root.where("alpha") + ": alpha_r must be positive");
  const double tol = root.number("tol", 1e-10);
  const std::vector<double> ts = linspace(positive(root, "t_end"), root.integer("samples", 201));
  const auto traj = evolve_breather(alpha[0], alpha[1], lambda, ts, tol);

  io::CsvWriter csv(run.file("trajectory.csv"), {"t", "r", "rdot", "phi", "first_integral"});
  double drift = 0.0;
  for (const auto& s : traj) {
    drift = std::max(drift, std::abs(s.first_integral - traj.front().first_integral));
    csv.row({s.t, s.r, s.rdot, s.phi, s.first_integral});
  }
  json summary = {{"first_integral_drift", drift}, {"r_min", traj.front().r}, {"r_max", traj.front().r}};
  for (const auto& s : traj) {
    summary["r_min"] = std::min(summary["r_min"].get<double>(), s.r);
    summary["r_max"] = std::max(summary["r_max"].get<double>(), s.r);
  }
  if (lambda > 0.0) {
    const auto per = breather_period(alpha[0], alpha[1], lambda);
    summary["period"] = per.period;
    summary["first_maximum"] = per.first_maximum;
    summary["return_error"] = per.return_error;
  } else if (ts.back() >= 10.0) {
    const double t = ts.back();
    summary["asymptotic_ratio"] = traj.back().r / (2.0 * t * std::sqrt(-lambda * std::log(t)));
  }
  run.write_json("summary.json", summary);
  out << "first integral drift " << io::format_double(drift) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// matrix-ode: dA/dt = -i A^2 + 2 i lambda Re A.

inline int cmd_matrix_ode(const Section& root, Run& run, std::ostream& out) {
  const double lambda = root.number("lambda");
  const int dim = static_cast<int>(root.integer("dim", 1));
  if (dim < 1 || dim > 3) config_fail(root.where("dim") + ": must be 1, 2 or 3");
  if (!root.has("A_in")) config_fail("missing " + root.where("A_in"));
  const GaussianParams p = parse_member(root, dim, lambda);
  const double tol = root.number("tol", 1e-10);
  const std::vector<double> ts = linspace(positive(root, "t_end"), root.integer("samples", 101));
  const auto states = evolve_matrix_ode(p.A_in, lambda, ts, tol);

  std::vector<std::string> header{"t"};
  for (const char* part : {"re", "im"})
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        header.push_back(std::string("A_") + part + "_" + std::to_string(i) + std::to_string(j));
  for (const char* h : {"phi", "det_ratio", "eig_min", "eig_max"}) header.push_back(h);
  io::CsvWriter csv(run.file("trajectory.csv"), header);
  double deviation = 0.0;
  for (const auto& s : states) {
    std::vector<double> row{s.t};
    for (int part = 0; part < 2; ++part)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) row.push_back(part ? s.A(i, j).imag() : s.A(i, j).real());
    row.insert(row.end(), {s.phi, s.det_ratio, s.eig_min, s.eig_max});
    csv.row(row);
    deviation = std::max(deviation, (s.A - p.A_in).cwiseAbs().maxCoeff());
  }
  run.write_json("summary.json", {{"max_deviation_from_initial", deviation},
                                  {"eig_min", states.back().eig_min},
                                  {"eig_max", states.back().eig_max}});
  out << "max |A(t) - A_in| " << io::format_double(deviation) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// build-multisoliton / multigaussian: the backward ladder and the rate fit.

inline json fit_json(const DecayFit& f) {
  return {{"a", f.a},       {"b", f.b},       {"c", f.c},       {"r_squared", f.r_squared},
          {"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"used", f.used}, {"floor", f.floor}};
}

inline void write_errors(Run& run, const std::string& name, const BuildResult& b) {
  io::CsvWriter csv(run.file(name), {"t", "l2", "h1", "fh1"});
  for (const auto& s : b.samples) csv.row({s.t, s.l2, s.h1, s.fh1});
}

inline std::string tn_label(double T) {
  std::string s = io::format_double(T);
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

inline int cmd_ladder(const Section& root, Run& run, std::ostream& out, bool gaussons_only) {
  const double lambda = root.number("lambda");
  const int dim = static_cast<int>(root.integer("dim", 1));
  MultiConfig cfg = parse_multi(root, lambda, dim);
  if (gaussons_only)
    for (std::size_t k = 0; k < cfg.members.size(); ++k)
      if (!cfg.members[k].is_gausson())
        config_fail("field 'members[" + std::to_string(k) +
                    "]': build-multisoliton takes Gaussons only; use multigaussian");
  const SolverConfig sc = parse_solver(root, lambda);
  const double cut = root.number("fit_cut", 1.0);
  std::optional<Grid> grid;
  if (root.has("grid")) grid = parse_grid(root.sub("grid"), dim);

  if (cfg.members.size() == 1) {
    cfg.derive();
    const double T = cfg.T_n_list.back();
    if (!root.has("T_obs")) cfg.T_obs = std::max(0.0, T - 4.0);
    const Grid g = grid ? *grid : auto_grid(cfg, cfg.T_obs, T);
    const auto b = build_approximate_multisoliton(cfg, T, sc, g, cfg.sample_times(T));
    write_errors(run, "control.csv", b);
    double floor = 0.0;
    for (const auto& s : b.samples) floor = std::max(floor, s.l2);
    run.write_json("floor.json", {{"floor", floor},
                                  {"T_n", T},
                                  {"T_obs", cfg.T_obs},
                                  {"grid", {{"extent", g.extent}, {"n", g.n}}}});
    out << "N = 1 control floor " << io::format_double(floor) << '\n';
    return kOk;
  }

  const LadderRun lad = run_ladder(cfg, sc, grid ? &*grid : nullptr);
  const MultiConfig& c = lad.config;
  json rungs = json::array();
  for (const auto& b : lad.rungs) {
    const std::string name = "errors_Tn_" + tn_label(b.T_n) + ".csv";
    write_errors(run, name, b);
    rungs.push_back({{"T_n", b.T_n}, {"samples", b.samples.size()}, {"file", name}});
  }
  write_errors(run, "control.csv", lad.control);

  const double rate = gaussons_only ? lambda : c.sigma_minus;
  const double target = -rate * c.v_star * c.v_star / 4.0;
  json report = {{"T_sep", c.T_sep},
                 {"T_obs", c.T_obs},
                 {"v_star", c.v_star},
                 {"sigma_minus", c.sigma_minus},
                 {"sigma_plus", c.sigma_plus},
                 {"epsilon0", c.epsilon0},
                 {"floor", lad.floor},
                 {"fit_cut", cut},
                 {"target_c", target},
                 {"acceptance_range", {1.5 * target, 0.5 * target}},
                 {"grid", {{"extent", lad.grid.extent}, {"n", lad.grid.n}}},
                 {"rungs", rungs},
                 {"notes", lad.notes}};
  const BuildResult& top = lad.rungs.back();
  std::vector<double> t, l2, h1, fh1;
  for (const auto& s : top.samples)
    if (s.t <= top.T_n - cut) {
      t.push_back(s.t);
      l2.push_back(s.l2);
      h1.push_back(s.h1);
      fh1.push_back(s.fh1);
    }
  report["c"] = nullptr;
  try {
    const DecayFit f = fit_gaussian_decay(t, l2, lad.floor);
    report["fit"] = fit_json(f);
    report["c"] = f.c;
    report["within_range"] = f.c >= 1.5 * target && f.c <= 0.5 * target;
    std::vector<double> tw, hw, fw;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= f.t_lo && t[i] <= f.t_hi) {
        tw.push_back(t[i]);
        hw.push_back(h1[i]);
        fw.push_back(fh1[i]);
      }
    report["fit_h1"] = fit_json(fit_gaussian_decay(tw, hw));
    report["fit_fh1"] = fit_json(fit_gaussian_decay(tw, fw));
    out << "c = " << io::format_double(f.c) << " (target " << io::format_double(target)
        << "), r^2 = " << io::format_double(f.r_squared) << '\n';
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
    report["fit"] = nullptr;
    report["fit_error"] = e.what();
    out << "no fit: " << e.what() << '\n';
  }
  run.write_json("fit.json", report);
  return kOk;
}

// ---------------------------------------------------------------------------
// localized: partition diagnostics along a builder trajectory.

inline int cmd_localized(const Section& root, Run& run, std::ostream& out) {
  const double lambda = root.number("lambda");
  const int dim = static_cast<int>(root.integer("dim", 1));
  MultiConfig cfg = parse_multi(root, lambda, dim);
  if (cfg.T_n_list.size() != 1) config_fail(root.where("T_n") + ": localized takes a single T_n");
  if (!root.has("T_obs")) config_fail("missing " + root.where("T_obs"));
  const SolverConfig sc = parse_solver(root, lambda);
  cfg.derive();
  const std::size_t N = cfg.members.size();
  const double v_star = N > 1 ? cfg.v_star : root.number("v_star", 1.0);
  if (!(v_star > 0.0)) config_fail(root.where("v_star") + ": must be positive");
  const double T_shift =
      root.number("T_shift", N > 1 ? cfg.T_obs - max_partition_time(cfg.members, cfg.T_obs, v_star)
                                   : 0.0);
  const double T_n = cfg.T_n_list.front();
  const Grid grid = root.has("grid") ? parse_grid(root.sub("grid"), dim) : auto_grid(cfg, cfg.T_obs, T_n);
  const auto ts = cfg.sample_times(T_n);
  // Fail fast when the window reaches below the partition's validity range.
  for (double tp : {ts.front(), ts.back()}) build_partition(cfg.members, tp, tp - T_shift, v_star, grid);

  const auto b = build_approximate_multisoliton(cfg, T_n, sc, grid, ts, true);
  std::vector<std::pair<double, Field>> traj;
  for (std::size_t i = 0; i < b.samples.size(); ++i) traj.emplace_back(b.samples[i].t, b.fields[i]);

  std::vector<std::string> header{"t_prime", "t"};
  for (const char* q : {"M", "E", "S"})
    for (std::size_t j = 0; j <= N; ++j) header.push_back(std::string(q) + "_" + std::to_string(j));
  for (const char* h : {"S_loc", "mass", "energy"}) header.push_back(h);
  io::CsvWriter loc(run.file("localized.csv"), header);
  for (const auto& [tp, u] : traj) {
    const Partition part = build_partition(cfg.members, tp, tp - T_shift, v_star, grid);
    const LocalizedReport r = localized_quantities(u, part, cfg.members, lambda, sc.eps);
    std::vector<double> row{tp, tp - T_shift};
    for (const auto* q : {&r.M, &r.E, &r.S}) row.insert(row.end(), q->begin(), q->end());
    row.insert(row.end(), {r.S_loc, r.mass, r.energy});
    loc.row(row);
  }

  const SlowVariationReport sv =
      slow_variation_report(traj, cfg.members, lambda, v_star, T_shift, -1.0, sc.eps, false);
  io::CsvWriter csv(run.file("slow_variation.csv"), {"t_prime", "t", "S_loc", "dS_dt", "envelope"});
  for (const auto& s : sv.samples) csv.row({s.t_prime, s.t, s.S_loc, s.dS_dt, s.envelope});
  json rep = {{"T_shift", sv.T_shift},
              {"v_star", v_star},
              {"C", sv.C},
              {"floor", sv.floor},
              {"fitted", sv.fitted},
              {"quad_coeff", std::isfinite(sv.quad_coeff) ? json(sv.quad_coeff) : json(nullptr)},
              {"target_quad_coeff", -lambda * v_star * v_star / 4.0},
              {"r_squared", sv.r_squared},
              {"energy_drift", sv.energy_drift},
              {"grid", {{"extent", grid.extent}, {"n", grid.n}}}};
  double max_rate = 0.0;
  for (const auto& s : sv.samples) max_rate = std::max(max_rate, std::abs(s.dS_dt));
  rep["max_abs_dS_dt"] = max_rate;

  if (root.has("ladder_times")) {
    const auto lt = root.numbers("ladder_times");
    io::CsvWriter tails(run.file("tail_ladder.csv"),
                        {"t", "l2", "grad", "lp", "moment2", "moment3", "l2_normalized",
                         "grad_normalized", "lp_normalized", "moment_normalized"});
    for (const auto& r : gausson_tail_report(cfg.members.front(), lt, v_star))
      tails.row({r.t, r.raw.l2, r.raw.grad, r.raw.lp, r.raw.moment2, r.raw.moment3,
                 r.l2_normalized, r.grad_normalized, r.lp_normalized, r.moment_normalized});
    if (N > 1) {
      io::CsvWriter ov(run.file("orthogonality_ladder.csv"),
                       {"t", "t_prime", "separation", "plain", "weighted", "grad_mod", "grad_grad",
                        "weighted_normalized", "grad_mod_normalized", "grad_grad_normalized"});
      for (const auto& r :
           gausson_orthogonality_report(cfg.members[0], cfg.members[1], lt, T_shift, v_star))
        ov.row({r.t, r.t_prime, r.raw.separation, r.raw.plain, r.raw.weighted, r.raw.grad_mod,
                r.raw.grad_grad, r.weighted_normalized, r.grad_mod_normalized,
                r.grad_grad_normalized});
    }
  }
  run.write_json("slow_variation.json", rep);
  out << "envelope constant C = " << io::format_double(sv.C) << ", max |dS/dt| "
      << io::format_double(max_rate) << ", energy drift " << io::format_double(sv.energy_drift)
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// verify-inequalities: seeded sweeps plus the tail ladder.

inline json report_json(const CheckReport& r) {
  return {{"name", r.name},
          {"seed", r.seed},
          {"samples", r.samples},
          {"violations", r.violations},
          {"passed", r.passed()},
          {"worst_margin", r.worst_margin},
          {"worst_relative", r.worst_relative},
          {"worst_a", {r.worst_a.real(), r.worst_a.imag()}},
          {"worst_b", {r.worst_b.real(), r.worst_b.imag()}}};
}

inline int cmd_verify(const Common& opt, Run& run, std::ostream& out) {
  if (opt.samples < 1) config_fail("--samples must be at least 1");
  bool ok = true;
  for (const auto& r : {sweep_log_pair(opt.samples, opt.seed, opt.jobs),
                        sweep_F1_expansion(opt.samples, opt.seed, opt.jobs),
                        sweep_zlogz_lipschitz(opt.samples, opt.seed, opt.jobs)}) {
    run.write_json(r.name + ".json", report_json(r));
    out << r.name << ": " << r.violations << " violations in " << r.samples << " samples\n";
    ok = ok && r.passed();
  }
  io::CsvWriter csv(run.file("gauss_tails.csv"),
                    {"gamma", "y_or_R", "n", "dim", "ratio", "equality_case", "ok"});
  std::size_t bad = 0, points = 0;
  for (const auto& p : gauss_tail_ladder()) {
    ++points;
    bad += !p.ok;
    csv.row({p.gamma, p.y, double(p.n), double(p.dim), p.ratio, double(p.equality_case),
             double(p.ok)});
  }
  run.write_json("gauss_tails.json", {{"points", points}, {"failures", bad}});
  out << "gaussian tails: " << bad << " failures at " << points << " points\n";
  ok = ok && bad == 0;
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// acceptance: the twelve criteria.

inline int cmd_acceptance(const Common& opt, Run& run, std::ostream& out) {
  acceptance::Options ao;
  ao.seed = opt.seed;
  ao.samples = opt.samples;
  ao.jobs = opt.jobs;
  ao.only = std::set<int>(opt.only.begin(), opt.only.end());
  ao.corrupt = opt.corrupt;
  json results = json::array();
  std::vector<int> failed;
  acceptance::run(ao, [&](const acceptance::Result& r) {
    out << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << " (" << r.name << ") "
        << std::fixed << std::setprecision(2) << r.seconds << " s: " << r.detail << '\n'
        << std::defaultfloat << std::flush;
    results.push_back(acceptance::to_json(r));
    if (!r.pass) failed.push_back(r.id);
  });
  run.write_json("acceptance.json",
                 {{"results", results}, {"all_passed", failed.empty()}, {"failed", failed}});
  out << (failed.empty() ? "all criteria passed" : std::to_string(failed.size()) + " criteria failed")
      << '\n';
  return failed.empty() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

inline int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::ConfigInvalid) return kConfigError;
  if (e.is_validity_gate()) return kValidityGate;
  return kCheckFailed;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Numerical laboratory for the focusing logarithmic Schroedinger equation", "lognls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common opt;

  struct Spec {
    const char* name;
    const char* help;
    bool needs_config;
  };
  const Spec specs[] = {
      {"gausson", "split-step run of a Gaussian datum against the exact flow", true},
      {"breather", "width ODE trajectory of a one-dimensional breather", true},
      {"matrix-ode", "matrix ODE trajectory for A_in", true},
      {"build-multisoliton", "multi-Gausson ladder and decay fit", true},
      {"multigaussian", "multi-gaussian ladder and decay fit", true},
      {"localized", "partition diagnostics and slow variation", true},
      {"verify-inequalities", "seeded inequality sweeps", false},
      {"acceptance", "acceptance criteria at desk scale", false},
  };
  std::vector<CLI::App*> subs;
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    auto* c = sub->add_option("--config", opt.config, "YAML experiment file");
    if (s.needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", opt.out_dir,
                    std::string("output root (default $") + kOutDirEnv + " or ./runs)");
    sub->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    if (!s.needs_config) sub->add_option("--samples", opt.samples, "samples per lemma");
    if (std::string(s.name) == "acceptance") {
      sub->add_option("--only", opt.only, "criterion ids to run")->check(CLI::Range(1, 12));
      sub->add_option("--corrupt", opt.corrupt,
                      "make one criterion's tolerance unsatisfiable (self-test)")
          ->check(CLI::Range(1, 12));
    }
    subs.push_back(sub);
  }

  std::vector<std::string> argv_store{"lognls"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  std::optional<Run> run;
  try {
    std::optional<Section> root;
    json config;
    if (command == "verify-inequalities") {
      config = {{"seed", opt.seed}, {"samples", opt.samples}};
    } else if (command == "acceptance") {
      config = {{"seed", opt.seed}, {"samples", opt.samples}, {"only", opt.only}};
      if (opt.corrupt) config["corrupt"] = *opt.corrupt;
    } else {
      root = Section::load(opt.config);
      config = to_json(root->node());
    }
    run.emplace(command, config, opt.seed, opt.out_root());
    out << "run " << run->run_id().substr(0, 12) << " -> " << run->dir().string() << '\n';

    int code = kOk;
    if (command == "gausson") code = cmd_gausson(*root, *run, out);
    else if (command == "breather") code = cmd_breather(*root, *run, out);
    else if (command == "matrix-ode") code = cmd_matrix_ode(*root, *run, out);
    else if (command == "build-multisoliton") code = cmd_ladder(*root, *run, out, true);
    else if (command == "multigaussian") code = cmd_ladder(*root, *run, out, false);
    else if (command == "localized") code = cmd_localized(*root, *run, out);
    else if (command == "verify-inequalities") code = cmd_verify(opt, *run, out);
    else if (command == "acceptance") code = cmd_acceptance(opt, *run, out);
    run->finish(code);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const int code = exit_code_for(e);
    if (run) run->finish(code, e.what());
    return code;
  } catch (const YAML::Exception& e) {
    err << "error: ConfigInvalid: " << e.what() << '\n';
    if (run) run->finish(kConfigError, e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (run) run->finish(kCheckFailed, e.what());
    return kCheckFailed;
  }
}

}  // namespace lognls::cli
