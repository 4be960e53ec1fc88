#pragma once

// Embedded Dormand-Prince 5(4) integrator with PI step-size control.
//
// The state is an Eigen::VectorXd. The integrator lands exactly on requested
// target times (steps are clamped, never interpolated), and exposes every
// accepted step to a hook that may project the new state (e.g. restore a
// symmetry) or throw to abort.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "lognls/error.hpp"

namespace lognls::ode {

using Vec = Eigen::VectorXd;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 selects a heuristic
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

/// Data handed to the accepted-step hook. `y1` may be modified in place;
/// return true from the hook if it was, so the derivative gets refreshed.
struct Step {
  double t0;
  double t1;
  const Vec& y0;
  const Vec& f0;
  Vec& y1;
  const Vec& f1;
};

template <class Rhs>
class DormandPrince45 {
 public:
  using Hook = std::function<bool(Step&)>;

  DormandPrince45(Rhs rhs, double t0, Vec y0, Options opts = {})
      : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)) {
    f_ = rhs_(t_, y_);
    h_ = opts_.initial_step;
  }

  double time() const { return t_; }
  const Vec& state() const { return y_; }
  const Vec& derivative() const { return f_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  double last_step() const { return h_; }

  /// Advance to exactly `t_target` (either direction), invoking `hook` after
  /// every accepted step.
  void advance_to(double t_target, const Hook& hook = {}) {
    const double span = t_target - t_;
    if (span == 0.0) return;
    const double dir = span > 0 ? 1.0 : -1.0;
    if (h_ == 0.0 || !(h_ * dir > 0)) h_ = dir * initial_step_guess(std::abs(span));

    while ((t_target - t_) * dir > 0) {
      if (accepted_ + rejected_ >= opts_.max_steps)
        fail(ErrorKind::StepUnderflow, "step budget exhausted");
      double h = std::min(std::abs(h_), opts_.max_step);
      const double remaining = std::abs(t_target - t_);
      bool last = false;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        last = true;
      }
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(t_), 1.0);
      if (h < floor && !last) fail(ErrorKind::StepUnderflow, "step size below machine floor");

      const double hs = dir * h;
      Vec y_new, f_new;
      const double err = attempt(hs, y_new, f_new);
      if (!std::isfinite(err)) {
        h_ = dir * h * 0.2;
        ++rejected_;
        continue;
      }
      // PI controller (Hairer-Wanner DOPRI5 defaults).
      constexpr double beta = 0.04, expo = 0.2 - beta * 0.75, safe = 0.9;
      const double fac11 = std::pow(std::max(err, 1e-300), expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(err_old_, beta);
        fac = std::clamp(fac / safe, 1.0 / 10.0, 1.0 / 0.2);
        const double t_prev = t_;
        const double t_new = last ? t_target : t_ + hs;
        Vec y_prev = y_;
        Vec f_prev = f_;
        y_ = std::move(y_new);
        f_ = std::move(f_new);
        t_ = t_new;
        err_old_ = std::max(err, 1e-4);
        ++accepted_;
        if (hook) {
          Step s{t_prev, t_new, y_prev, f_prev, y_, f_};
          if (hook(s)) f_ = rhs_(t_, y_);
        }
        // Keep the controller's suggestion even when the step was clamped.
        if (!last || h == std::abs(h_)) h_ = dir * h / fac;
      } else {
        const double fac = std::min(1.0 / 0.2, fac11 / safe);
        h_ = dir * h / fac;
        ++rejected_;
      }
    }
  }

  /// Single explicit step of size h from the current state, without error
  /// control or state change. Used for event refinement inside an accepted step.
  Vec probe(double h) const {
    Vec y_new, f_new;
    attempt(h, y_new, f_new);
    return y_new;
  }

 private:
  double initial_step_guess(double span) const {
    if (opts_.initial_step > 0) return std::min(opts_.initial_step, span);
    const double d0 = y_.norm(), d1 = f_.norm();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, span, opts_.max_step});
    return std::max(h, 1e-12 * std::max(span, 1.0));
  }

  double attempt(double h, Vec& y_new, Vec& f_new) const {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    const Vec& k1 = f_;
    const Vec k2 = rhs_(t_ + h / 5.0, y_ + h * a21 * k1);
    const Vec k3 = rhs_(t_ + 3.0 * h / 10.0, y_ + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs_(t_ + 4.0 * h / 5.0, y_ + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 =
        rhs_(t_ + 8.0 * h / 9.0, y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = rhs_(t_ + h, y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y_ + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f_new = rhs_(t_ + h, y_new);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * f_new);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
  }

  Rhs rhs_;
  Options opts_;
  double t_;
  Vec y_;
  Vec f_;
  double h_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

template <class Rhs>
DormandPrince45(Rhs, double, Vec, Options) -> DormandPrince45<Rhs>;

}  // namespace lognls::ode
