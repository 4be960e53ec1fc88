#pragma once

// Randomized and quadrature-based certification of the elementary inequalities
// behind the logNLS multi-soliton estimates.
//
// Pointwise checks return a margin (right-hand side minus left-hand side).
// They are evaluated in long double from algebraically rearranged forms that
// avoid cancellation near the diagonal z1 = z2; a sample only counts as a
// violation when the margin is below minus a rounding allowance.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lognls/error.hpp"
#include "lognls/fit.hpp"
#include "lognls/gaussian_dynamics.hpp"
#include "lognls/quadrature.hpp"
#include "lognls/superposition.hpp"

namespace lognls {

using ldouble = long double;
using cldouble = std::complex<long double>;

namespace detail {

constexpr ldouble kRound = 64.0L * LDBL_EPSILON;

}  // namespace detail

struct Margin {
  double margin;
  double scale;  // magnitude of the terms entering the margin
  double rel_tol = static_cast<double>(detail::kRound);
  bool violated() const { return margin < -rel_tol * scale; }
};

namespace detail {

inline cldouble widen(cdouble z) { return {z.real(), z.imag()}; }

/// u - (1+u) log1p(u), accurate for small |u|; the value at u = -1 is -1.
inline ldouble u_minus_xlogx(ldouble u) {
  if (u == -1.0L) return -1.0L;
  if (std::abs(u) < 0.1L) {
    // -sum_{k>=2} (-u)^k / (k (k-1))
    ldouble s = 0.0L, p = u * u;
    for (int k = 2; k < 40; ++k, p *= -u) s -= p / (ldouble(k) * (k - 1));
    return s;
  }
  return u - (1.0L + u) * std::log1p(u);
}

}  // namespace detail

/// 2|z2 - z1|^2 - |Im((z2 ln|z2|^2 - z1 ln|z1|^2)(conj z2 - conj z1))|.
/// Writing z2 ln|z2|^2 - z1 ln|z1|^2 = (z2 - z1) ln|z2|^2 + z1 ln(|z2|^2/|z1|^2), the
/// first part contributes a real number, so the modulus equals
/// |ln(|z2|^2/|z1|^2)| |Im(z1 conj z2)|.
inline Margin log_pair_margin(cdouble z1, cdouble z2) {
  const cldouble a = detail::widen(z1), b = detail::widen(z2);
  const ldouble rhs = 2.0L * std::norm(b - a);
  ldouble lhs = 0.0L;
  if (std::norm(a) > 0.0L && std::norm(b) > 0.0L) {
    const ldouble im = std::abs((a * std::conj(b)).imag());
    if (im > 0.0L) lhs = std::abs(std::log(std::norm(b) / std::norm(a))) * im;
  }
  return {static_cast<double>(rhs - lhs), static_cast<double>(rhs + lhs)};
}

inline double check_log_pair(cdouble z1, cdouble z2) { return log_pair_margin(z1, z2).margin; }

/// F1(z) = |z|^2 (ln|z|^2 - 1). Margin of
/// F1(z1) <= F1(z2) + 2 Re(z2 conj zeta) ln|z2|^2 + 2|zeta|^2 (ln max(|z1|,|z2|) + 1),
/// zeta = z1 - z2, in the form b f(u) + |zeta|^2 (2 + max(0, log1p u)) with
/// b = |z2|^2, u = (|z1|^2 - |z2|^2)/b, f(u) = u - (1+u) log1p(u).
inline Margin F1_expansion_margin(cdouble z1, cdouble z2) {
  const cldouble a = detail::widen(z1), b = detail::widen(z2);
  const cldouble zeta = a - b;
  const ldouble q = std::norm(zeta);
  const ldouble bb = std::norm(b);
  if (bb == 0.0L) {
    // z2 = 0: F1(z2) and the middle term vanish.
    const ldouble m = 3.0L * q;
    return {static_cast<double>(m), static_cast<double>(m)};
  }
  const ldouble diff = (zeta * std::conj(a + b)).real();  // |z1|^2 - |z2|^2
  const ldouble u = diff / bb;
  // b f(u) = (|z1|^2 - |z2|^2) - |z1|^2 ln(|z1|^2/|z2|^2) away from u = 0.
  const ldouble aa = std::norm(a);
  const ldouble t1 = std::abs(u) < 0.1L
                         ? bb * detail::u_minus_xlogx(u)
                         : diff - (aa > 0.0L ? aa * (std::log(aa) - std::log(bb)) : 0.0L);
  const ldouble t2 = q * (2.0L + (u > 0.0L ? std::log1p(u) : 0.0L));
  return {static_cast<double>(t1 + t2), static_cast<double>(std::abs(t1) + t2)};
}

inline double check_F1_expansion(cdouble z1, cdouble z2) {
  return F1_expansion_margin(z1, z2).margin;
}

/// F(z) = z ln|z|; margin of |F(zt) - F(z)| <= |z - zt| (3 - ln|z|) on the unit disk.
inline Margin zlogz_lipschitz_margin(cdouble z, cdouble zt) {
  require(std::abs(z) <= 1.0 && std::abs(zt) <= 1.0, ErrorKind::DomainViolation,
          "arguments must lie in the closed unit disk");
  require(z != cdouble(0.0), ErrorKind::DomainViolation, "z must be nonzero");
  const cldouble a = detail::widen(z), b = detail::widen(zt);
  const cldouble d = b - a;
  const ldouble lnz = 0.5L * std::log(std::norm(a));
  const ldouble rhs = std::abs(d) * (3.0L - lnz);
  ldouble lhs;
  if (std::norm(b) == 0.0L) {
    lhs = std::abs(a) * std::abs(lnz);
  } else {
    const ldouble lnzt = 0.5L * std::log(std::norm(b));
    // ln|zt| - ln|z| = (1/2) log1p((|zt|^2 - |z|^2)/|z|^2)
    const ldouble u = (d * std::conj(a + b)).real() / std::norm(a);
    const ldouble dl = std::abs(u) < 0.5L ? 0.5L * std::log1p(u) : lnzt - lnz;
    lhs = std::abs(d * lnzt + a * dl);
  }
  return {static_cast<double>(rhs - lhs), static_cast<double>(rhs + lhs)};
}

inline double check_zlogz_lipschitz(cdouble z, cdouble zt) {
  return zlogz_lipschitz_margin(z, zt).margin;
}

// ---------------------------------------------------------------------------
// Seeded sweeps.

struct CheckReport {
  std::string name;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_relative = std::numeric_limits<double>::infinity();  // margin / rhs scale
  std::uint64_t seed = 0;
  cdouble worst_a{0.0, 0.0};
  cdouble worst_b{0.0, 0.0};

  bool passed() const { return violations == 0; }

  void absorb(const Margin& m, cdouble a, cdouble b) {
    ++samples;
    if (m.violated()) ++violations;
    const double rel = m.scale > 0.0 ? m.margin / m.scale : 0.0;
    worst_margin = std::min(worst_margin, m.margin);
    if (rel < worst_relative) {
      worst_relative = rel;
      worst_a = a;
      worst_b = b;
    }
  }

  void merge(const CheckReport& o) {
    samples += o.samples;
    violations += o.violations;
    worst_margin = std::min(worst_margin, o.worst_margin);
    if (o.worst_relative < worst_relative) {
      worst_relative = o.worst_relative;
      worst_a = o.worst_a;
      worst_b = o.worst_b;
    }
  }
};

namespace detail {

/// Random pairs over the documented input domains: log-uniform moduli in
/// [lo, hi] with uniform phases, clusters near 0 and near |z| = 1, near-diagonal
/// pairs, radially aligned pairs and exact zeros.
class PairSampler {
 public:
  PairSampler(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk, double lo, double hi)
      : lo_(std::log(lo)), hi_(std::log(hi)), max_mod_(hi) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    rng_.seed(seq);
  }

  std::pair<cdouble, cdouble> next() {
    const double kind = unit();
    cdouble a = generic(), b = generic();
    if (kind < 0.40) {
    } else if (kind < 0.52) {
      a = polar(std::exp(uniform(lo_, std::log(1e-6))));
      b = polar(std::exp(uniform(lo_, std::log(1e-6))));
    } else if (kind < 0.64) {
      a = polar(1.0 + uniform(-1e-3, 1e-3));
      b = polar(1.0 + uniform(-1e-3, 1e-3));
    } else if (kind < 0.82) {
      const double rel = std::exp(uniform(std::log(1e-12), std::log(1e-1)));
      b = a * (1.0 + std::polar(rel, uniform(0.0, 2.0 * std::numbers::pi)));
    } else if (kind < 0.94) {
      const double s = std::exp(uniform(std::log(1e-6), std::log(1e1)));
      b = a * (unit() < 0.5 ? s : 1.0 + (s - 1.0) * 1e-3);
    } else {
      (unit() < 0.5 ? a : b) = 0.0;
    }
    clamp(a);
    clamp(b);
    return {a, b};
  }

 private:
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  cdouble polar(double r) { return std::polar(r, uniform(0.0, 2.0 * std::numbers::pi)); }
  cdouble generic() { return polar(std::exp(uniform(lo_, hi_))); }
  void clamp(cdouble& z) const {
    const double m = std::abs(z);
    if (m > max_mod_) z *= max_mod_ / m;
    while (std::abs(z) > max_mod_) z *= 1.0 - 0x1p-52;
  }

  std::mt19937_64 rng_;
  double lo_, hi_, max_mod_;
};

constexpr std::uint64_t kChunk = 1u << 16;

template <class Eval>
CheckReport sweep(const std::string& name, std::uint64_t stream, std::uint64_t samples,
                  std::uint64_t seed, unsigned jobs, double lo, double hi, Eval eval) {
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<CheckReport> parts(chunks);
  auto work = [&](std::uint64_t c) {
    PairSampler s(seed, stream, c, lo, hi);
    const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto [a, b] = s.next();
      parts[c].absorb(eval(a, b), a, b);
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += jobs) work(c);
      });
    for (auto& t : pool) t.join();
  }
  CheckReport out;
  out.name = name;
  out.seed = seed;
  for (const auto& p : parts) out.merge(p);
  return out;
}

}  // namespace detail

inline CheckReport sweep_log_pair(std::uint64_t samples, std::uint64_t seed, unsigned jobs = 1) {
  return detail::sweep("log_pair", 1, samples, seed, jobs, 1e-12, 1e3,
                       [](cdouble a, cdouble b) { return log_pair_margin(a, b); });
}

inline CheckReport sweep_F1_expansion(std::uint64_t samples, std::uint64_t seed,
                                      unsigned jobs = 1) {
  return detail::sweep("F1_expansion", 2, samples, seed, jobs, 1e-12, 1e3,
                       [](cdouble a, cdouble b) { return F1_expansion_margin(a, b); });
}

/// z is drawn away from 0 (|z| >= 1e-12); zt may be 0.
inline CheckReport sweep_zlogz_lipschitz(std::uint64_t samples, std::uint64_t seed,
                                         unsigned jobs = 1) {
  return detail::sweep("zlogz_lipschitz", 3, samples, seed, jobs, 1e-12, 1.0,
                       [](cdouble a, cdouble b) {
                         if (a == cdouble(0.0)) std::swap(a, b);
                         if (a == cdouble(0.0)) a = 1e-12;
                         return zlogz_lipschitz_margin(a, b);
                       });
}

// ---------------------------------------------------------------------------
// Gaussian tail integrals.

struct TailCheck {
  double lhs;
  double bound;
  double ratio;  // lhs / bound, computed without the common factor e^{-gamma y^2}
  double refined_change;
};

/// int_y^inf e^{-gamma x^2} dx against e^{-gamma y^2} / (2 gamma y).
inline TailCheck gauss_tail_1d(double y, double gamma) {
  require(y > 0.0 && gamma > 0.0, ErrorKind::InvalidArgument, "need y > 0 and gamma > 0");
  // x = y + s: the integral is e^{-gamma y^2} J with J = int_0^inf e^{-2 gamma y s - gamma s^2} ds.
  auto f = [=](double s) { return std::exp(-gamma * s * (2.0 * y + s)); };
  const double scale = std::min(1.0 / (2.0 * gamma * y), 1.0 / std::sqrt(gamma));
  const auto J = quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                 {scale, 4.0 * scale, 16.0 * scale});
  const double e = std::exp(-gamma * y * y);
  TailCheck out;
  out.lhs = e * J.value;
  out.bound = e / (2.0 * gamma * y);
  out.ratio = 2.0 * gamma * y * J.value;
  out.refined_change = J.refined_change;
  return out;
}

/// C_0 = C_1 = 1/2, C_n = 1/2 + (2n - 1)/2 C_{n-2}.
inline double tail_moment_constant(int n) {
  require(n >= 0, ErrorKind::InvalidArgument, "n must be nonnegative");
  if (n <= 1) return 0.5;
  return 0.5 + 0.5 * (2.0 * n - 1.0) * tail_moment_constant(n - 2);
}

/// I_n = int_R^inf x^n e^{-gamma x^2} dx against C_n R^{n-1} e^{-gamma R^2} / gamma.
inline TailCheck gauss_tail_moments(int n, double gamma, double R) {
  require(gamma > 0.0, ErrorKind::InvalidArgument, "gamma must be positive");
  require(R >= 1.0 / std::sqrt(gamma) * (1.0 - 1e-15), ErrorKind::DomainViolation,
          "R must be at least gamma^{-1/2}");
  auto f = [=](double s) {
    const double e = std::exp(-gamma * s * (2.0 * R + s));
    return e == 0.0 ? 0.0 : std::pow(1.0 + s / R, n) * e;
  };
  const double scale = std::min(1.0 / (2.0 * gamma * R), 1.0 / std::sqrt(gamma));
  const auto K = quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                 {scale, 4.0 * scale, 16.0 * scale});
  const double Cn = tail_moment_constant(n);
  const double e = std::exp(-gamma * R * R);
  TailCheck out;
  out.lhs = std::pow(R, n) * e * K.value;
  out.bound = Cn * std::pow(R, n - 1) * e / gamma;
  out.ratio = gamma * R * K.value / Cn;
  out.refined_change = K.refined_change;
  return out;
}

inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// M_n = int_{|x| > R} |x|^n e^{-gamma |x|^2} dx in R^d against
/// |S^{d-1}| C_{n+d-1} R^{d+n-2} e^{-gamma R^2} / gamma.
inline TailCheck gauss_tail_moments_radial(int d, int n, double gamma, double R) {
  require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  const TailCheck r = gauss_tail_moments(n + d - 1, gamma, R);
  const double area = unit_sphere_area(d);
  return {area * r.lhs, area * r.bound, r.ratio, r.refined_change};
}

struct TailPoint {
  std::string family;  // "1d", "moment" or "radial"
  double gamma;
  double y;            // y for "1d", R otherwise
  int n;
  int dim;
  double ratio;
  bool equality_case;  // the constant is attained: ratio must equal 1
  bool ok;
};

/// The tail lemmas over gamma in {1/2, 1, 2}, y in {1/4, ..., 10}, R = k / sqrt(gamma)
/// with k in {1, 1.5, 2, 3, 5}, n <= 6 on the line and n <= 4 radially in d <= 3.
/// The moment bound is an identity for n = 1 (n + d - 1 = 1 radially).
inline std::vector<TailPoint> gauss_tail_ladder() {
  std::vector<TailPoint> out;
  auto add = [&](std::string fam, double g, double y, int n, int d, double ratio, bool eq) {
    const bool ok = eq ? std::abs(ratio - 1.0) < 1e-10 : ratio < 1.0;
    out.push_back({std::move(fam), g, y, n, d, ratio, eq, ok});
  };
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double y : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0})
      add("1d", gamma, y, 0, 1, gauss_tail_1d(y, gamma).ratio, false);
    for (double k : {1.0, 1.5, 2.0, 3.0, 5.0}) {
      const double R = k / std::sqrt(gamma);
      for (int n = 0; n <= 6; ++n)
        add("moment", gamma, R, n, 1, gauss_tail_moments(n, gamma, R).ratio, n == 1);
      for (int d = 1; d <= 3; ++d)
        for (int n = 0; n <= 4; ++n)
          add("radial", gamma, R, n, d, gauss_tail_moments_radial(d, n, gamma, R).ratio,
              n + d - 1 == 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Superposition defect ||g ln|g| - sum g_k ln|g_k|||_{L^2}.

namespace detail {

/// Integral of f over an axis-aligned box by nested adaptive quadrature.
template <class F>
double integrate_box(F&& f, const RVector& lo, const RVector& hi,
                     const std::vector<std::vector<double>>& breaks, double* change) {
  const int d = static_cast<int>(lo.size());
  std::vector<double> x(d);
  *change = 0.0;
  std::function<double(int)> level = [&](int axis) -> double {
    auto g = [&](double xi) {
      x[axis] = xi;
      return axis + 1 == d ? f(std::span<const double>(x.data(), d)) : level(axis + 1);
    };
    const auto r = quad::integrate(g, lo[axis], hi[axis], breaks[axis], 1e-10);
    *change = std::max(*change, r.refined_change);
    return r.value;
  };
  return level(0);
}

inline std::vector<std::vector<double>> axis_breaks(std::span<const GaussianTerm> terms) {
  const int d = terms.front().dim();
  std::vector<std::vector<double>> br(d);
  for (int a = 0; a < d; ++a)
    for (std::size_t j = 0; j < terms.size(); ++j) {
      br[a].push_back(terms[j].center[a]);
      for (std::size_t k = j + 1; k < terms.size(); ++k)
        br[a].push_back(0.5 * (terms[j].center[a] + terms[k].center[a]));
    }
  return br;
}

}  // namespace detail

struct LogBoundReport {
  double lhs_norm = 0.0;
  double rhs_shape = 0.0;
  double epsilon = 0.0;
  double epsilon0 = 0.0;
  double implied_constant = 0.0;
  double refined_change = 0.0;
};

inline LogBoundReport sum_gaussian_log_bound(std::span<const GaussianTerm> terms) {
  const auto sep = separation_info(terms);
  LogBoundReport r;
  r.epsilon = sep.epsilon;
  r.epsilon0 = sep.epsilon0;
  if (terms.size() == 1) return r;
  require(sep.epsilon < sep.epsilon0, ErrorKind::SeparationTooSmall,
          "epsilon = " + std::to_string(sep.epsilon) + " >= epsilon0 = " +
              std::to_string(sep.epsilon0));
  const int d = terms.front().dim();
  const double margin = 15.0 / std::sqrt(sep.lambda_minus);
  RVector lo = RVector::Constant(d, std::numeric_limits<double>::infinity());
  RVector hi = -lo;
  for (const auto& g : terms) {
    lo = lo.cwiseMin(g.center);
    hi = hi.cwiseMax(g.center);
  }
  lo.array() -= margin;
  hi.array() += margin;
  auto f = [&](std::span<const double> x) { return std::norm(log_defect(terms, x)); };
  const double integral = detail::integrate_box(f, lo, hi, detail::axis_breaks(terms),
                                                &r.refined_change);
  r.lhs_norm = std::sqrt(integral);
  const double N = static_cast<double>(terms.size());
  r.rhs_shape = std::pow(N, 1.5) * sep.lambda_plus * std::pow(sep.epsilon, -(0.5 * d + 1.0)) /
                std::sqrt(sep.lambda_minus) *
                std::exp(-sep.lambda_minus / (4.0 * sep.epsilon * sep.epsilon) + sep.max_omega);
  r.implied_constant = r.rhs_shape > 0.0 ? r.lhs_norm / r.rhs_shape : 0.0;
  return r;
}

struct LadderReport {
  std::vector<double> abscissa;  // L or t
  std::vector<double> values;
  std::vector<double> implied_constants;
  LinearFit fit;                 // ln(value) against abscissa^2
  double target_slope = 0.0;
};

/// Two real Gaussians exp(-Lambda |x -+ L/2|^2) in d = 1 for each separation L.
inline LadderReport log_bound_separation_ladder(std::span<const double> separations,
                                                double Lambda = 1.0) {
  LadderReport out;
  std::vector<double> x2, ly;
  for (double L : separations) {
    GaussianTerm a, b;
    a.Lambda = b.Lambda = CMatrix::Constant(1, 1, cdouble(Lambda, 0.0));
    a.center = RVector::Constant(1, -0.5 * L);
    b.center = RVector::Constant(1, 0.5 * L);
    const GaussianTerm terms[] = {a, b};
    const auto r = sum_gaussian_log_bound(terms);
    out.abscissa.push_back(L);
    out.values.push_back(r.lhs_norm);
    out.implied_constants.push_back(r.implied_constant);
    x2.push_back(L * L);
    ly.push_back(std::log(r.lhs_norm));
  }
  out.fit = linear_fit(x2, ly);
  out.target_slope = -Lambda / 4.0;
  return out;
}

// ---------------------------------------------------------------------------
// Weighted defect for Gaussons: || |x| (G ln|G|^2 - sum G_k ln|G_k|^2) ||_{L^2}.

inline std::vector<GaussianTerm> gausson_terms(std::span<const GaussianParams> members, double t) {
  std::vector<GaussianTerm> terms;
  for (const auto& p : members) {
    require(p.is_gausson(), ErrorKind::InvalidArgument, "members must be Gaussons");
    terms.push_back(gausson_term(p, t));
  }
  return terms;
}

struct WeightedDefect {
  double lhs = 0.0;
  double epsilon = 0.0;
  double epsilon0 = 0.0;
  double refined_change = 0.0;
};

inline WeightedDefect weighted_log_diff_norm(std::span<const GaussianParams> members, double t) {
  const auto terms = gausson_terms(members, t);
  const auto sep = separation_info(terms);
  WeightedDefect r;
  r.epsilon = sep.epsilon;
  r.epsilon0 = sep.epsilon0;
  if (terms.size() == 1) return r;
  require(sep.epsilon < sep.epsilon0, ErrorKind::SeparationTooSmall,
          "members are not separated enough at t = " + std::to_string(t));
  const int d = terms.front().dim();
  const double margin = 15.0 / std::sqrt(sep.lambda_minus);
  RVector lo = RVector::Constant(d, std::numeric_limits<double>::infinity());
  RVector hi = -lo;
  for (const auto& g : terms) {
    lo = lo.cwiseMin(g.center);
    hi = hi.cwiseMax(g.center);
  }
  lo.array() -= margin;
  hi.array() += margin;
  auto f = [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return 4.0 * r2 * std::norm(log_defect(terms, x));  // ln|G|^2 = 2 ln|G|
  };
  auto br = detail::axis_breaks(terms);
  for (auto& b : br) b.push_back(0.0);
  r.lhs = std::sqrt(detail::integrate_box(f, lo, hi, br, &r.refined_change));
  return r;
}

/// Weighted defect on a time ladder, ln(lhs) fitted against t^2; the target
/// slope is -lambda v_*^2 / 4.
inline LadderReport weighted_log_diff_ladder(std::span<const GaussianParams> members,
                                             std::span<const double> times, double v_star) {
  require(!members.empty(), ErrorKind::InvalidArgument, "need members");
  LadderReport out;
  std::vector<double> x2, ly;
  for (double t : times) {
    const auto r = weighted_log_diff_norm(members, t);
    out.abscissa.push_back(t);
    out.values.push_back(r.lhs);
    x2.push_back(t * t);
    ly.push_back(std::log(r.lhs));
  }
  if (members.size() > 1) out.fit = linear_fit(x2, ly);
  out.target_slope = -members.front().lambda * v_star * v_star / 4.0;
  return out;
}

/// Pointwise domination
///   |g ln|g|^2 - sum g_k ln|g_k|^2|
///     <= 2 sum_{k != j} |g_k| [dw_j + dw_k + 3 + 2 ln N + lambda|x - x_k|^2 + lambda|x - x_j|^2]
/// for every j, at `samples` random points around the members at time t.
inline CheckReport corollary_domination_check(std::span<const GaussianParams> members, double t,
                                              std::uint64_t samples, std::uint64_t seed) {
  const auto terms = gausson_terms(members, t);
  const auto sep = separation_info(terms);
  require(terms.size() == 1 || sep.epsilon < sep.epsilon0, ErrorKind::SeparationTooSmall,
          "members are not separated enough");
  const int d = terms.front().dim();
  const double lambda = members.front().lambda;
  const std::size_t N = terms.size();
  const double margin = 8.0 / std::sqrt(lambda);
  RVector lo = RVector::Constant(d, std::numeric_limits<double>::infinity());
  RVector hi = -lo;
  for (const auto& g : terms) {
    lo = lo.cwiseMin(g.center);
    hi = hi.cwiseMax(g.center);
  }
  lo.array() -= margin;
  hi.array() += margin;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 7u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CheckReport rep;
  rep.name = "corollary_domination";
  rep.seed = seed;
  std::vector<double> x(d);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int a = 0; a < d; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * unit(rng);
    const double lhs = 2.0 * std::abs(log_defect(terms, x));
    for (std::size_t j = 0; j < N; ++j) {
      double rhs = 0.0;
      const double dwj = sep.max_omega - terms[j].omega;
      double rj2 = 0.0;
      for (int a = 0; a < d; ++a) rj2 += (x[a] - terms[j].center[a]) * (x[a] - terms[j].center[a]);
      for (std::size_t k = 0; k < N; ++k) {
        if (k == j) continue;
        double rk2 = 0.0;
        for (int a = 0; a < d; ++a)
          rk2 += (x[a] - terms[k].center[a]) * (x[a] - terms[k].center[a]);
        const double gk = std::exp(terms[k].log_value(x).real());
        rhs += 2.0 * gk *
               (dwj + (sep.max_omega - terms[k].omega) + 3.0 + 2.0 * std::log(double(N)) +
                lambda * rk2 + lambda * rj2);
      }
      const Margin m{rhs - lhs, rhs + lhs, 1e-12};
      rep.absorb(m, cdouble(x[0], j), cdouble(lhs, rhs));
    }
  }
  return rep;
}

}  // namespace lognls
