#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lognls/lognls.hpp"

using namespace lognls;

namespace {

// Oracles from tests/oracles/compute_oracles.py (mpmath, 40 digits).
constexpr double kA3Re = 0.54993891404935560454;
constexpr double kA3Im = -0.64372305414560309856;
constexpr double kPeriod = 2.4279491220422531841;
constexpr double kRmin = 0.53354300392830422876;
constexpr double kR10 = 0.95877583951682147193;
constexpr double kRdot10 = -0.28381308139574225692;
constexpr double kPhi1 = -0.42498415441645673862;

}  // namespace

TEST(MatrixOde, GaussonIsFixedPoint) {
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(0.5 * i);
  for (double lam : {0.5, 1.0, 2.0})
    for (int d = 1; d <= 3; ++d) {
      const CMatrix A = CMatrix::Identity(d, d) * cdouble(2.0 * lam, 0.0);
      for (const auto& s : evolve_matrix_ode(A, lam, ts)) {
        EXPECT_LT((s.A - A).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(s.det_ratio, 1.0, 1e-12);
      }
    }
}

TEST(MatrixOde, DiagonalEntriesMatchScalarOracle) {
  CMatrix A(2, 2);
  A << 1.0, 0.0, 0.0, 3.0;
  const std::vector<double> ts{0.0, 0.5, 1.0};
  const auto st = evolve_matrix_ode(A, 0.5, ts, 1e-12);
  EXPECT_NEAR(st[2].A(0, 0).real(), 1.0, 1e-11);
  EXPECT_NEAR(st[2].A(0, 0).imag(), 0.0, 1e-11);
  EXPECT_NEAR(st[2].A(1, 1).real(), kA3Re, 1e-9);
  EXPECT_NEAR(st[2].A(1, 1).imag(), kA3Im, 1e-9);
  EXPECT_NEAR(std::abs(st[2].A(0, 1)), 0.0, 1e-14);
}

TEST(MatrixOde, StaysSymmetricWithPositiveRealPart) {
  CMatrix A(2, 2);
  A << cdouble(1.5, 0.2), cdouble(0.3, -0.1), cdouble(0.3, -0.1), cdouble(0.8, 0.4);
  std::vector<double> ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(0.25 * i);
  for (const auto& s : evolve_matrix_ode(A, 1.0, ts)) {
    EXPECT_LT((s.A - s.A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(real_part_spectrum(s.A).minCoeff(), 0.0);
    EXPECT_GT(s.eig_min, 0.0);
    EXPECT_LE(s.eig_min, s.eig_max);
  }
}

TEST(MatrixOde, RejectsBadInput) {
  CMatrix A = CMatrix::Identity(1, 1) * cdouble(-1.0, 0.0);
  const std::vector<double> ts{0.0, 1.0};
  EXPECT_THROW(evolve_matrix_ode(A, 1.0, ts), Error);
  const std::vector<double> bad{0.5, 1.0};
  EXPECT_THROW(evolve_matrix_ode(CMatrix::Identity(1, 1), 1.0, bad), Error);
}

TEST(Breather, PeriodAndTurningPoint) {
  const auto p = breather_period(1.0, 0.0, 1.0);
  EXPECT_NEAR(p.period, kPeriod, 1e-9);
  EXPECT_LT(p.return_error, 1e-6);
  EXPECT_LT(p.invariant_drift, 1e-8);
  const auto traj = evolve_breather(1.0, 0.0, 1.0, 0.5 * kPeriod, 1e-12, 3);
  EXPECT_NEAR(traj.back().r, kRmin, 1e-8);
}

TEST(Breather, TrajectoryAndPhaseOracle) {
  const std::vector<double> ts{0.0, 1.0, 10.0};
  const auto b = evolve_breather(1.0, 0.0, 1.0, ts, 1e-12);
  EXPECT_NEAR(b[2].r, kR10, 1e-8);
  EXPECT_NEAR(b[2].rdot, kRdot10, 1e-8);
  EXPECT_NEAR(b[1].phi, kPhi1, 1e-8);
}

TEST(Breather, FirstIntegralConserved) {
  for (double lam : {1.0, -1.0}) {
    const auto traj = evolve_breather(0.7, 0.3, lam, 20.0, 1e-11, 101);
    for (const auto& s : traj) EXPECT_NEAR(s.first_integral, traj.front().first_integral, 1e-8);
  }
}

TEST(Breather, MatchesMatrixOdeInOneDimension) {
  // A = 1/r^2 - i rdot / r for the breather written as a Gaussian.
  const auto p = GaussianParams::breather(1.0, 0.8, 0.2, 0.0, 0.0, 0.0, 0.0);
  const std::vector<double> ts{0.0, 0.7, 1.9};
  const auto m = evolve_matrix_ode(p.A_in, 1.0, ts, 1e-12);
  const auto b = evolve_breather(0.8, 0.2, 1.0, ts, 1e-12);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(m[i].A(0, 0).real(), 1.0 / (b[i].r * b[i].r), 1e-9);
    EXPECT_NEAR(m[i].A(0, 0).imag(), -b[i].rdot / b[i].r, 1e-9);
  }
}

TEST(Breather, DefocusingWidthGrowth) {
  const auto s = breather_asymptotic_check(1.0, 0.0, -1.0, 1e6);
  EXPECT_GT(s.back().ratio, 0.85);
  EXPECT_LT(s.back().ratio, 1.15);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i].r, s[i - 1].r);
}

TEST(Breather, NonpositiveWidthRejected) {
  EXPECT_THROW(evolve_breather(0.0, 0.0, 1.0, 1.0, 1e-10, 3), Error);
  EXPECT_THROW(breather_period(1.0, 0.0, -1.0), Error);
}

TEST(Gausson, ClosedFormMatchesGaussianSolution) {
  const double x0[] = {0.3}, v[] = {0.7};
  const auto p = GaussianParams::gausson(1, 1.0, 0.4, RVector::Constant(1, 0.3),
                                         RVector::Constant(1, 0.7), 0.2);
  const std::vector<double> ts{0.0, 1.3};
  const auto st = evolve_matrix_ode(p.A_in, 1.0, ts);
  for (double x : {-2.0, -0.5, 0.0, 0.9, 2.5}) {
    const double xs[] = {x};
    const cdouble a = eval_gausson(0.4, x0, v, 0.2, 1.0, 1.3, xs);
    const cdouble b = eval_gaussian_solution(p, st[1], xs);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Gausson, MovingGaussonSolvesEquation) {
  // Residual of i u_t + u_xx / 2 + u ln|u|^2 by centered differences.
  const double x0[] = {-0.4}, v[] = {1.3};
  auto u = [&](double t, double x) {
    const double xs[] = {x};
    return eval_gausson(0.2, x0, v, 0.1, 1.0, t, xs);
  };
  const double h = 1e-3;
  for (double x : {-1.0, 0.0, 0.8}) {
    const double t = 0.6;
    const cdouble ut = (u(t + h, x) - u(t - h, x)) / (2.0 * h);
    const cdouble uxx = (u(t, x + h) - 2.0 * u(t, x) + u(t, x - h)) / (h * h);
    const cdouble z = u(t, x);
    const cdouble res = cdouble(0.0, 1.0) * ut + 0.5 * uxx + z * std::log(std::norm(z));
    EXPECT_LT(std::abs(res), 1e-5 * std::max(1.0, std::abs(z)));
  }
}
