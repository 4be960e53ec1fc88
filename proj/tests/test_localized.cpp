#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lognls/lognls.hpp"

using namespace lognls;

namespace {

constexpr double kSmoothTailL2 = 0.0012227766067496375739;
constexpr double kSmoothTailGrad = 0.0059472056550925635914;
constexpr double kSharpTailMass = 5.1919560870464899903e-23;
constexpr double kOverlapGradMod = 0.0047221849526591318588;
constexpr double kOverlapGradGrad = 0.018451580181862094157;
constexpr double kOverlapWeighted = 0.0060000914347107362837;

GaussianParams gausson(double x0, double v, double omega = 0.0, int d = 1) {
  return GaussianParams::gausson(d, 1.0, omega, RVector::Constant(d, x0), RVector::Constant(d, v), 0.0);
}

Field gausson_field(const GaussianParams& p, const Grid& g, double t) {
  return sample(
      [&](std::span<const double> x) {
        return eval_gausson(p.omega, std::span<const double>(p.x0.data(), p.dim),
                            std::span<const double>(p.v.data(), p.dim), p.theta, p.lambda, t, x);
      },
      g);
}

}  // namespace

TEST(Cutoff, ShapeAndSlope) {
  EXPECT_EQ(cutoff(-1.0), 1.0);
  EXPECT_EQ(cutoff(-3.0), 1.0);
  EXPECT_EQ(cutoff(1.0), 0.0);
  EXPECT_DOUBLE_EQ(cutoff(0.0), 0.5);
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = -1.0 + 1e-3 * i;
    EXPECT_NEAR(cutoff(s) + cutoff(-s), 1.0, 4e-15);
    worst = std::max(worst, std::abs(cutoff_derivative(s)));
    if (i > 0) EXPECT_LE(cutoff(s), cutoff(s - 1e-3));
  }
  EXPECT_NEAR(worst, kCutoffSlope, 1e-12);
  const double h = 1e-6;
  EXPECT_NEAR((cutoff(0.3 + h) - cutoff(0.3 - h)) / (2 * h), cutoff_derivative(0.3), 1e-8);
}

TEST(Partition, SumsToOneWithDisjointSupports) {
  const GaussianParams m[] = {gausson(-8.0, -1.0), gausson(8.0, 1.0)};
  const Grid g(1, 60.0, 512);
  const Partition p = build_partition(m, 2.0, 2.0, 2.0, g);
  ASSERT_EQ(p.members(), 2u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (const auto& psi : p.psi) {
      EXPECT_GE(psi[i], -1e-15);
      EXPECT_LE(psi[i], 1.0 + 1e-15);
      s += psi[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_EQ(p.psi[1][i] * p.psi[2][i], 0.0);
  }
  for (std::size_t j = 1; j <= 2; ++j)
    for (double v : partition_gradient_norm(p, j)) EXPECT_LE(v, kCutoffSlope + 1e-12);
}

TEST(Partition, TimeDerivativeMatchesFiniteDifference) {
  const GaussianParams m[] = {gausson(-8.0, -1.0), gausson(8.0, 1.0)};
  const Grid g(1, 60.0, 512);
  const double h = 1e-5, T = 0.5;
  const Partition p0 = build_partition(m, 3.0 - h, 3.0 - h - T, 2.0, g);
  const Partition p1 = build_partition(m, 3.0 + h, 3.0 + h - T, 2.0, g);
  const Partition p = build_partition(m, 3.0, 3.0 - T, 2.0, g);
  const auto dpsi = partition_time_derivative(p, 1);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(dpsi[i], (p1.psi[1][i] - p0.psi[1][i]) / (2 * h), 1e-6);
}

TEST(Partition, OverlapRaisesValidityGate) {
  const GaussianParams m[] = {gausson(-8.0, 1.0), gausson(8.0, -1.0)};
  const Grid g(1, 40.0, 256);
  try {
    build_partition(m, 6.0, 6.0, 2.0, g);
    FAIL() << "expected SupportsOverlap";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SupportsOverlap);
    EXPECT_TRUE(e.is_validity_gate());
  }
  const double tmax = max_partition_time(m, 12.0, 2.0);
  EXPECT_NO_THROW(build_partition(m, 12.0, tmax, 2.0, g));
  EXPECT_THROW(build_partition(m, 12.0, tmax + 1e-3, 2.0, g), Error);
}

TEST(Localized, PiecesAddUpToTotals) {
  const GaussianParams m[] = {gausson(-10.0, -1.0, 0.2), gausson(10.0, 1.0, -0.1)};
  const Grid g(1, 64.0, 1024);
  Field u = gausson_field(m[0], g, 0.0);
  u += gausson_field(m[1], g, 0.0);
  const Partition p = build_partition(m, 0.0, 2.0, 2.0, g);
  const auto r = localized_quantities(u, p, m, 1.0);
  double M = 0.0, E = 0.0;
  for (std::size_t j = 0; j <= 2; ++j) {
    M += r.M[j];
    E += r.E[j];
  }
  EXPECT_NEAR(M, r.mass, 1e-12 * r.mass);
  EXPECT_NEAR(E, r.energy, 1e-11 * std::abs(r.energy));
  EXPECT_NEAR(r.mass, mass(u), 1e-12 * r.mass);
  EXPECT_LT(r.M[0], 1e-6 * r.mass);
  EXPECT_NEAR(r.M[1], r.M[2] * std::exp(2.0 * 0.3), 1e-6 * r.M[1]);
  // Momentum of a Gausson is v times its mass.
  EXPECT_NEAR(r.J[1][0], -r.M[1], 1e-8 * r.M[1]);
}

TEST(SlowVariation, StationaryGaussonIsFlat) {
  const GaussianParams m[] = {gausson(0.0, 0.0)};
  const Grid g(1, 32.0, 256);
  SolverConfig c;
  c.dt = 1e-3;
  std::vector<double> ts;
  for (int i = 0; i <= 8; ++i) ts.push_back(1.0 + 0.125 * i);
  const auto traj = integrate(gausson_field(m[0], g, 0.0), 0.0, 2.0, c, ts);
  const auto rep = slow_variation_report(traj, m, 1.0, 1.0, 0.0, -1.0, 1e-14, false);
  for (const auto& s : rep.samples) EXPECT_LT(std::abs(s.dS_dt), 1e-8);
  EXPECT_LT(rep.energy_drift, 1e-10);
  EXPECT_THROW(slow_variation_report(traj, m, 1.0, 1.0, 0.0, 1e-3), Error);
}

TEST(Tails, SmoothWeightOracles) {
  const auto t = gausson_tail_norms(gausson(0.0, 1.0), 3.0);
  EXPECT_NEAR(t.l2 / kSmoothTailL2, 1.0, 1e-12);
  EXPECT_NEAR(t.grad / kSmoothTailGrad, 1.0, 1e-12);
  const auto s = gausson_tail_norms(gausson(0.0, 1.0), 5.0, true);
  EXPECT_NEAR(s.l2 * s.l2 / kSharpTailMass, 1.0, 1e-12);
  EXPECT_THROW(gausson_tail_norms(GaussianParams::breather(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0), 3.0),
               Error);
}

TEST(Tails, NormalizedLadderDecreases) {
  const double ts[] = {4.0, 6.0, 8.0};
  const auto lad = gausson_tail_report(gausson(0.0, 1.0), ts, 2.0);
  for (std::size_t i = 1; i < lad.size(); ++i) {
    EXPECT_LT(lad[i].l2_normalized, lad[i - 1].l2_normalized);
    EXPECT_LT(lad[i].grad_normalized, lad[i - 1].grad_normalized);
    EXPECT_LT(lad[i].lp_normalized, lad[i - 1].lp_normalized);
    EXPECT_LT(lad[i].moment_normalized, lad[i - 1].moment_normalized);
  }
}

TEST(Overlap, OneDimensionalOracles) {
  const auto o = gausson_overlap(gausson(-2.0, 1.0), gausson(2.0, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(o.separation, 4.0);
  EXPECT_NEAR(o.grad_mod / kOverlapGradMod, 1.0, 1e-10);
  EXPECT_NEAR(o.grad_grad / kOverlapGradGrad, 1.0, 1e-10);
  EXPECT_NEAR(o.weighted / kOverlapWeighted, 1.0, 1e-12);
}

TEST(Overlap, PlainClosedFormInHigherDimension) {
  for (int d = 2; d <= 3; ++d) {
    const auto o = gausson_overlap(gausson(-1.0, 0.0, 0.0, d), gausson(1.0, 0.0, 0.0, d), 0.0);
    const double s2 = 4.0 * d;
    EXPECT_NEAR(o.plain, std::exp(d - 0.5 * s2) * std::pow(std::numbers::pi / 2.0, 0.5 * d), 1e-14);
    EXPECT_GT(o.grad_grad, o.grad_mod);
  }
}

TEST(Overlap, DivergingLadderStaysBounded) {
  const double ts[] = {1.0, 2.0, 3.0, 4.0};
  const auto lad = gausson_orthogonality_report(gausson(-2.0, -1.0), gausson(2.0, 1.0), ts, 0.0, 2.0);
  for (const auto& r : lad) {
    EXPECT_LT(r.weighted_normalized, 1e3);
    EXPECT_LT(r.grad_grad_normalized, 1e3);
  }
  for (std::size_t i = 1; i < lad.size(); ++i)
    EXPECT_LT(lad[i].weighted_normalized, lad[i - 1].weighted_normalized);
}
