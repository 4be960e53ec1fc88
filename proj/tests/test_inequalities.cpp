#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lognls/lognls.hpp"

using namespace lognls;

namespace {

constexpr double kTail1 = 0.13940279264033098825;
constexpr double kTail1Bound = 0.1839397205857211608;
constexpr double kTail10 = 1.8508739302041394601e-45;
constexpr double kI4 = 1.1160107142881607424e-7;

cdouble random_point(std::mt19937_64& rng, double lo = -8.0, double hi = 2.0) {
  std::uniform_real_distribution<double> e(lo, hi), ph(0.0, 2.0 * std::numbers::pi);
  return std::polar(std::pow(10.0, e(rng)), ph(rng));
}

}  // namespace

TEST(LogPair, SymmetricAndGaugeInvariant) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const cdouble a = random_point(rng), b = random_point(rng);
    const cdouble g = std::polar(1.0, 0.37 * i);
    const double m = check_log_pair(a, b);
    EXPECT_NEAR(check_log_pair(b, a), m, 1e-12 * (std::norm(a) + std::norm(b)));
    EXPECT_NEAR(check_log_pair(g * a, g * b), m, 1e-12 * (std::norm(a) + std::norm(b)));
    EXPECT_FALSE(log_pair_margin(a, b).violated());
  }
}

TEST(LogPair, DegenerateCases) {
  EXPECT_EQ(check_log_pair(cdouble(0.7, 0.2), cdouble(0.7, 0.2)), 0.0);
  EXPECT_DOUBLE_EQ(check_log_pair(0.0, cdouble(0.0, 2.0)), 8.0);
  EXPECT_DOUBLE_EQ(check_log_pair(1.0, cdouble(0.0, 1.0)), 4.0);
  // Real collinear pairs carry no imaginary part.
  EXPECT_DOUBLE_EQ(check_log_pair(1.0, 3.0), 8.0);
}

TEST(F1Expansion, EqualityOnDiagonalAndNonnegative) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const cdouble a = random_point(rng), b = random_point(rng);
    EXPECT_NEAR(check_F1_expansion(a, a), 0.0, 1e-14 * std::norm(a));
    EXPECT_FALSE(F1_expansion_margin(a, b).violated());
    EXPECT_FALSE(F1_expansion_margin(a, 0.0).violated());
  }
  EXPECT_DOUBLE_EQ(check_F1_expansion(1.0, 0.0), 3.0);
}

TEST(F1Expansion, MatchesDirectFormulaAwayFromCancellation) {
  auto F1 = [](cdouble z) { return std::norm(z) * (std::log(std::norm(z)) - 1.0); };
  const cdouble z1(1.3, -0.4), z2(0.2, 0.9);
  const cdouble zeta = z1 - z2;
  const double rhs = F1(z2) + 2.0 * (z2 * std::conj(zeta)).real() * std::log(std::norm(z2)) +
                     2.0 * std::norm(zeta) *
                         (std::log(std::max(std::abs(z1), std::abs(z2))) + 1.0);
  EXPECT_NEAR(check_F1_expansion(z1, z2), rhs - F1(z1), 1e-12);
}

TEST(ZlogzLipschitz, PropertiesOnUnitDisk) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const cdouble a = random_point(rng, -12.0, 0.0), b = random_point(rng, -12.0, 0.0);
    EXPECT_NEAR(check_zlogz_lipschitz(a, a), 0.0, 1e-300);
    EXPECT_FALSE(zlogz_lipschitz_margin(a, b).violated());
    EXPECT_FALSE(zlogz_lipschitz_margin(a, 0.0).violated());
  }
  EXPECT_THROW(check_zlogz_lipschitz(cdouble(2.0, 0.0), 0.5), Error);
  EXPECT_THROW(check_zlogz_lipschitz(0.0, 0.5), Error);
}

TEST(Sweeps, ZeroViolationsAndDeterministic) {
  for (unsigned jobs : {1u, 3u}) {
    const auto a = sweep_log_pair(200000, 7, jobs);
    const auto b = sweep_F1_expansion(200000, 7, jobs);
    const auto c = sweep_zlogz_lipschitz(200000, 7, jobs);
    EXPECT_EQ(a.violations + b.violations + c.violations, 0u);
    EXPECT_EQ(a.samples, 200000u);
  }
  const auto x = sweep_F1_expansion(150000, 11, 1);
  const auto y = sweep_F1_expansion(150000, 11, 4);
  EXPECT_EQ(x.worst_relative, y.worst_relative);
  EXPECT_EQ(x.worst_a, y.worst_a);
  EXPECT_EQ(x.worst_b, y.worst_b);
  const auto z = sweep_F1_expansion(150000, 12, 1);
  EXPECT_NE(x.worst_a, z.worst_a);
}

TEST(Tails, OneDimensionalOracle) {
  const auto a = gauss_tail_1d(1.0, 1.0);
  EXPECT_NEAR(a.lhs, kTail1, 1e-14);
  EXPECT_NEAR(a.bound, kTail1Bound, 1e-15);
  const auto b = gauss_tail_1d(10.0, 1.0);
  EXPECT_NEAR(b.lhs / kTail10, 1.0, 1e-12);
  EXPECT_LT(b.ratio, 1.0);
}

TEST(Tails, MomentOracleAndConstants) {
  const auto m = gauss_tail_moments(4, 2.0, 3.0);
  EXPECT_NEAR(m.lhs / kI4, 1.0, 1e-12);
  EXPECT_LT(m.ratio, 1.0);
  EXPECT_DOUBLE_EQ(tail_moment_constant(0), 0.5);
  EXPECT_DOUBLE_EQ(tail_moment_constant(2), 0.5 + 1.5 * 0.5);
  // n = 1 is an identity: int_R^inf x e^{-g x^2} = e^{-g R^2} / (2 g).
  EXPECT_NEAR(gauss_tail_moments(1, 2.0, 1.0).ratio, 1.0, 1e-12);
  EXPECT_THROW(gauss_tail_moments(2, 1.0, 0.5), Error);
}

TEST(Tails, LadderStrictExceptIdentities) {
  const auto pts = gauss_tail_ladder();
  EXPECT_EQ(pts.size(), 3u * (6 + 5 * (7 + 15)));
  for (const auto& p : pts) EXPECT_TRUE(p.ok) << p.family << " n=" << p.n << " d=" << p.dim;
}

TEST(Superposition, SeparationInfo) {
  const auto a = GaussianParams::gausson(1, 1.0, 0.0, RVector::Constant(1, -4.0), RVector::Zero(1), 0.0);
  const auto b = GaussianParams::gausson(1, 1.0, 0.0, RVector::Constant(1, 4.0), RVector::Zero(1), 0.0);
  const GaussianParams m[] = {a, b};
  const auto terms = gausson_terms(m, 0.0);
  const auto s = separation_info(terms);
  EXPECT_DOUBLE_EQ(s.epsilon, 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(s.lambda_minus, 1.0);
  const double x[] = {-4.0};
  EXPECT_LT(std::abs(log_defect(terms, x)), 1e-6);
}

TEST(Superposition, DefectExponentLadder) {
  const double Ls[] = {6.0, 8.0, 10.0, 12.0};
  const auto lad = log_bound_separation_ladder(Ls, 1.0);
  EXPECT_NEAR(lad.fit.slope / lad.target_slope, 1.0, 0.15);
  for (std::size_t i = 1; i < lad.values.size(); ++i) EXPECT_LT(lad.values[i], lad.values[i - 1]);
}

TEST(Superposition, WeightedLadderAndDomination) {
  const auto a = GaussianParams::gausson(1, 1.0, 0.0, RVector::Zero(1), RVector::Constant(1, -1.0), 0.0);
  const auto b = GaussianParams::gausson(1, 1.0, 0.0, RVector::Zero(1), RVector::Constant(1, 1.0), 0.0);
  const GaussianParams m[] = {a, b};
  const double ts[] = {3.0, 4.0, 5.0, 6.0};
  const auto lad = weighted_log_diff_ladder(m, ts, 2.0);
  EXPECT_NEAR(lad.fit.slope / lad.target_slope, 1.0, 0.5);
  const auto dom = corollary_domination_check(m, 4.0, 10000, 42);
  EXPECT_EQ(dom.violations, 0u);
  EXPECT_THROW(corollary_domination_check(m, 0.1, 10, 42), Error);
}

TEST(Quadrature, ConvergedIntegrals) {
  const auto r = quad::integrate([](double x) { return std::exp(-x * x); }, 0.0,
                                 std::numeric_limits<double>::infinity(), {1.0});
  EXPECT_NEAR(r.value, 0.5 * std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_LT(r.refined_change, 1e-10);
}

TEST(Fit, LinearAndQuadratic) {
  const double x[] = {0.0, 1.0, 2.0, 3.0};
  const double y[] = {1.0, 3.0, 5.0, 7.0};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  const double one[] = {1.0};
  EXPECT_THROW(linear_fit(one, one), Error);
}
