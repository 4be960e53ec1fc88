#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lognls/lognls.hpp"

using namespace lognls;

namespace {

constexpr double kGaussonMass = 3.4068610448155489187;  // e sqrt(pi / 2)

Field gausson_field(const Grid& g, double omega = 0.0, double x0 = 0.0, double v = 0.0,
                    double t = 0.0) {
  const double c[] = {x0}, w[] = {v};
  return sample([&](std::span<const double> x) { return eval_gausson(omega, c, w, 0.0, 1.0, t, x); },
                g);
}

Field gaussian_field(const GaussianParams& p, const GaussianState& s, const Grid& g) {
  const GaussianEvaluator ev(p, s);
  return sample([&](std::span<const double> x) { return ev(x); }, g);
}

GaussianParams wide_gaussian() {
  GaussianParams p;
  p.dim = 1;
  p.A_in = CMatrix::Constant(1, 1, cdouble(1.0, 0.0));
  p.x0 = RVector::Zero(1);
  p.v = RVector::Zero(1);
  p.lambda = 1.0;
  return p;
}

}  // namespace

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid(1, 10.0, 100), Error);
  EXPECT_THROW(Grid(4, 10.0, 64), Error);
  EXPECT_THROW(Grid(1, -1.0, 64), Error);
  const Grid g(2, 8.0, 16);
  EXPECT_EQ(g.size(), 256u);
  EXPECT_DOUBLE_EQ(g.node(0), -4.0);
  EXPECT_DOUBLE_EQ(g.wavenumber(15), -2.0 * std::numbers::pi / 8.0);
}

TEST(Grid, SampleRejectsNonFinite) {
  const Grid g(1, 8.0, 16);
  EXPECT_THROW(sample([](std::span<const double> x) { return cdouble(1.0 / x[0], 0.0); }, g), Error);
}

TEST(Fft, RoundTrip) {
  const Grid g(2, 10.0, 32);
  const Field f = sample([](std::span<const double> x) { return cdouble(std::exp(-x[0] * x[0]), x[1]); }, g);
  const auto& fft = Fft::for_grid(g);
  std::vector<cdouble> tmp(g.size()), back(g.size());
  fft.forward(f.values.data(), tmp.data());
  fft.backward(tmp.data(), back.data());
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(std::abs(back[i] / double(g.size()) - f.values[i]), 0.0, 1e-13);
}

TEST(Norms, GaussonMassOracle) {
  const Field G = gausson_field(Grid(1, 40.0, 512));
  EXPECT_NEAR(mass(G), kGaussonMass, 1e-12);
}

TEST(Norms, SpectralGradientOfGaussian) {
  const Grid g(1, 30.0, 256);
  const Field u = sample([](std::span<const double> x) { return cdouble(std::exp(-x[0] * x[0]), 0.0); }, g);
  const Field du = partial(u, 0);
  for_each_node(g, [&](std::size_t i, std::span<const double> x) {
    EXPECT_NEAR(du[i].real(), -2.0 * x[0] * std::exp(-x[0] * x[0]), 1e-12);
  });
}

TEST(Solver, GaussonStaysStationary) {
  const Grid g(1, 32.0, 256);
  SolverConfig c;
  c.dt = 1e-3;
  const Field u0 = gausson_field(g, 0.3);
  const auto tr = integrate(u0, 0.0, 1.0, c);
  const Field ex = gausson_field(g, 0.3, 0.0, 0.0, 1.0);
  EXPECT_LT(l2_distance(tr.back().second, ex) / std::sqrt(mass(ex)), 1e-5);
}

TEST(Solver, MovingGaussonMatchesClosedForm) {
  const Grid g(1, 40.0, 512);
  SolverConfig c;
  c.dt = 1e-3;
  const Field u0 = gausson_field(g, 0.0, -3.0, 2.0);
  const auto tr = integrate(u0, 0.0, 2.0, c);
  const Field ex = gausson_field(g, 0.0, -3.0, 2.0, 2.0);
  EXPECT_LT(l2_distance(tr.back().second, ex) / std::sqrt(mass(ex)), 1e-4);
}

TEST(Solver, ExactGaussianFlowAndMass) {
  const Grid g(1, 40.0, 512);
  const auto p = wide_gaussian();
  const std::vector<double> ts{0.0, 2.0};
  const auto st = evolve_matrix_ode(p.A_in, 1.0, ts);
  const Field u0 = gaussian_field(p, st[0], g);
  const Field ue = gaussian_field(p, st[1], g);
  SolverConfig c;
  c.dt = 1e-3;
  const auto tr = integrate(u0, 0.0, 2.0, c);
  EXPECT_LT(l2_distance(tr.back().second, ue) / std::sqrt(mass(ue)), 1e-4);
  EXPECT_LT(std::abs(mass(tr.back().second) - mass(u0)) / mass(u0), 1e-12);
}

TEST(Solver, StrangIsSecondOrder) {
  const Grid g(1, 40.0, 256);
  const auto p = wide_gaussian();
  const std::vector<double> ts{0.0, 1.0};
  const auto st = evolve_matrix_ode(p.A_in, 1.0, ts, 1e-12);
  const Field u0 = gaussian_field(p, st[0], g);
  const Field ue = gaussian_field(p, st[1], g);
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005}) {
    SolverConfig c;
    c.dt = dt;
    err.push_back(l2_distance(integrate(u0, 0.0, 1.0, c).back().second, ue));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.15);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.15);
}

TEST(Solver, LieIsFirstOrder) {
  const Grid g(1, 40.0, 256);
  const auto p = wide_gaussian();
  const std::vector<double> ts{0.0, 1.0};
  const auto st = evolve_matrix_ode(p.A_in, 1.0, ts, 1e-12);
  const Field u0 = gaussian_field(p, st[0], g);
  const Field ue = gaussian_field(p, st[1], g);
  std::vector<double> err;
  for (double dt : {0.01, 0.005}) {
    SolverConfig c;
    c.dt = dt;
    c.splitting = Splitting::Lie;
    err.push_back(l2_distance(integrate(u0, 0.0, 1.0, c).back().second, ue));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 1.0, 0.2);
}

TEST(Solver, TimeReversible) {
  const Grid g(1, 32.0, 256);
  SolverConfig c;
  c.dt = 1e-2;
  const Field u0 = gausson_field(g, 0.0, 1.0, -0.5);
  const Field u1 = integrate(u0, 0.0, 1.0, c).back().second;
  const Field back = integrate(u1, 1.0, 0.0, c).back().second;
  EXPECT_LT(l2_distance(back, u0), 1e-10);
}

TEST(Solver, ObserversIncludeEndpoints) {
  const Grid g(1, 32.0, 128);
  SolverConfig c;
  c.dt = 0.05;
  const auto tr = integrate(gausson_field(g), 0.0, 1.0, c, {0.0, 0.5});
  ASSERT_EQ(tr.size(), 3u);
  EXPECT_DOUBLE_EQ(tr[0].first, 0.0);
  EXPECT_DOUBLE_EQ(tr[1].first, 0.5);
  EXPECT_DOUBLE_EQ(tr[2].first, 1.0);
}

TEST(Solver, BoundaryLeakDetected) {
  const Grid g(1, 8.0, 128);
  SolverConfig c;
  c.dt = 1e-2;
  const Field u0 = gausson_field(g, 0.0, 2.5, 3.0);
  EXPECT_THROW(integrate(u0, 0.0, 2.0, c), Error);
}

TEST(Solver, GridMismatchDetected) {
  Solver s(Grid(1, 32.0, 128), SolverConfig{});
  Field u = gausson_field(Grid(1, 32.0, 256));
  EXPECT_THROW(s.step(u, 1e-3), Error);
}

TEST(Envelope, L2StabilityAndRigidity) {
  const Grid g(1, 40.0, 512);
  const Field u0 = gausson_field(g);
  const Field v0 = gausson_field(g, 0.02, 0.1, 0.05);
  SolverConfig c;
  c.dt = 1e-3;
  for (const auto& s : stability_envelope_check(u0, v0, c, 2.0, 10)) EXPECT_LE(s.ratio, 1.05);
  for (const auto& s : rigidity_lower_bound_check(u0, v0, c, 3.0, 10)) EXPECT_GE(s.ratio, 0.9);
}

TEST(Envelope, IdenticalDataRejected) {
  const Grid g(1, 32.0, 128);
  const Field u0 = gausson_field(g);
  EXPECT_THROW(rigidity_lower_bound_check(u0, u0, SolverConfig{}, 1.0), Error);
}
