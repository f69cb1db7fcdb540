#include <gtest/gtest.h>

#include <cmath>

#include <boltzmom/quadrature.hpp>

using namespace boltzmom;

TEST(JacobiRule, SingleNodeIsMidpoint) {
  const auto r = build_jacobi_rule(1, 0.0, 0.0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 2.0, 1e-14);
}

TEST(JacobiRule, LegendreIntegratesQuartic) {
  const auto r = build_jacobi_rule(5, 0.0, 0.0);
  EXPECT_NEAR(r.integrate([](double z) { return z * z * z * z; }), 0.4, 1e-14);
}

TEST(JacobiRule, ChebyshevMassIsPi) {
  const auto r = build_jacobi_rule(20, -0.5, -0.5);
  EXPECT_NEAR(r.integrate([](double) { return 1.0; }), M_PI, 1e-12);
}

TEST(JacobiRule, ExactUpToDegree) {
  // int z^k (1-z)^a (1+z)^b via z = 2t - 1 and Beta integrals.
  const double a = 0.3, b = -0.4;
  const auto r = build_jacobi_rule(6, a, b);
  for (int k = 0; k <= r.degree(); ++k) {
    double oracle = 0.0;
    for (int j = 0; j <= k; ++j)
      oracle += gen_binomial(k, j) * std::pow(2.0, j) * ((k - j) % 2 ? -1.0 : 1.0) *
                std::beta(b + j + 1.0, a + 1.0);
    oracle *= std::pow(2.0, a + b + 1.0);
    EXPECT_NEAR(r.integrate([&](double z) { return std::pow(z, k); }), oracle, 1e-10) << k;
  }
}

TEST(JacobiRule, LogScaleMultipliesWeights) {
  const auto r0 = build_jacobi_rule(8, 0.5, 1.5);
  const auto r1 = build_jacobi_rule(8, 0.5, 1.5, std::log(0.25));
  for (std::size_t i = 0; i < r0.size(); ++i) EXPECT_NEAR(r1.weights[i], 0.25 * r0.weights[i], 1e-15);
}

TEST(JacobiRule, RejectsBadInput) {
  EXPECT_THROW(build_jacobi_rule(0, 0.0, 0.0), InvalidInput);
  EXPECT_THROW(build_jacobi_rule(4, -1.0, 0.0), InvalidInput);
}

TEST(JacobiRule, SingularWeightMatchesBeta) {
  // int (1-z^2)^{-1/4} = B(1/2, 3/4)
  const double frozen = 2.3962804694711844;
  const auto r = build_jacobi_rule(10, -0.25, -0.25);
  EXPECT_NEAR(r.integrate([](double) { return 1.0; }), frozen, 1e-12);
  AdaptiveOptions o;
  o.abs_tol = 1e-11;
  o.max_intervals = 20000;
  const double adaptive =
      adaptive_integrate([](double z) { return std::pow(1 - z * z, -0.25); }, -1.0, 1.0, o).value;
  EXPECT_NEAR(adaptive, frozen, 1e-9);
}

TEST(VelocityRule, GaussianMass2D) {
  const auto r = build_velocity_rule(2, 8, 1.0);
  EXPECT_NEAR(r.integrate_weighted([](const Vec&) { return 1.0; }), M_PI, 1e-12);
}

TEST(VelocityRule, SecondMoment3D) {
  const auto r = build_velocity_rule(3, 6, 1.0);
  EXPECT_NEAR(r.integrate_weighted([](const Vec& x) { return norm2(x); }), 8.3524919952475618,
              1e-11);
}

TEST(VelocityRule, OddIntegrandVanishes) {
  const auto r = build_velocity_rule(2, 7, 1.3);
  EXPECT_NEAR(r.integrate_weighted([](const Vec& x) { return x[0]; }), 0.0, 1e-13);
}

TEST(VelocityRule, ScaledCenteredGaussian) {
  // int exp(-|x-c|^2/s^2) = (pi s^2)^{3/2}
  const Vec c{{0.5, -1.0, 2.0}};
  const auto r = build_velocity_rule(3, 10, 1.7, c);
  const double exact = std::pow(M_PI * 1.7 * 1.7, 1.5);
  const double got =
      r.integrate([&](const Vec& x) { return std::exp(-norm2(x - c) / (1.7 * 1.7)); });
  EXPECT_NEAR(got / exact, 1.0, 1e-12);
}

TEST(Adaptive, UnitInterval) {
  EXPECT_NEAR(adaptive_integrate([](double) { return 1.0; }, 0.0, 1.0, 1e-12).value, 1.0, 1e-14);
}

TEST(Adaptive, EndpointSingularity) {
  AdaptiveOptions o;
  o.abs_tol = 1e-10;
  const auto r = adaptive_integrate([](double z) { return 1.0 / std::sqrt(z); }, 0.0, 1.0, o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Adaptive, BudgetExhaustionThrows) {
  AdaptiveOptions o;
  o.abs_tol = 1e-14;
  o.max_intervals = 3;
  EXPECT_THROW(adaptive_integrate([](double z) { return std::sin(200 * z); }, 0.0, 10.0, o),
               ConvergenceError);
}

TEST(Composite, PanelsIntegrateSmoothFunction) {
  const auto r = composite_legendre(0.0, M_PI, 8, 6);
  EXPECT_NEAR(r.integrate([](double x) { return std::sin(x); }), 2.0, 1e-12);
}
