#include <gtest/gtest.h>

#include <cmath>

#include <boltzmom/gain_loss.hpp>

using namespace boltzmom;

TEST(Loss, MaxwellianAtOrigin) {
  // E|xi| for a standard 3D Gaussian is sqrt(8/pi).
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0);
  EXPECT_NEAR(loss_L(M, Vec{}, 1.0), std::sqrt(8.0 / M_PI), 1e-9);
}

TEST(Loss, LargeSpeedLimitIsMass) {
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0, Vec{{0.3, 0.0, 0.0}});
  const double L = loss_L(M, Vec{{0.0, 50.0, 0.0}}, 1.0);
  EXPECT_NEAR(L / 50.0, 1.0, 2e-3);
}

TEST(Loss, SoftExponentOrigin2D) {
  // E|xi|^{1/2} for a standard 2D Gaussian: 2^{1/4} Gamma(5/4).
  const auto M = PolyGaussianDensity::maxwellian(2, 1.0);
  EXPECT_NEAR(loss_L(M, Vec{}, 0.5), std::pow(2.0, 0.25) * std::tgamma(1.25), 1e-9);
}

TEST(Loss, LowerConstantScalesWithMass) {
  const auto M = PolyGaussianDensity::maxwellian(2, 1.0);
  const auto a = loss_lower_constant(M, 1.0);
  const auto b = loss_lower_constant(M.scaled(2.5), 1.0);
  EXPECT_NEAR(a.k_alpha, 1.0, 1e-6);
  EXPECT_NEAR(b.k_alpha / a.k_alpha, 2.5, 1e-9);
}

TEST(Loss, TwoBumpConstantIsPositive) {
  PolyGaussianDensity d(2);
  d.add_term(GaussTerm{Polynomial(0.5 / (2.0 * M_PI * 0.3)), Vec{{1.5, 0.0, 0.0}}, 0.3});
  d.add_term(GaussTerm{Polynomial(0.5 / (2.0 * M_PI * 0.3)), Vec{{-1.5, 0.0, 0.0}}, 0.3});
  const auto b = loss_lower_constant(d, 1.0);
  EXPECT_GT(b.k_alpha, 0.0);
  EXPECT_LE(b.k_alpha, b.mass + 1e-12);
}

TEST(Gain, MaxwellianEquilibriumIdentity) {
  // Q+(M, M) = M L(M) when W = M.
  const CollisionKernel k(1.0, hard_sphere_cross_section(3));
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0);
  for (double x : {0.0, 0.7, 2.5}) {
    const Vec xi{{x, 0.0, 0.0}};
    EXPECT_NEAR(gain_ratio(M, M, xi, k) / loss_L(M, xi, 1.0), 1.0, 1e-6) << x;
  }
}

TEST(Gain, PointwiseIsRatioTimesWeight) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto M = PolyGaussianDensity::maxwellian(2, 1.0);
  const auto W = polynomial_weight(2, 0.5, 1);
  const Vec xi{{1.0, 0.5, 0.0}};
  EXPECT_NEAR(gain_pointwise(M, W, xi, k), gain_ratio(M, W, xi, k) * W(xi), 1e-14);
}

TEST(Gain, WeightedNormClosedForm) {
  // ||M_T / M_r||_1 = (1 - 2 r T)^{-n/2}
  const auto M = PolyGaussianDensity::maxwellian(3, 0.5);
  EXPECT_NEAR(weighted_l1(M, 0.5), std::pow(1.0 - 0.5, -1.5), 1e-12);
  EXPECT_THROW(weighted_l1(PolyGaussianDensity::maxwellian(3, 2.0), 0.5), InvalidInput);
}
