#include <gtest/gtest.h>

#include <cmath>

#include <boltzmom/weak_form.hpp>

using namespace boltzmom;

namespace {

PolyGaussianDensity anisotropic_2d() {
  PolyGaussianDensity d(2);
  GaussTerm a{Polynomial(1.0), Vec{{0.4, -0.2, 0.0}}, 0.8};
  a.poly.add({1, 0, 0}, 0.3);
  a.poly.add({0, 2, 0}, 0.2);
  d.add_term(a);
  d.add_term(GaussTerm{Polynomial(0.6), Vec{{-0.5, 0.3, 0.0}}, 1.3});
  return d.scaled(1.0 / d.mass());
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST(WeakForm, CollisionInvariantsBalance3D) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(3));
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0, Vec{{0.3, 0.0, -0.2}});
  for (const auto& phi : {TestFunction::power(0.0), TestFunction::power(1.0),
                          TestFunction::coordinate(0), TestFunction::coordinate(2)}) {
    const auto gl = weak_gain_loss(M, M, phi, k);
    EXPECT_NEAR(gl.net(), 0.0, 1e-9 * (1.0 + std::abs(gl.loss))) << phi.name();
  }
}

TEST(WeakForm, CollisionInvariantsBalanceForDistinctDensities) {
  // Mass alone is conserved by Q(f,g) itself.
  const CollisionKernel k(0.5, singular_cross_section(0.5, 2));
  const auto f = anisotropic_2d();
  const auto g = PolyGaussianDensity::maxwellian(2, 0.7, Vec{{0.2, 0.1, 0.0}});
  const auto m = weak_gain_loss(f, g, TestFunction::power(0.0), k);
  EXPECT_NEAR(m.net(), 0.0, 1e-9 * m.loss);
  for (const auto& phi : {TestFunction::power(0.0), TestFunction::power(1.0),
                          TestFunction::coordinate(0), TestFunction::coordinate(1)}) {
    // Only Q(f,g) + Q(g,f) conserves momentum and energy.
    const auto fg = weak_gain_loss(f, g, phi, k);
    const auto gf = weak_gain_loss(g, f, phi, k);
    EXPECT_NEAR(fg.net() + gf.net(), 0.0, 1e-8 * (1.0 + std::abs(fg.loss))) << phi.name();
  }
}

TEST(WeakForm, MaxwellianIsEquilibriumForQuartic) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(3));
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0, Vec{{0.5, 0.0, 0.0}});
  const auto phi = TestFunction::power(2.0);
  const auto gl = weak_gain_loss(M, M, phi, k);
  EXPECT_NEAR(gl.net(), 0.0, 1e-8 * gl.loss);
  EXPECT_NEAR(weak_derivative_action(M, MultiIndex(), phi, k), 0.0, 1e-8 * gl.loss);
}

TEST(WeakForm, NonEquilibriumQuarticTwoPaths) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto f = anisotropic_2d();
  const auto phi = TestFunction::power(2.0);
  const auto gl = weak_gain_loss(f, f, phi, k);
  const double direct = weak_derivative_action(f, MultiIndex(), phi, k);
  EXPECT_LT(rel(direct, gl.net()), 1e-6);
}

TEST(WeakForm, LeibnizPathsAgree2D) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto f = anisotropic_2d();
  const auto phi = TestFunction::power(1.0);
  for (const auto& eta : {MultiIndex(1, 0), MultiIndex(0, 1), MultiIndex(1, 1)}) {
    const double a = weak_derivative_action(f, eta, phi, k);
    const double b = leibniz_action(f, eta, phi, k);
    const double c = ibp_action(f, eta, phi, k);
    const double scale = std::max({std::abs(a), std::abs(c), 1e-3});
    EXPECT_NEAR(a, b, 1e-6 * scale) << eta.str(2);
    EXPECT_NEAR(a, c, 1e-6 * scale) << eta.str(2);
  }
}

TEST(WeakForm, MassOfDerivativeVanishes) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto f = anisotropic_2d();
  for (const auto& eta : {MultiIndex(1, 0), MultiIndex(2, 0)})
    EXPECT_NEAR(weak_derivative_action(f, eta, TestFunction::power(0.0), k), 0.0, 1e-10);
}

TEST(SignedBound, ZeroOrderHolds) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto f = anisotropic_2d();
  for (double p : {1.0, 1.5, 2.0}) {
    const auto r = signed_bound_check(f, MultiIndex(), TestFunction::power(p), k);
    EXPECT_TRUE(r.passes()) << p << " margin " << r.margin;
    EXPECT_GE(r.margin, 0.0);
  }
}

TEST(SignedBound, FirstOrderHolds) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  const auto f = anisotropic_2d();
  const auto r = signed_bound_check(f, MultiIndex(1, 0), TestFunction::power(1.5), k);
  EXPECT_TRUE(r.passes()) << r.margin << " " << r.err_estimate;
  EXPECT_EQ(r.params["eta"], "1.0");
}

TEST(SignedBound, RejectsAnisotropicPhi) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(2));
  EXPECT_THROW(signed_bound_check(anisotropic_2d(), MultiIndex(), TestFunction::coordinate(0), k),
               InvalidInput);
}
