#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boltzmom/kernel.hpp>
#include <boltzmom/quadrature.hpp>

using namespace boltzmom;

namespace {

// omega_{n-2} int h(z) (1-z^2)^{(n-3)/2} dz in theta = acos z, where the
// weight becomes sin^{n-2}(theta); singular h are handled by the adaptive rule.
double mass_oracle(const AngularCrossSection& cs) {
  AdaptiveOptions o;
  o.abs_tol = 1e-11;
  o.max_intervals = 20000;
  auto f = [&](double th) { return cs.h(std::cos(th)) * std::pow(std::sin(th), cs.n - 2); };
  return sphere_area(cs.n - 2) * adaptive_integrate(f, 0.0, M_PI, o).value;
}

Vec random_vec(std::mt19937_64& rng, int n, double s = 2.0) {
  std::normal_distribution<double> g(0.0, s);
  Vec v{};
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Vec random_unit(std::mt19937_64& rng, int n) {
  Vec v = random_vec(rng, n, 1.0);
  return (1.0 / norm(v)) * v;
}

}  // namespace

TEST(CrossSection, HardSphere3DIsOneOverFourPi) {
  const auto cs = hard_sphere_cross_section(3);
  EXPECT_NEAR(cs.h(0.3), 1.0 / (4.0 * M_PI), 1e-14);
  EXPECT_NEAR(cs.h(-0.9), 1.0 / (4.0 * M_PI), 1e-14);
  // int_{-1}^{1} h dz = 1/(2 pi)
  EXPECT_NEAR(2.0 * cs.h(0.0), 1.0 / (2.0 * M_PI), 1e-14);
}

TEST(CrossSection, HardSphere2DHasUnitMass) {
  const auto cs = hard_sphere_cross_section(2);
  EXPECT_NEAR(mass_oracle(cs), 1.0, 1e-9);
  EXPECT_NEAR(cs.h(0.1), 1.0 / (2.0 * M_PI), 1e-13);
}

TEST(CrossSection, SingularHasUnitMassAndEnvelope) {
  const auto cs = singular_cross_section(0.5, 3);
  EXPECT_NEAR(mass_oracle(cs), 1.0, 1e-7);
  EXPECT_DOUBLE_EQ(cs.epsilon(), 1.5);
  for (double z : {-0.999, -0.5, 0.0, 0.7, 0.9999})
    EXPECT_LE(cs.h(z), cs.c_bound * std::pow(1 - z * z, -0.25) * (1 + 1e-12));
  EXPECT_GT(cs.h(0.99999), cs.h(0.9));
}

TEST(CrossSection, PolynomialIsAdmissible) {
  const auto cs = polynomial_cross_section({1.0, 0.0, 2.0}, 3);
  EXPECT_NEAR(mass_oracle(cs), 1.0, 1e-9);
  EXPECT_TRUE(audit_cross_section(cs).ok());
}

TEST(CrossSection, CatalogAuditsPass) {
  for (int n : {2, 3}) {
    EXPECT_TRUE(audit_cross_section(hard_sphere_cross_section(n)).ok()) << n;
    EXPECT_TRUE(audit_cross_section(singular_cross_section(0.25, n)).ok()) << n;
  }
  EXPECT_TRUE(audit_cross_section(singular_cross_section(1.0, 3)).ok());
}

TEST(CrossSection, RejectsNonIntegrableSingularity) {
  EXPECT_THROW(singular_cross_section(2.0, 3), InvalidInput);
  EXPECT_THROW(singular_cross_section(1.0, 2), InvalidInput);
  EXPECT_THROW(make_cross_section("nonsense", 3), InvalidInput);
}

TEST(CrossSection, SymmetrizedPartIsEven) {
  const auto cs = polynomial_cross_section({1.0, 0.8}, 3);
  for (double z : {0.1, 0.4, 0.95}) EXPECT_NEAR(cs.h_bar(z), cs.h_bar(-z), 1e-15);
}

TEST(Kernel, RejectsAlphaOutsideRange) {
  EXPECT_THROW(CollisionKernel(0.0, hard_sphere_cross_section(3)), InvalidInput);
  EXPECT_THROW(CollisionKernel(1.5, hard_sphere_cross_section(3)), InvalidInput);
}

TEST(Kernel, HardSphereValue) {
  const CollisionKernel k(1.0, hard_sphere_cross_section(3));
  const Vec a{{1.0, 0.0, 0.0}}, b{{-1.0, 0.0, 0.0}}, s{{0.0, 0.6, 0.8}};
  EXPECT_NEAR(kernel_eval(k, a, b, s), 1.0 / (2.0 * M_PI), 1e-14);
}

TEST(Kernel, SoftExponentValue) {
  const CollisionKernel k(0.5, hard_sphere_cross_section(3));
  const Vec a{{4.0, 0.0, 0.0}}, b{}, s{{0.0, 0.0, 1.0}};
  EXPECT_NEAR(kernel_eval(k, a, b, s), 2.0 / (4.0 * M_PI), 1e-14);
  EXPECT_EQ(kernel_eval(k, a, a, s), 0.0);
}

TEST(Kinematics, SigmaAlongUKeepsVelocities) {
  const Vec a{{1.0, 2.0, -0.5}}, b{{0.3, -1.0, 0.2}};
  const Vec u = a - b;
  const auto [ap, bp] = post_collision(a, b, (1.0 / norm(u)) * u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(ap[i], a[i], 1e-14);
    EXPECT_NEAR(bp[i], b[i], 1e-14);
  }
}

TEST(Kinematics, ConservesMomentumAndEnergy) {
  std::mt19937_64 rng(42);
  for (int n : {2, 3})
    for (int t = 0; t < 1000; ++t) {
      const Vec a = random_vec(rng, n), b = random_vec(rng, n), s = random_unit(rng, n);
      const auto [ap, bp] = post_collision(a, b, s);
      const Vec dm = (ap + bp) - (a + b);
      EXPECT_LE(norm(dm), 1e-14 * (1.0 + norm(a) + norm(b)));
      const double e0 = norm2(a) + norm2(b);
      EXPECT_NEAR(norm2(ap) + norm2(bp), e0, 1e-12 * e0);
    }
}

TEST(Kinematics, RejectsNonUnitSigma) {
  EXPECT_THROW(post_collision(Vec{{1, 0, 0}}, Vec{}, Vec{{0.5, 0, 0}}), InvalidInput);
}

TEST(Kinematics, OrthogonalFrameIsOrthonormal) {
  std::mt19937_64 rng(3);
  for (int n : {2, 3})
    for (int t = 0; t < 100; ++t) {
      const Vec a = random_unit(rng, n);
      const auto fr = orthogonal_frame(a, n);
      ASSERT_EQ(static_cast<int>(fr.size()), n - 1);
      for (std::size_t i = 0; i < fr.size(); ++i) {
        EXPECT_NEAR(dot(fr[i], a), 0.0, 1e-14);
        EXPECT_NEAR(norm(fr[i]), 1.0, 1e-14);
        for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(dot(fr[i], fr[j]), 0.0, 1e-14);
      }
    }
}
