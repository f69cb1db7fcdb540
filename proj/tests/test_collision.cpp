#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boltzmom/collision.hpp>

using namespace boltzmom;

namespace {

Vec random_vec(std::mt19937_64& rng, int n, double s = 1.5) {
  std::normal_distribution<double> g(0.0, s);
  Vec v{};
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Polynomial norm4(int n) {
  // |xi|^4 as an explicit polynomial
  Polynomial p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Exponents e{0, 0, 0};
      e[i] += 2;
      e[j] += 2;
      p.add(e, 1.0);
    }
  return p;
}

}  // namespace

TEST(TestFunction, PowerAndRadial) {
  const auto phi = TestFunction::power(1.5);
  const Vec x{{1.0, 2.0, 2.0}};
  EXPECT_NEAR(phi(x), 27.0, 1e-12);
  EXPECT_NEAR(phi.radial(9.0), 27.0, 1e-12);
  EXPECT_TRUE(phi.isotropic());
  EXPECT_FALSE(TestFunction::coordinate(0).isotropic());
  EXPECT_THROW(TestFunction::power(-1.0), InvalidInput);
}

TEST(AOperator, MassIsInvariant) {
  std::mt19937_64 rng(1);
  for (int n : {2, 3})
    for (const auto& h : {hard_sphere_cross_section(n), singular_cross_section(0.5, n)}) {
      const Vec a = random_vec(rng, n), b = random_vec(rng, n);
      EXPECT_NEAR(a_plus(TestFunction::power(0.0), a, b, h), 2.0, 1e-9) << h.name << n;
      EXPECT_NEAR(a_op(TestFunction::power(0.0), a, b, h), 0.0, 1e-9);
    }
}

TEST(AOperator, EnergyIsInvariant) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3}) {
    const auto h = singular_cross_section(0.25, n);
    for (int t = 0; t < 20; ++t) {
      const Vec a = random_vec(rng, n), b = random_vec(rng, n);
      const double e = norm2(a) + norm2(b);
      EXPECT_NEAR(a_op(TestFunction::power(1.0), a, b, h), 0.0, 1e-9 * e);
    }
  }
}

TEST(AOperator, QuarticClosedForm) {
  // xi = e1, xi_* = e2: |xi'|^2 = 1 + cos(theta_V), so
  // A+[|xi|^4] = <(1+c)^2 + (1-c)^2> = 2 + 2/3 and A = 2/3.
  const auto h = hard_sphere_cross_section(3);
  const Vec a{{1.0, 0.0, 0.0}}, b{{0.0, 1.0, 0.0}};
  EXPECT_NEAR(a_plus(TestFunction::power(2.0), a, b, h), 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(a_op(TestFunction::power(2.0), a, b, h), 2.0 / 3.0, 1e-12);
}

TEST(AOperator, QuarticMonteCarlo) {
  const auto h = hard_sphere_cross_section(3);
  const Vec a{{1.0, 0.0, 0.0}}, b{{-1.0, 0.5, 0.3}};
  const double quad = a_plus(TestFunction::power(2.0), a, b, h);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int N = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    Vec sig{{g(rng), g(rng), g(rng)}};
    sig *= 1.0 / norm(sig);
    const auto [ap, bp] = post_collision(a, b, sig);
    const double v = std::pow(norm2(ap), 2) + std::pow(norm2(bp), 2);
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_NEAR(quad, mean, 5.0 * se);
}

TEST(AOperator, IsotropicPathMatchesGenericPath) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3}) {
    const auto h = polynomial_cross_section({1.0, 0.5, 1.0}, n);
    const auto rule_iso = build_sphere_rule(h, 24, 24);
    const auto phi_iso = TestFunction::power(2.0);
    const auto phi_poly = TestFunction::polynomial(norm4(n), "quartic");
    for (int t = 0; t < 10; ++t) {
      const Vec a = random_vec(rng, n), b = random_vec(rng, n);
      const double x = a_plus(phi_iso, a, b, rule_iso);
      const double y = a_plus(phi_poly, a, b, rule_iso);
      EXPECT_NEAR(x, y, 1e-10 * (1.0 + std::abs(x)));
    }
  }
}

TEST(AOperator, SignOfQuarticVaries) {
  const auto h = hard_sphere_cross_section(3);
  const auto phi = TestFunction::power(2.0);
  // Orthogonal equal speeds gain energy spread; a head-on pair loses it.
  EXPECT_GT(a_op(phi, Vec{{1, 0, 0}}, Vec{{0, 1, 0}}, h), 0.0);
  EXPECT_LT(a_op(phi, Vec{{2, 0, 0}}, Vec{}, h), 0.0);
}

TEST(SphereRule, WeightsSumToMass) {
  for (int n : {2, 3})
    for (const auto& h : {hard_sphere_cross_section(n), singular_cross_section(0.5, n)}) {
      const auto r = build_sphere_rule(h, 16, 8);
      double s = 0.0;
      for (double w : r.w) s += w * static_cast<double>(r.ca.size());
      EXPECT_NEAR(s, 1.0, 1e-10) << n << h.name;
    }
}
