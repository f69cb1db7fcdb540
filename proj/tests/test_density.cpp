#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boltzmom/density.hpp>
#include <boltzmom/multi_index.hpp>

using namespace boltzmom;

namespace {

PolyGaussianDensity random_density(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PolyGaussianDensity d(n);
  for (int t = 0; t < 2; ++t) {
    GaussTerm g;
    g.width = 0.5 + 0.5 * (u(rng) + 1.0);
    for (int i = 0; i < n; ++i) g.center[i] = 0.5 * u(rng);
    g.poly.add({0, 0, 0}, 1.0);
    g.poly.add({1, 0, 0}, 0.3 * u(rng));
    g.poly.add({0, 2, 0}, 0.2 * u(rng));
    if (n == 3) g.poly.add({1, 0, 1}, 0.1 * u(rng));
    d.add_term(g);
  }
  return d;
}

}  // namespace

TEST(Density, MaxwellianHasUnitMassAndEnergy) {
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0);
  EXPECT_NEAR(M.mass(), 1.0, 1e-14);
  EXPECT_NEAR(abs_moment(M, 0.0).value, 1.0, 1e-9);
  EXPECT_NEAR(abs_moment(M, 1.0).value, 3.0, 1e-8);
}

TEST(Density, MaxwellianMomentsMatchClosedForm) {
  // 2^p Gamma(p + n/2) / Gamma(n/2), T = 1
  for (int n : {2, 3}) {
    const auto M = PolyGaussianDensity::maxwellian(n, 1.0);
    for (double p : {0.5, 1.5, 2.0, 3.5, 6.0}) {
      const double exact = std::pow(2.0, p) * std::tgamma(p + 0.5 * n) / std::tgamma(0.5 * n);
      EXPECT_NEAR(abs_moment(M, p).value / exact, 1.0, 1e-8) << n << " " << p;
      EXPECT_NEAR(maxwellian_moment(n, 1.0, p) / exact, 1.0, 1e-13);
    }
  }
}

TEST(Density, DerivativeOfGaussian) {
  const auto W = PolyGaussianDensity::weight(3, 0.5);  // exp(-|xi|^2/2)
  const auto d = differentiate(W, MultiIndex::unit(0));
  for (const Vec& x : {Vec{{0.3, -0.2, 1.0}}, Vec{{-1.5, 0.0, 0.4}}})
    EXPECT_NEAR(d(x), -x[0] * std::exp(-0.5 * norm2(x)), 1e-15);
}

TEST(Density, ZeroOrderDerivativeIsIdentity) {
  std::mt19937_64 rng(1);
  const auto d = random_density(rng, 3);
  const auto e = differentiate(d, MultiIndex());
  const Vec x{{0.2, 0.4, -0.1}};
  EXPECT_DOUBLE_EQ(d(x), e(x));
}

TEST(Density, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n : {2, 3}) {
    const auto d = random_density(rng, n);
    for (int i = 0; i < n; ++i) {
      const auto di = differentiate(d, MultiIndex::unit(i));
      for (int s = 0; s < 20; ++s) {
        Vec x{};
        for (int k = 0; k < n; ++k) x[k] = u(rng);
        Vec xp = x, xm = x;
        xp[i] += 1e-5;
        xm[i] -= 1e-5;
        EXPECT_NEAR(di(x), (d(xp) - d(xm)) / 2e-5, 1e-8);
      }
    }
  }
}

TEST(Density, AbsMomentOfDerivative) {
  // int |d/dxi_1 M| = int |xi_1| e^{-xi_1^2/2} / sqrt(2 pi) = sqrt(2/pi)
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0);
  const auto d = differentiate(M, MultiIndex::unit(0));
  EXPECT_NEAR(abs_moment(d, 0.0).value, std::sqrt(2.0 / M_PI), 1e-8);
  EXPECT_NEAR(d.mass(), 0.0, 1e-14);
}

TEST(Density, FixedRuleAgreesWithShells) {
  // Positive mixture, so |d| = d is smooth and the Hermite rule is an oracle.
  PolyGaussianDensity d(3);
  d.add_term(GaussTerm{Polynomial(1.0), Vec{{0.3, -0.2, 0.1}}, 1.2});
  GaussTerm g{Polynomial(0.5), Vec{{-0.4, 0.0, 0.2}}, 0.9};
  g.poly.add({2, 0, 0}, 0.25);
  d.add_term(g);
  const auto rule = build_velocity_rule(3, 28, 1.4);
  for (double p : {0.0, 1.0, 2.0}) {
    const double a = abs_moment(d, p).value;
    const double b = abs_moment(d, p, rule).value;
    EXPECT_NEAR(a / b, 1.0, 1e-7) << p;
  }
}

TEST(Density, SignedIntegralMatchesShells) {
  std::mt19937_64 rng(9);
  const auto d = random_density(rng, 2);
  const auto rule = build_velocity_rule(2, 30, 1.5);
  EXPECT_NEAR(d.signed_integral({2, 0, 0}),
              rule.integrate([&](const Vec& x) { return d(x) * x[0] * x[0]; }), 1e-10);
}

TEST(TailRatio, ExactWeightGivesOne) {
  const auto W = PolyGaussianDensity::weight(3, 0.7);
  const auto t = tail_ratio_sup(W, 0.7, 0);
  EXPECT_NEAR(t.sup, 1.0, 1e-12);
  EXPECT_FALSE(t.divergent);
}

TEST(TailRatio, SlowerWeightDiverges) {
  const auto W = PolyGaussianDensity::weight(3, 0.5);
  EXPECT_TRUE(tail_ratio_sup(W, 0.8, 0).divergent);
}

TEST(TailRatio, LinearTimesGaussian) {
  // |xi_1| / sqrt(1 + |xi|^2) climbs to 1 along e_1: the grid sup is R/sqrt(1+R^2).
  const PolyGaussianDensity d(3, {GaussTerm{Polynomial::monomial({1, 0, 0}), Vec{}, 0.5}});
  const auto t = tail_ratio_sup(d, 1.0, 1);
  EXPECT_FALSE(t.divergent);
  EXPECT_GT(t.sup, 0.99);
  EXPECT_LE(t.sup, 1.0);
}

TEST(Density, RejectsBadWidth) {
  EXPECT_THROW(PolyGaussianDensity::maxwellian(3, -1.0), InvalidInput);
  EXPECT_THROW(PolyGaussianDensity(4), InvalidInput);
}
