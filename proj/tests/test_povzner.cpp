#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <boltzmom/povzner.hpp>

using namespace boltzmom;

namespace {

// gamma_p by tanh-sinh in z. The complement zc = distance to the nearest
// endpoint keeps 1 - z^2 accurate where the weight is singular.
double gamma_oracle(const AngularCrossSection& h, double p) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double z, double zc) {
    const double w = std::abs(zc) * (2.0 - std::abs(zc));
    return std::pow(0.5 * (1.0 + z), p) * h.regular_bar(z) *
           std::pow(w, 0.5 * (h.n - 3) - 0.5 * h.mu);
  };
  return sphere_area(h.n - 2) * ts.integrate(f, -1.0, 1.0, 1e-13);
}

}  // namespace

TEST(Gamma, HardSphereClosedForm) {
  const auto h = hard_sphere_cross_section(3);
  for (double p : {1.0, 1.5, 2.0, 3.0, 7.5, 40.0}) {
    EXPECT_NEAR(gamma_paper(h, p), 1.0 / (p + 1.0), 1e-13) << p;
    EXPECT_NEAR(gamma_sym(h, p), 2.0 / (p + 1.0), 1e-13) << p;
  }
  EXPECT_NEAR(gamma_sym(h, 2.0), 2.0 / 3.0, 1e-13);
}

TEST(Gamma, SymmetrizedIsOneAtPOne) {
  for (int n : {2, 3})
    for (const auto& h : {hard_sphere_cross_section(n), singular_cross_section(0.5, n),
                          polynomial_cross_section({1.0, 0.7}, n)})
      EXPECT_NEAR(gamma_sym(h, 1.0), 1.0, 1e-10) << h.name << n;
}

TEST(Gamma, SingularMatchesAngleOracle) {
  for (int n : {2, 3}) {
    const auto h = singular_cross_section(0.5, n);
    for (double p : {1.5, 3.0, 10.0})
      EXPECT_NEAR(gamma_paper(h, p) / gamma_oracle(h, p), 1.0, 1e-7) << n << " " << p;
  }
}

TEST(Gamma, TableDecreasesInsideUnitInterval) {
  const auto t = build_gamma_table(singular_cross_section(0.25, 3), {1.0, 1.5, 2.0, 4.0, 8.0, 16.0});
  EXPECT_TRUE(t.strictly_decreasing());
  EXPECT_TRUE(t.in_unit_interval());
  EXPECT_NEAR(t.sym(1.0), 1.0, 1e-10);
}

TEST(Gamma, AsymptoticSlopeIsHalfEpsilon) {
  for (const auto& h : {hard_sphere_cross_section(3), singular_cross_section(0.5, 3),
                        singular_cross_section(0.5, 2)}) {
    const auto f = gamma_asymptotic_fit(h, 100.0, 1e4, 8);
    EXPECT_NEAR(f.slope, -0.5 * h.epsilon(), 0.02) << h.name;
    EXPECT_GT(f.r2, 0.999);
  }
}

TEST(Gamma, AsymptoticFitNeedsFourPoints) {
  EXPECT_THROW(gamma_asymptotic_fit(hard_sphere_cross_section(3), 10.0, 100.0, 3),
               NumericalFailure);
  EXPECT_THROW(gamma_asymptotic_fit(hard_sphere_cross_section(3), 5.0, 100.0, 6), InvalidInput);
}

TEST(Gamma, BoundedCrossSectionBound) {
  for (const auto& h : {hard_sphere_cross_section(3), polynomial_cross_section({1.0, 0.5}, 3)})
    for (double p : {1.5, 2.0, 5.0, 50.0}) {
      const auto b = bounded_h_bound_check(h, p);
      EXPECT_TRUE(b.holds) << h.name << " " << p;
      EXPECT_GT(b.slack, 0.0);
    }
  EXPECT_THROW(bounded_h_bound_check(singular_cross_section(0.5, 3), 2.0), InvalidInput);
}

TEST(Povzner, ResultingVelocityZeroSeparatesConventions) {
  // With xi_* = 0 and hard spheres A = (gamma_sym - 1)|xi|^{2p}: the symmetrized
  // right side is attained with equality and the verbatim one is exceeded.
  const auto h = hard_sphere_cross_section(3);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = povzner_check(h, p, {{Vec{{1.2, 0.3, 0.0}}, Vec{}}});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(r[0].sym.passes()) << p << " " << r[0].sym.margin;
    EXPECT_FALSE(r[0].paper.passes()) << p << " " << r[0].paper.margin;
    EXPECT_NEAR(r[0].sym.margin, 0.0, 1e-7);
  }
}

TEST(Povzner, SymmetrizedHoldsOnRandomPairs) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.5);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int i = 0; i < 40; ++i)
    pairs.push_back({Vec{{g(rng), g(rng), g(rng)}}, Vec{{g(rng), g(rng), g(rng)}}});
  for (const auto& h : {hard_sphere_cross_section(3), singular_cross_section(0.5, 3)})
    for (double p : {1.5, 3.0})
      for (const auto& r : povzner_check(h, p, pairs))
        EXPECT_TRUE(r.sym.passes()) << h.name << " " << p << " " << r.sym.margin;
}

TEST(Sandwich, WorkedExample) {
  const auto s = binomial_sandwich_check(3.0, 2.0, 1.0);
  EXPECT_EQ(s.k_p, 2);
  EXPECT_NEAR(s.lower, 18.0, 1e-12);
  EXPECT_NEAR(s.mid, 18.0, 1e-12);
  EXPECT_NEAR(s.upper, 36.0, 1e-12);
  EXPECT_TRUE(s.holds());
}

TEST(Sandwich, HoldsOnGrid) {
  for (double p : {1.5, 2.0, 2.5, 4.0, 6.5})
    for (double x : {0.1, 1.0, 3.0})
      for (double y : {0.2, 1.0, 5.0}) EXPECT_TRUE(binomial_sandwich_check(p, x, y).holds()) << p;
  EXPECT_THROW(binomial_sandwich_check(1.0, 1.0, 1.0), InvalidInput);
}
