#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boltzmom/comparison.hpp>
#include <boltzmom/moments.hpp>

using namespace boltzmom;

namespace {

MomentTable maxwellian_table(int n, double T, const std::vector<double>& ps, double b = 0.5,
                             double t = 0.0) {
  MomentTable m(n, 1.0, b);
  for (double p : ps) m.set(MultiIndex(), p, maxwellian_moment(n, T, p), t);
  return m;
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> out;
  for (double p = a; p <= b + 1e-9; p += step) out.push_back(p);
  return out;
}

}  // namespace

TEST(MomentTable, NormalizationUsesGamma) {
  MomentTable m(3, 1.0, 0.25);
  m.set(MultiIndex(), 2.0, 6.0);
  EXPECT_NEAR(m.z(MultiIndex(), 2.0), 6.0 / std::tgamma(2.25), 1e-15);
  EXPECT_NEAR(denormalize(m.z(MultiIndex(), 2.0), 2.0, 0.25), 6.0, 1e-14);
  EXPECT_NEAR(normalize(m, 1.0).z(MultiIndex(), 2.0), 3.0, 1e-14);
}

TEST(MomentTable, MissingEntryNamesIndexAndOrder) {
  MomentTable m(2, 1.0, 0.5);
  m.set(MultiIndex(), 1.0, 2.0);
  try {
    m.m(MultiIndex(1, 0), 3.0);
    FAIL();
  } catch (const InvalidInput& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("p=3"), std::string::npos) << w;
    EXPECT_NE(w.find("nu="), std::string::npos) << w;
  }
  EXPECT_THROW(m.set(MultiIndex(), 1.0, -1.0), InvalidInput);
}

TEST(MomentTable, CsvRoundTripSkipsComments) {
  MomentTable m(3, 0.5, 0.375);
  m.set(MultiIndex(), 1.0, 3.0);
  m.set(MultiIndex(), 2.5, 17.25, 0.5);
  m.set(MultiIndex(1, 0, 0), 1.0, 0.125);
  const std::string text = "# generated\n" + m.to_csv();
  const auto r = MomentTable::from_csv(text, 3, 0.5);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r.b, 0.375);
  EXPECT_DOUBLE_EQ(r.m(MultiIndex(), 2.5, 0.5), 17.25);
  EXPECT_DOUBLE_EQ(r.m(MultiIndex(1, 0, 0), 1.0), 0.125);
  EXPECT_EQ(r.to_csv(), m.to_csv());
}

TEST(MomentTable, InterpolationIsFlaggedAndLogLinear) {
  MomentTable m(3, 1.0, 0.5);
  m.set(MultiIndex(), 1.0, 2.0);
  m.set(MultiIndex(), 3.0, 8.0);
  const auto direct = m.m_at(MultiIndex(), 1.0);
  EXPECT_FALSE(direct.interpolated);
  const auto mid = m.m_at(MultiIndex(), 2.0);
  EXPECT_TRUE(mid.interpolated);
  EXPECT_NEAR(mid.value, 4.0, 1e-14);
  EXPECT_THROW(m.m_at(MultiIndex(), 4.0), InvalidInput);
}

TEST(MomentTable, InterpolationBoundsTrueMoments) {
  // log m_p is convex in p, so the chord lies above.
  const auto m = maxwellian_table(3, 1.0, {1.0, 2.0, 4.0});
  for (double p : {1.3, 1.7, 2.5, 3.5})
    EXPECT_GE(m.m_at(MultiIndex(), p).value, maxwellian_moment(3, 1.0, p));
}

TEST(Moments, ProductSumStrictOmitsTop) {
  MomentTable m(2, 1.0, 0.5);
  const MultiIndex e(1, 0);
  m.set(MultiIndex(), 1.0, 2.0);
  m.set(MultiIndex(), 2.0, 5.0);
  m.set(e, 1.0, 0.5);
  m.set(e, 2.0, 0.75);
  // nu = 0: m_1 * m^e_2, nu = e: m^e_1 * m_2
  EXPECT_NEAR(product_sum(m, e, 1.0, 2.0, false).value, 2.0 * 0.75 + 0.5 * 5.0, 1e-14);
  EXPECT_NEAR(product_sum(m, e, 1.0, 2.0, true).value, 2.0 * 0.75, 1e-14);
  EXPECT_THROW(product_sum(m, e, 1.5, 2.0, false), InvalidInput);
  const ProductSumOptions interp{Scale::raw, true, 0.0};
  EXPECT_TRUE(product_sum(m, e, 1.5, 2.0, false, interp).interpolated);
}

TEST(Moments, SpAtPTwoHardSphere) {
  // k_2 = 1: S_2 = 2 (m_1 m_{3/2} + m_{3/2} m_1) for eta = 0.
  const auto m = maxwellian_table(3, 1.0, range(0.0, 4.0, 0.5));
  const double m1 = maxwellian_moment(3, 1.0, 1.0), m15 = maxwellian_moment(3, 1.0, 1.5);
  const auto s = s_p(m, MultiIndex(), 2.0, 1.0);
  EXPECT_FALSE(s.interpolated);
  EXPECT_NEAR(s.value, 4.0 * m1 * m15, 1e-10 * s.value);
  const auto z = z_cap(m, MultiIndex(), 2.0, 1.0);
  EXPECT_NEAR(z.value, m.z(MultiIndex(), 1.0) * m.z(MultiIndex(), 1.5), 1e-12);
}

TEST(Moments, GeometricFitRecoversExactSequence) {
  MomentTable m(3, 1.0, 0.5);
  const auto ps = range(1.0, 8.0, 1.0);
  for (double p : ps) m.set(MultiIndex(), p, 3.0 * std::pow(2.0, p) * std::tgamma(p + 0.5));
  const auto g = fit_geometric_bound(m, MultiIndex(), ps);
  EXPECT_NEAR(g.K, 3.0, 1e-10);
  EXPECT_NEAR(g.Q, 2.0, 1e-12);
  EXPECT_TRUE(g.geometric);
  for (double r : g.residuals) EXPECT_LE(r, 1e-12);
}

TEST(Moments, GeometricFitIsEnvelope) {
  const auto ps = range(1.0, 10.0, 1.0);
  const auto m = maxwellian_table(3, 1.0, ps, 1.0);
  const auto g = fit_geometric_bound(m, MultiIndex(), ps);
  for (double p : ps) EXPECT_LE(m.z(MultiIndex(), p), g.K * std::pow(g.Q, p) * (1 + 1e-12));
}

TEST(Moments, SuperGeometricGrowthIsFlagged) {
  MomentTable m(3, 1.0, 0.5);
  const auto ps = range(1.0, 8.0, 1.0);
  for (double p : ps) m.set(MultiIndex(), p, std::exp(p * p) * std::tgamma(p + 0.5));
  EXPECT_FALSE(fit_geometric_bound(m, MultiIndex(), ps).geometric);
}

TEST(Moments, MaxwellianTailRate) {
  // sum_k m_k r^k / k! converges for r < 1/(2T).
  for (double T : {0.5, 1.0, 2.0}) {
    const auto m = maxwellian_table(3, T, range(0.0, 25.0, 1.0));
    const auto e = tail_order_estimate(m, MultiIndex(), 2.0, 25, 10);
    EXPECT_NEAR(e.r_bar * 2.0 * T, 1.0, 0.1) << T;
  }
}

TEST(Moments, TailRateTakesWorstTime) {
  auto m = maxwellian_table(3, 1.0, range(0.0, 25.0, 1.0));
  for (double p : range(0.0, 25.0, 1.0)) m.set(MultiIndex(), p, maxwellian_moment(3, 2.0, p), 1.0);
  const auto e = tail_order_estimate(m, MultiIndex(), 2.0, 25, 10);
  EXPECT_NEAR(e.r_bar, 0.25, 0.025);
  EXPECT_DOUBLE_EQ(e.t_end, 1.0);
}

TEST(Comparison, ClosedFormExamples) {
  EXPECT_NEAR(comparison_bound(2.0, 16.0, 1.0, 1.0), std::sqrt(8.0), 1e-14);
  EXPECT_DOUBLE_EQ(comparison_bound(2.0, 16.0, 1.0, 5.0), 5.0);
  // 2 y^2 = 2 y + 4 has root y = 2.
  EXPECT_NEAR(affine_fixed_point(2.0, 4.0, 2.0, 1.0), 2.0, 1e-13);
  EXPECT_THROW(comparison_bound(0.0, 1.0, 1.0, 1.0), InvalidInput);
}

TEST(Comparison, BoundsRandomOdes) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng), d = u(rng) - 0.2, c = 0.1 * u(rng), y0 = 3.0 * u(rng);
    const double bound = comparison_bound_affine(a, b, d, c, y0);
    // time-dependent coefficients that stay within the constant ones
    const auto r = integrate_comparison_ode([&](double t) { return a * (1.0 + 0.5 * std::sin(t) * std::sin(t)); },
                                            [&](double t) { return b * std::exp(-t); },
                                            [&](double) { return d; }, c, y0, 20.0);
    EXPECT_LE(r.y_max, bound * (1.0 + 1e-8)) << i;
  }
}
