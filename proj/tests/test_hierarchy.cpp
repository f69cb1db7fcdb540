#include <gtest/gtest.h>

#include <cmath>

#include <boltzmom/hierarchy.hpp>

using namespace boltzmom;

namespace {

HierarchyParams hard_sphere_params() {
  HierarchyParams hp;
  hp.k = 4.04;
  hp.q = 2.23;
  hp.w_norm = 3.0;
  return hp;
}

MomentTable maxwellian_z(const HierarchyParams& hp) {
  MomentTable m(3, hp.alpha, hp.b_value());
  for (double p : hp.grid()) m.set(MultiIndex(), p, maxwellian_moment(3, 1.0, p));
  return m;
}

}  // namespace

TEST(Hierarchy, AStarWorkedExample) {
  // p = 2, hard spheres, b = 1/2: (1 - 1/3) k_alpha Gamma(2.5)^{1/4}.
  HierarchyParams hp;
  hp.k_alpha = 0.8;
  EXPECT_DOUBLE_EQ(hp.b_value(), 0.5);
  EXPECT_NEAR(a_star(hp, 2.0, 1.0 / 3.0), (2.0 / 3.0) * 0.8 * std::pow(std::tgamma(2.5), 0.25),
              1e-14);
}

TEST(Hierarchy, RejectsThresholdBreakingB) {
  HierarchyParams hp;
  hp.b = 1.0;  // epsilon / 2 for hard spheres
  EXPECT_THROW(hp.validate(), InvalidInput);
  hp.b = 0.99;
  EXPECT_NO_THROW(hp.validate());
}

TEST(Hierarchy, GridStartsAtThreeHalves) {
  HierarchyParams hp;
  hp.p_max = 4.0;
  const std::vector<double> want{1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  EXPECT_EQ(hp.grid(), want);
}

TEST(Hierarchy, ZeroOrderPipelineIsFinite) {
  const auto hp = hard_sphere_params();
  const auto init = maxwellian_z(hp);
  const auto r = propagate_bounds(hp, &init);
  EXPECT_TRUE(std::isfinite(r.K));
  EXPECT_GE(r.K, std::max(1.0, hp.k));
  EXPECT_GE(r.Q, hp.q);
  EXPECT_TRUE(std::isfinite(r.p0));
  const auto& lv = r.level(MultiIndex());
  EXPECT_TRUE(lv.tail_contracts);
  for (const auto& [p, lb] : lv.log_bound) EXPECT_LE(lb, lv.log_envelope(p) + 1e-9) << p;
}

TEST(Hierarchy, InitialDatumAboveHypothesisIsRejected) {
  auto hp = hard_sphere_params();
  hp.k = 1.0;
  hp.q = 1.0;
  const auto init = maxwellian_z(hp);
  EXPECT_THROW(propagate_bounds(hp, &init), InvalidInput);
}

TEST(Hierarchy, CoefficientsArePositive) {
  const auto hp = hard_sphere_params();
  const auto co = assemble_coefficients(3.0, hp, MultiIndex(), gamma_paper(hp.cross_section, 3.0),
                                        [&](const MultiIndex&, double q) { return hp.k * std::pow(hp.q, q); });
  EXPECT_GT(co.a_star, 0.0);
  EXPECT_GT(co.b_star, 0.0);
  EXPECT_NEAR(co.c, 1.0 / 6.0, 1e-14);
  EXPECT_TRUE(co.provenance.contains("gamma_p"));
}

TEST(Hierarchy, TruncatedSystemStaysUnderEnvelope) {
  auto hp = hard_sphere_params();
  hp.p_max = 8.0;
  const auto init = maxwellian_z(hp);
  const auto bounds = propagate_bounds(hp, &init);
  const auto run = integrate_truncated_hierarchy(hp, bounds, &init, 1.0, {0.5});
  ASSERT_TRUE(run.completed);
  EXPECT_EQ(run.table.times().size(), 3u);
  for (const auto& [key, e] : run.table.entries())
    EXPECT_LE(e.z, bounds.envelope(key.p)) << key.p << " t=" << key.t;
}
