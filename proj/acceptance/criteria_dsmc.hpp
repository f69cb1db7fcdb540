#pragma once

#include <cmath>

#include <boltzmom/dsmc.hpp>
#include <boltzmom/dsmc_diagnostics.hpp>
#include <boltzmom/hierarchy.hpp>

#include "harness.hpp"

namespace acceptance {

using namespace boltzmom;

inline MomentTable at_time(const MomentTable& m, double t) {
  MomentTable out(m.n, m.alpha, m.b);
  for (const auto& [k, e] : m.entries())
    if (k.t == t) out.set(k.nu, k.p, e.m, 0.0);
  return out;
}

/// eta = 0, hard spheres, Maxwellian start: the pipeline envelope against
/// DSMC-measured z_p at 0.5, 1 and 2 mean free times.
inline Outcome bound_pipeline() {
  HierarchyParams hp;
  const auto M = PolyGaussianDensity::maxwellian(3, 1.0);
  ShellOptions so;
  so.p_max = hp.p_max + 1.0;
  const auto init = moment_table_from_density(M, {MultiIndex()}, hp.grid(), hp.alpha, hp.b_value(), so);
  const auto fit = fit_geometric_bound(init, MultiIndex(), hp.grid());
  hp.k = std::max(1.0, fit.K);
  hp.q = std::max(1.0, fit.Q);
  hp.w_norm = std::max(1.0, maxwellian_moment(3, 1.0, 1.0));
  const auto res = propagate_bounds(hp, &init);
  const bool finite = std::isfinite(res.K) && std::isfinite(res.Q) && std::isfinite(res.p0);

  auto e = init_from_density(M, CollisionKernel(1.0, hard_sphere_cross_section(3)), 100000, 8);
  const double tau = mean_free_time(e);
  std::vector<double> orders;
  for (double p = 1.5; p <= 8.0; p += 0.5) orders.push_back(p);
  const auto r = run(e, 2.0 * tau, orders, 0.5 * tau);
  double worst = -INFINITY;
  int checked = 0;
  for (double t : r.times) {
    const double tm = t / tau;
    if (std::abs(tm - 0.5) > 1e-9 && std::abs(tm - 1.0) > 1e-9 && std::abs(tm - 2.0) > 1e-9)
      continue;
    for (double p : orders) {
      const double g = std::tgamma(p + r.table.b);
      const double z = r.table.m(MultiIndex(), p, t) / g, se = r.error(p, t) / g;
      worst = std::max(worst, (z - 3.0 * se) / res.envelope(p));
      ++checked;
    }
  }
  return {finite && checked == 3 * static_cast<int>(orders.size()) && worst <= 1.0,
          cat("K=", res.K, " Q=", res.Q, " p0=", res.p0, "; max (z_p - 3se)/(K Q^p) = ", worst,
              " over ", checked, " checks")};
}

inline Outcome tail_order() {
  Outcome o{true, ""};
  for (double T : {0.5, 1.0, 2.0}) {
    MomentTable m(3, 1.0, 0.5);
    for (int k = 0; k <= 25; ++k) m.set(MultiIndex(), k, maxwellian_moment(3, T, k));
    const double r = tail_order_estimate(m, MultiIndex(), 2.0).r_bar;
    const double rel = std::abs(r * 2.0 * T - 1.0);
    o.pass = o.pass && rel <= 0.1;
    o.detail += cat("T=", T, " r=", r, " (", 0.5 / T, "); ");
  }
  // Two-temperature start: the slower tail (T = 2) sets the rate.
  PolyGaussianDensity f(3);
  f.add_term({Polynomial(0.5 / std::pow(2.0 * pi * 0.5, 1.5)), Vec{}, 0.5});
  f.add_term({Polynomial(0.5 / std::pow(2.0 * pi * 2.0, 1.5)), Vec{}, 2.0});
  auto e = init_from_density(f, CollisionKernel(1.0, hard_sphere_cross_section(3)), 100000, 11);
  const double tau = mean_free_time(e);
  std::vector<double> orders;
  for (int k = 0; k <= 12; ++k) orders.push_back(k);
  const auto run_ = run(e, 2.0 * tau, orders, 2.0 * tau);
  const double r0 = tail_order_estimate(at_time(run_.table, 0.0), MultiIndex(), 2.0, 12, 6).r_bar;
  const double r2 =
      tail_order_estimate(at_time(run_.table, run_.times.back()), MultiIndex(), 2.0, 12, 6).r_bar;
  const bool ok = std::isfinite(r0) && std::isfinite(r2) && r2 > 0.0 && r2 <= 2.0 * r0 &&
                  r2 >= 0.5 * r0;
  o.pass = o.pass && ok;
  o.detail += cat("DSMC r(0)=", r0, " r(2 mft)=", r2);
  return o;
}

inline Outcome dsmc_physics() {
  Outcome o{true, ""};
  for (double mu : {0.0, 0.5}) {
    const auto h = mu == 0.0 ? hard_sphere_cross_section(3) : singular_cross_section(mu, 3);
    auto e = init_from_density(PolyGaussianDensity::maxwellian(3, 1.0, Vec{{0.2, 0.0, 0.0}}),
                               CollisionKernel(mu == 0.0 ? 1.0 : 0.5, h), 100000, 21);
    const std::size_t N = e.size();
    std::vector<double> z;
    e.cosine_log = &z;
    const double tau = mean_free_time(e);
    const auto r = run(e, 2.0 * tau, {2.0, 3.0}, 0.5 * tau);
    e.cosine_log = nullptr;
    double worst = 0.0;
    for (double t : r.times)
      for (double p : {2.0, 3.0}) {
        const double d = std::abs(r.table.m(MultiIndex(), p, t) - r.table.m(MultiIndex(), p, 0.0));
        const double s = std::hypot(r.error(p, t), r.error(p, 0.0));
        worst = std::max(worst, d / s);
      }
    const auto chi = angular_chi_square(z, e.sampler);
    const bool ok = e.size() == N && r.energy_drift < 1e-10 && r.momentum_drift < 1e-12 &&
                    worst <= 3.0 && chi.p_value > 1e-3;
    o.pass = o.pass && ok;
    o.detail += cat(h.name, ": energy drift ", r.energy_drift, ", momentum drift ",
                    r.momentum_drift, ", max |dm|/sigma ", worst, ", chi2 p=", chi.p_value, "; ");
  }
  return o;
}

}  // namespace acceptance
