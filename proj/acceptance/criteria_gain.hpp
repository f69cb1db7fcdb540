#pragma once

#include <cmath>

#include <boltzmom/gain_loss.hpp>

#include "harness.hpp"

namespace acceptance {

using namespace boltzmom;

/// Centred isotropic g: c (1 + a |xi|^2) exp(-|xi|^2 / 2T).
inline PolyGaussianDensity isotropic_g(double c, double a, double T) {
  Polynomial p(c);
  for (int i = 0; i < 3; ++i) {
    Exponents e{0, 0, 0};
    e[static_cast<std::size_t>(i)] = 2;
    p.add(e, c * a);
  }
  return PolyGaussianDensity(3, {GaussTerm{p, Vec{}, T}});
}

inline Outcome gain_ratio_bound() {
  std::vector<PolyGaussianDensity> gs;
  for (int i = 0; i < 10; ++i)
    gs.push_back(isotropic_g(0.5 + 0.2 * i, i % 3 == 0 ? 0.0 : 0.1 * i, 0.3 + 0.065 * i));
  const std::vector<double> radii{0.5, 2, 5, 10, 15, 20};
  Outcome o{true, ""};
  for (double alpha : {1.0, 0.5}) {
    const CollisionKernel k(alpha, hard_sphere_cross_section(3));
    double k_emp = 0.0;
    int curves = 0, monotone = 0;
    for (const auto& g : gs)
      for (double r : {0.25, 0.5})
        for (int s : {0, 1, 2}) {
          const auto W = polynomial_weight(3, r, s);
          const double l1 = weighted_l1(g, r);
          std::vector<double> v(radii.size());
          parallel_for(radii.size(), default_threads(), [&](std::size_t i) {
            v[i] = gain_ratio(g, W, Vec{{radii[i], 0.0, 0.0}}, k) / l1;
          });
          bool mono = true;
          for (std::size_t i = 0; i < radii.size(); ++i) {
            k_emp = std::max(k_emp, v[i]);
            if (i > 0 && radii[i - 1] >= 10.0 && v[i] > v[i - 1] * (1.0 + 1e-9)) mono = false;
          }
          ++curves;
          monotone += mono;
        }
    o.pass = o.pass && std::isfinite(k_emp) && monotone == curves;
    o.detail += cat("alpha=", alpha, ": K_emp=", k_emp, ", ", monotone, "/", curves,
                    " curves non-increasing past 10; ");
  }
  return o;
}

inline Outcome loss_lower_bound() {
  std::vector<PolyGaussianDensity> ds;
  ds.push_back(PolyGaussianDensity::maxwellian(3, 1.0));
  ds.push_back(PolyGaussianDensity::maxwellian(3, 0.5, Vec{{1.0, 0.0, 0.0}}));
  ds.push_back(PolyGaussianDensity::maxwellian(2, 2.0, Vec{{0.5, 0.0, 0.0}}));
  PolyGaussianDensity two(2);
  two.add_term({Polynomial(0.5 / (2.0 * pi * 0.3)), Vec{{1.5, 0.0, 0.0}}, 0.3});
  two.add_term({Polynomial(0.5 / (2.0 * pi * 0.3)), Vec{{-1.5, 0.0, 0.0}}, 0.3});
  ds.push_back(two);
  ds.push_back(isotropic_g(1.0, 0.5, 0.8));
  Outcome o{true, ""};
  double worst_limit = 0.0;
  for (double alpha : {1.0, 0.5})
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& d = ds[i];
      const auto b = loss_lower_constant(d, alpha);
      // Probe across the mean: along it L/|xi|^alpha - m0 ~ alpha (xi.mean)/|xi|^2.
      Vec far{};
      far[1] = 50.0;
      const double lim = loss_L(d, far, alpha) / std::pow(50.0, alpha) / d.mass();
      worst_limit = std::max(worst_limit, std::abs(lim - 1.0));
      o.pass = o.pass && b.k_alpha > 0.0;
      o.detail += cat("k", i, "(", alpha, ")=", b.k_alpha, " ");
    }
  o.pass = o.pass && worst_limit <= 0.01;
  o.detail += cat("; worst |L/|xi|^alpha/m0 - 1| at 50: ", worst_limit);
  return o;
}

}  // namespace acceptance
