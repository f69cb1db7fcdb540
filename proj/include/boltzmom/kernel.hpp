#pragma once

// Collision kernel B(u, sigma) = |u|^alpha h(u_hat . sigma), admissible
// angular cross sections, and elastic post-collision kinematics.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"

namespace boltzmom {

using ScalarFn = std::function<double(double)>;

/// Normalized angular cross section h on (-1,1) in dimension n.
///
/// `regular` is h(z)(1-z^2)^{mu/2}, the part left after the singular factor
/// is folded into Jacobi exponents; it must be bounded (by `c_bound`) and is
/// what quadrature rules see.
struct AngularCrossSection {
  ScalarFn regular;
  double mu = 0.0;
  double c_bound = 0.0;
  int n = 3;
  double mass = 1.0;
  std::string name = "custom";

  double h(double z) const {
    const double w = 1.0 - z * z;
    if (mu == 0.0) return regular(z);
    return w > 0.0 ? regular(z) * std::pow(w, -0.5 * mu) : INFINITY;
  }
  double h_bar(double z) const { return 0.5 * (h(z) + h(-z)); }
  double regular_bar(double z) const { return 0.5 * (regular(z) + regular(-z)); }
  double epsilon() const { return n - 1.0 - mu; }
  /// Equal Jacobi exponents absorbing the sphere factor and the singularity.
  double jacobi_exponent() const { return 0.5 * (n - 3.0) - 0.5 * mu; }
  double omega() const { return sphere_area(n - 2); }

  /// omega_{n-2} * int fn(z) h(z) (1-z^2)^{(n-3)/2} dz by Gauss-Jacobi.
  template <class Fn>
  double angular_average(Fn&& fn, const LineRule& rule) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * regular(rule.nodes[i]) * fn(rule.nodes[i]);
    return omega() * s;
  }
  LineRule default_rule(int order = 64) const {
    const double a = jacobi_exponent();
    return build_jacobi_rule(order, a, a);
  }
};

/// Kernel parameters for variable hard potentials.
struct CollisionKernel {
  double alpha = 1.0;
  AngularCrossSection cross_section;
  int n = 3;

  CollisionKernel() = default;
  CollisionKernel(double a, AngularCrossSection cs) : alpha(a), cross_section(std::move(cs)) {
    require(alpha > 0.0 && alpha <= 1.0, "kernel exponent alpha must lie in (0,1]");
    n = cross_section.n;
  }
};

/// omega_{n-2} * int regular(z) (1-z^2)^{(n-3)/2 - mu/2} dz.
inline double cross_section_mass(const ScalarFn& regular, double mu, int n, int order = 64) {
  const double a = 0.5 * (n - 3.0) - 0.5 * mu;
  const LineRule rule = build_jacobi_rule(order, a, a);
  return sphere_area(n - 2) * rule.integrate(regular);
}

/// Rescales a raw cross section to unit mass. `regular_raw` is the raw
/// h(z)(1-z^2)^{mu/2}; pass mu = 0 for bounded cross sections.
inline AngularCrossSection normalize_cross_section(ScalarFn regular_raw, double mu, int n,
                                                   std::string name = "custom",
                                                   int order = 64) {
  check_dimension(n);
  require(mu < n - 1.0, "singularity exponent mu must satisfy mu < n-1");
  require(0.5 * (n - 3.0) - 0.5 * mu > -1.0, "cross-section weight not integrable");
  const double m = cross_section_mass(regular_raw, mu, n, order);
  if (!std::isfinite(m) || m <= 0.0)
    throw InvalidInput("cross section has zero or non-finite mass");
  AngularCrossSection cs;
  cs.mu = mu;
  cs.n = n;
  cs.name = std::move(name);
  cs.regular = [f = std::move(regular_raw), m](double z) { return f(z) / m; };
  double sup = 0.0;
  const int grid = 10000;
  for (int i = 1; i < grid; ++i) {
    const double z = -1.0 + 2.0 * i / grid;
    sup = std::max(sup, std::abs(cs.regular(z)));
  }
  sup = std::max({sup, std::abs(cs.regular(-1.0 + 1e-12)), std::abs(cs.regular(1.0 - 1e-12))});
  cs.c_bound = sup * (1.0 + 1e-12);
  cs.mass = cross_section_mass(cs.regular, mu, n, order);
  return cs;
}

/// Constant cross section (hard spheres when alpha = 1).
inline AngularCrossSection hard_sphere_cross_section(int n = 3) {
  return normalize_cross_section([](double) { return 1.0; }, 0.0, n, "hard_sphere");
}

/// h proportional to (1-z^2)^{-mu/2}.
inline AngularCrossSection singular_cross_section(double mu, int n = 3) {
  require(mu >= 0.0, "singular family needs mu >= 0");
  return normalize_cross_section([](double) { return 1.0; }, mu, n,
                                 "singular_mu" + std::to_string(mu));
}

/// h(z) proportional to sum_k coeffs[k] z^k (bounded, mu = 0).
inline AngularCrossSection polynomial_cross_section(std::vector<double> coeffs, int n = 3) {
  require(!coeffs.empty(), "polynomial cross section needs at least one coefficient");
  auto f = [c = std::move(coeffs)](double z) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
    return s;
  };
  return normalize_cross_section(f, 0.0, n, "polynomial");
}

/// Catalog lookup: "hard_sphere", "singular" (param mu), "polynomial" (coeffs).
inline AngularCrossSection make_cross_section(const std::string& name, int n, double mu = 0.0,
                                              const std::vector<double>& coeffs = {}) {
  if (name == "hard_sphere") return hard_sphere_cross_section(n);
  if (name == "singular") return singular_cross_section(mu, n);
  if (name == "polynomial") return polynomial_cross_section(coeffs, n);
  throw InvalidInput("unknown cross section '" + name + "'");
}

/// Outcome of the grid audit of the five cross-section invariants.
struct AdmissibilityReport {
  bool nonnegative = true;
  bool symmetric_part_monotone = true;
  bool envelope_bounded = true;
  bool cutoff_exponent = true;
  bool unit_mass = true;
  double mass = 0.0;
  bool ok() const {
    return nonnegative && symmetric_part_monotone && envelope_bounded && cutoff_exponent &&
           unit_mass;
  }
};

inline AdmissibilityReport audit_cross_section(const AngularCrossSection& cs,
                                               int grid = 10000) {
  AdmissibilityReport rep;
  for (int i = 1; i < grid; ++i) {
    const double z = -1.0 + 2.0 * i / grid;
    const double r = cs.regular(z);
    if (!(r >= 0.0)) rep.nonnegative = false;
    if (r > cs.c_bound) rep.envelope_bounded = false;
  }
  double prev = -INFINITY;
  for (int i = 0; i < grid; ++i) {
    const double z = (i + 0.5) / grid;
    const double s = cs.h(z) + cs.h(-z);
    if (s < prev * (1.0 - 1e-12)) rep.symmetric_part_monotone = false;
    prev = s;
  }
  rep.cutoff_exponent = cs.epsilon() > 0.0;
  rep.mass = cross_section_mass(cs.regular, cs.mu, cs.n);
  rep.unit_mass = std::abs(rep.mass - 1.0) <= 1e-10;
  return rep;
}

/// Elastic collision in the sigma-representation.
inline std::pair<Vec, Vec> post_collision(const Vec& xi, const Vec& xi_star, const Vec& sigma) {
  if (std::abs(norm2(sigma) - 1.0) > 2e-12) throw InvalidInput("sigma must be a unit vector");
  const Vec u = xi - xi_star;
  const Vec delta = 0.5 * (norm(u) * sigma - u);
  return {xi + delta, xi_star - delta};
}

/// |u|^alpha h(u_hat . sigma); zero when the velocities coincide.
inline double kernel_eval(const CollisionKernel& k, const Vec& xi, const Vec& xi_star,
                          const Vec& sigma) {
  const Vec u = xi - xi_star;
  const double r = norm(u);
  if (r == 0.0) return 0.0;
  const double z = std::clamp(dot(u, sigma) / r, -1.0, 1.0);
  return std::pow(r, k.alpha) * k.cross_section.h(z);
}

/// Orthonormal vectors spanning the complement of unit vector `axis`.
/// In 2D one vector is returned, in 3D two.
inline std::vector<Vec> orthogonal_frame(const Vec& axis, int n) {
  if (n == 2) return {Vec{{-axis[1], axis[0], 0.0}}};
  Vec t = std::abs(axis[0]) < 0.9 ? Vec{{1.0, 0.0, 0.0}} : Vec{{0.0, 1.0, 0.0}};
  t -= dot(t, axis) * axis;
  t *= 1.0 / norm(t);
  const Vec s{{axis[1] * t[2] - axis[2] * t[1], axis[2] * t[0] - axis[0] * t[2],
               axis[0] * t[1] - axis[1] * t[0]}};
  return {t, s};
}

}  // namespace boltzmom
