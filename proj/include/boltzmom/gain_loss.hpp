#pragma once

// Pointwise gain Q+(g, W)(xi) against Maxwellian-type weights, the loss
// convolution L(g) and its lower-bound constant.

#include <algorithm>
#include <cmath>
#include <vector>

#include "collision.hpp"
#include "density.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"

namespace boltzmom {

/// Splits W = P(xi) exp(-r |xi|^2); W must be a single term centred at 0.
struct MaxwellianWeight {
  Polynomial poly;
  double r = 0.0;

  explicit MaxwellianWeight(const PolyGaussianDensity& w) {
    require(w.terms().size() == 1, "weight must be a single polynomial x Gaussian term");
    const auto& t = w.terms()[0];
    require(norm(t.center) == 0.0, "weight must be centred at the origin");
    poly = t.poly;
    r = 0.5 / t.width;
  }
};

/// (1 + |xi|^2)^s M_r as a density-family member (integer s).
inline PolyGaussianDensity polynomial_weight(int n, double r, int s) {
  require(s >= 0, "weight power must be nonnegative");
  Polynomial base(1.0);
  for (int i = 0; i < n; ++i) {
    Exponents e{0, 0, 0};
    e[static_cast<std::size_t>(i)] = 2;
    base.add(e, 1.0);
  }
  Polynomial p(1.0);
  for (int k = 0; k < s; ++k) p = p * base;
  return PolyGaussianDensity(n, {GaussTerm{p, Vec{}, 0.5 / r}});
}

/// d(xi) exp(r |xi|^2) as an exact family member; every term must be
/// narrower than the weight.
inline PolyGaussianDensity reweighted(const PolyGaussianDensity& d, double r) {
  PolyGaussianDensity out(d.dimension());
  for (const auto& t : d.terms()) {
    const double a = 0.5 / t.width - r;
    require(a > 0.0, "density does not decay faster than the weight exp(-r|xi|^2)");
    const double T2 = 0.5 / a;
    const Vec m2 = (T2 / t.width) * t.center;
    const double c = std::exp(0.5 * norm2(t.center) / t.width * (T2 / t.width - 1.0));
    out.add_term({t.poly.scaled(c), m2, T2});
  }
  return out;
}

/// ||g / M_r||_{L^1} in closed form (g >= 0 assumed).
inline double weighted_l1(const PolyGaussianDensity& g, double r) {
  return reweighted(g, r).mass();
}

struct GainOptions {
  int xi_star_order = 10;
  double rel_tol = 1e-7;
  /// Below this value of sqrt(r)|xi| the |u|^alpha kink at xi_* = xi sits
  /// inside the Gaussian bulk and a rule centred at xi is used instead.
  double kink_radius = 4.0;
  PairOptions kink_rule{.v_order = 1, .radial_panels = 4, .radial_order = 8, .polar = 10,
                        .azimuth = 20};
  /// Use the rotational symmetry about the xi axis when g and W have it.
  bool use_symmetry = true;
};

namespace detail {

// int_{S^{n-1}} F(sigma) d sigma with F peaked around the unit vector c;
// theta_c is the angular width of the peak.
template <class Fn>
double peaked_sphere_integral(int n, const Vec& c, double theta_c, Fn&& F, double tol) {
  AdaptiveOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = tol;
  o.max_intervals = 400;
  o.throw_on_failure = false;
  const auto frame = orthogonal_frame(c, n);
  std::vector<double> cuts{0.0};
  for (double t = theta_c; t < pi; t *= 3.0) cuts.push_back(t);
  cuts.push_back(pi);
  double total = 0.0;
  if (n == 2) {
    for (double side : {1.0, -1.0})
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += adaptive_integrate(
                     [&](double th) {
                       return F(std::cos(th) * c + (side * std::sin(th)) * frame[0]);
                     },
                     cuts[i], cuts[i + 1], o)
                     .value;
    return total;
  }
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adaptive_integrate(
                 [&](double th) {
                   const double ct = std::cos(th), st = std::sin(th);
                   auto inner = adaptive_integrate(
                       [&](double ph) {
                         const Vec s = ct * c + (st * std::cos(ph)) * frame[0] +
                                       (st * std::sin(ph)) * frame[1];
                         return F(s);
                       },
                       0.0, 2.0 * pi, o);
                   return st * inner.value;
                 },
                 cuts[i], cuts[i + 1], o)
                 .value;
  return total;
}

}  // namespace detail

namespace detail {

struct StarNode {
  Vec xi_star;
  double weight;  // includes M_r(xi_*) and |u|^alpha
};

inline bool symmetric_about(const PolyGaussianDensity& g, const Polynomial& p, const Vec& axis) {
  for (const auto& t : g.terms())
    if (norm(t.center) != 0.0 || t.poly.degree() != 0) return false;
  if (g.dimension() != 3) return false;
  const auto frame = orthogonal_frame(axis, 3);
  for (double a : {0.3, -1.1})
    for (double rho : {0.7, 1.9}) {
      const double ref = p.eval(a * axis + rho * frame[0]);
      for (double psi : {1.0, 2.5, 4.0}) {
        const Vec x = a * axis + (rho * std::cos(psi)) * frame[0] + (rho * std::sin(psi)) * frame[1];
        if (std::abs(p.eval(x) - ref) > 1e-12 * (1.0 + std::abs(ref))) return false;
      }
    }
  return true;
}

inline std::vector<StarNode> star_nodes(int n, const Vec& xi, double r, double alpha,
                                        bool symmetric, const GainOptions& opt) {
  std::vector<StarNode> out;
  if (std::sqrt(r) * norm(xi) < opt.kink_radius) {
    const double cutoff = norm(xi) + (std::sqrt(n + alpha + 4.0) + 6.5) / std::sqrt(r);
    PairOptions ko = opt.kink_rule;
    // With rotational symmetry about xi the azimuth of u around xi is idle.
    if (symmetric) ko.azimuth = 1;
    const PairRule pr = build_pair_rule(n, alpha, Vec{}, 0.0, 1.0, cutoff, ko);
    Vec axis{{0.0, 0.0, 1.0}}, e1{{1.0, 0.0, 0.0}}, e2{{0.0, 1.0, 0.0}};
    if (symmetric) {
      axis = (1.0 / norm(xi)) * xi;
      const auto fr = orthogonal_frame(axis, 3);
      e1 = fr[0];
      e2 = fr[1];
    }
    for (std::size_t j = 0; j < pr.u_nodes.size(); ++j) {
      const Vec& v = pr.u_nodes[j];
      const Vec u = n == 3 ? v[2] * axis + v[0] * e1 + v[1] * e2 : v;
      const Vec xs = xi - u;
      out.push_back({xs, pr.u_weights[j] * std::exp(-r * norm2(xs))});
    }
    return out;
  }
  if (symmetric) {
    // xi_* = a xi_hat + rho e1; the transverse angle integrates to 2 pi.
    const Vec axis = (1.0 / norm(xi)) * xi;
    const Vec e1 = orthogonal_frame(axis, 3)[0];
    std::vector<double> ha, hw, la, lw;
    hermite_rule(opt.xi_star_order, ha, hw);
    std::vector<double> diag(static_cast<std::size_t>(opt.xi_star_order)),
        off(diag.size() - 1);
    for (std::size_t k = 0; k < diag.size(); ++k) diag[k] = 2.0 * k + 1.0;
    for (std::size_t k = 1; k < diag.size(); ++k) off[k - 1] = double(k) * double(k);
    golub_welsch(diag, off, 0.0, la, lw);  // Laguerre, weight e^{-t}
    const double s = 1.0 / std::sqrt(r);
    for (std::size_t i = 0; i < ha.size(); ++i)
      for (std::size_t j = 0; j < la.size(); ++j) {
        const Vec xs = (s * ha[i]) * axis + std::sqrt(la[j] / r) * e1;
        const double w = s * hw[i] * lw[j] / (2.0 * r) * 2.0 * pi;
        out.push_back({xs, w * std::pow(norm(xi - xs), alpha)});
      }
    return out;
  }
  const VelocityRule rule = build_velocity_rule(n, opt.xi_star_order, 1.0 / std::sqrt(r));
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    out.push_back({rule.nodes[j], rule.weights[j] * std::pow(norm(xi - rule.nodes[j]), alpha)});
  return out;
}

}  // namespace detail

/// Q+(g, W)(xi) / W(xi) for W = P exp(-r|xi|^2). With
/// M_r(xi') M_r(xi'_*) = M_r(xi) M_r(xi_*) the ratio is
///   int M_r(xi_*) int (g/M_r)(xi') P(xi'_*)/P(xi) B d sigma d xi_*,
/// computed without forming either Gaussian on its own.
inline double gain_ratio(const PolyGaussianDensity& g, const PolyGaussianDensity& weight,
                         const Vec& xi, const CollisionKernel& k, const GainOptions& opt = {}) {
  const int n = g.dimension();
  require(weight.dimension() == n, "density dimensions differ");
  const MaxwellianWeight W(weight);
  for (const auto& t : g.terms())
    require(0.5 / t.width >= W.r, "g must not decay slower than the weight");
  const double p_xi = W.poly.eval(xi);
  require(p_xi > 0.0, "weight polynomial must be positive");
  const bool sym = opt.use_symmetry && norm(xi) > 0.0 &&
                   detail::symmetric_about(g, W.poly, (1.0 / norm(xi)) * xi);
  const auto nodes = detail::star_nodes(n, xi, W.r, k.alpha, sym, opt);
  const auto& h = k.cross_section;
  double total = 0.0;
  for (const auto& node : nodes) {
    const Vec u = xi - node.xi_star;
    const double ru = norm(u);
    if (ru == 0.0 || node.weight == 0.0) continue;
    const Vec V = 0.5 * (xi + node.xi_star);
    const Vec uh = (1.0 / ru) * u;
    double s = 0.0;
    for (const auto& term : g.terms()) {
      const PolyGaussianDensity one(n, {term});
      const Vec toward = term.center - V;
      const double dist = norm(toward);
      const Vec c = dist > 0.0 ? (1.0 / dist) * toward : uh;
      const double theta_c = std::min(pi, 2.0 * std::sqrt(term.width) / (0.5 * ru));
      s += detail::peaked_sphere_integral(
          n, c, theta_c,
          [&](const Vec& sigma) {
            const Vec d = (0.5 * ru) * sigma;
            const double z = std::clamp(dot(uh, sigma), -1.0, 1.0);
            return one.eval_reweighted(V + d, W.r) * W.poly.eval(V - d) * h.h(z);
          },
          opt.rel_tol);
    }
    total += node.weight * s;
  }
  return total / p_xi;
}

/// Q+(g, W)(xi) = gain_ratio * W(xi).
inline double gain_pointwise(const PolyGaussianDensity& g, const PolyGaussianDensity& weight,
                             const Vec& xi, const CollisionKernel& k,
                             const GainOptions& opt = {}) {
  return gain_ratio(g, weight, xi, k, opt) * weight(xi);
}

struct LossOptions {
  double rel_tol = 1e-10;
};

/// L(g)(xi) = int g(xi_*) |xi - xi_*|^alpha d xi_*, term by term in
/// spherical coordinates about xi with the pole towards the term centre.
inline double loss_L(const PolyGaussianDensity& g, const Vec& xi, double alpha,
                     const LossOptions& opt = {}) {
  require(alpha > 0.0 && alpha <= 1.0, "kernel exponent alpha must lie in (0,1]");
  const int n = g.dimension();
  AdaptiveOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = opt.rel_tol;
  o.max_intervals = 400;
  o.throw_on_failure = false;
  double total = 0.0;
  for (const auto& t : g.terms()) {
    const Vec toward = t.center - xi;
    const double d = norm(toward);
    const Vec c = d > 0.0 ? (1.0 / d) * toward : Vec{{0.0, 0.0, 1.0}};
    const Vec pole = n == 2 && d == 0.0 ? Vec{{1.0, 0.0, 0.0}} : c;
    const auto frame = orthogonal_frame(pole, n);
    const double w = std::sqrt(t.width);
    const double reach = d + w * (std::sqrt(2.0 * t.poly.degree() + n + alpha) + 9.0);
    const int naz = 2 * t.poly.degree() + 4;
    auto shell = [&](double rho) {
      const double theta_c = rho > 0.0 ? std::min(pi, 3.0 * w / rho) : pi;
      std::vector<double> cuts{0.0};
      for (double th = theta_c; th < pi; th *= 3.0) cuts.push_back(th);
      cuts.push_back(pi);
      auto at = [&](const Vec& om) { return t.eval(xi + rho * om); };
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (n == 2) {
          s += adaptive_integrate(
                   [&](double th) {
                     const double ct = std::cos(th), st = std::sin(th);
                     return at(ct * pole + st * frame[0]) + at(ct * pole - st * frame[0]);
                   },
                   cuts[i], cuts[i + 1], o)
                   .value;
        } else {
          s += adaptive_integrate(
                   [&](double th) {
                     const double ct = std::cos(th), st = std::sin(th);
                     double a = 0.0;
                     for (int k = 0; k < naz; ++k) {
                       const double ph = 2.0 * pi * (k + 0.5) / naz;
                       a += at(ct * pole + (st * std::cos(ph)) * frame[0] +
                               (st * std::sin(ph)) * frame[1]);
                     }
                     return st * a * (2.0 * pi / naz);
                   },
                   cuts[i], cuts[i + 1], o)
                   .value;
        }
      }
      return std::pow(rho, n - 1.0 + alpha) * s;
    };
    std::vector<double> cuts{0.0};
    for (double b : {d - 6.0 * w, d - 2.0 * w, d, d + 2.0 * w, d + 6.0 * w})
      if (b > cuts.back() && b < reach) cuts.push_back(b);
    cuts.push_back(reach);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      total += adaptive_integrate(shell, cuts[i], cuts[i + 1], o).value;
  }
  return total;
}

struct LossBound {
  double k_alpha = 0.0;
  double grid_min = 0.0;
  Vec argmin{};
  double mass = 0.0;
};

/// k_alpha = inf of L(g)(xi) / max(|xi|^alpha, floor) over a radial grid on
/// a fan of directions, capped by the large-|xi| limit m_0.
inline LossBound loss_lower_constant(const PolyGaussianDensity& g, double alpha,
                                     int radii = 24, double floor = 1e-8) {
  LossBound res;
  res.mass = g.mass();
  require(res.mass > 0.0, "loss lower bound needs a density with positive mass");
  const int n = g.dimension();
  std::vector<Vec> dirs;
  if (n == 2) {
    for (int k = 0; k < 8; ++k)
      dirs.push_back(Vec{{std::cos(pi * k / 4), std::sin(pi * k / 4), 0.0}});
  } else {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          const int nz = (a != 0) + (b != 0) + (c != 0);
          if (nz == 1 || nz == 3) {
            Vec v{{double(a), double(b), double(c)}};
            dirs.push_back((1.0 / norm(v)) * v);
          }
        }
  }
  const double R = g.max_center_norm() + 8.0 * std::sqrt(g.max_width());
  res.grid_min = INFINITY;
  for (const Vec& w : dirs)
    for (int i = 0; i <= radii; ++i) {
      const Vec x = (R * i / radii) * w;
      const double v = loss_L(g, x, alpha, {1e-8}) / std::max(std::pow(norm(x), alpha), floor);
      if (v < res.grid_min) {
        res.grid_min = v;
        res.argmin = x;
      }
    }
  res.k_alpha = std::min(res.grid_min, res.mass);
  return res;
}

}  // namespace boltzmom
