#pragma once

// Spherical averaging operators A+/A- and the centre-of-mass pair rule used
// by every weak-form collision functional.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "density.hpp"
#include "kernel.hpp"
#include "multi_index.hpp"
#include "quadrature.hpp"

namespace boltzmom {

/// Test function phi. Power and exponential kinds are isotropic and are
/// evaluated through their radial profile in s = |xi|^2.
class TestFunction {
 public:
  enum class Kind { power, exp_weight, polynomial, custom };

  /// phi_p = |xi|^{2p}
  static TestFunction power(double p) {
    require(p >= 0.0, "power test function needs p >= 0");
    TestFunction t;
    t.kind_ = Kind::power;
    t.param_ = p;
    t.int_power_ = std::floor(p) == p && p <= 64.0 ? static_cast<int>(p) : -1;
    return t;
  }
  /// exp(r |xi|^2)
  static TestFunction exp_weight(double r) {
    TestFunction t;
    t.kind_ = Kind::exp_weight;
    t.param_ = r;
    return t;
  }
  static TestFunction polynomial(Polynomial p, std::string name = "polynomial") {
    TestFunction t;
    t.kind_ = Kind::polynomial;
    t.poly_ = std::move(p);
    t.name_ = std::move(name);
    return t;
  }
  /// xi_i
  static TestFunction coordinate(int i) {
    Exponents e{0, 0, 0};
    e[static_cast<std::size_t>(i)] = 1;
    return polynomial(Polynomial::monomial(e), "xi_" + std::to_string(i + 1));
  }
  static TestFunction custom(std::function<double(const Vec&)> fn, std::string name = "custom") {
    TestFunction t;
    t.kind_ = Kind::custom;
    t.fn_ = std::move(fn);
    t.name_ = std::move(name);
    return t;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  bool isotropic() const { return kind_ == Kind::power || kind_ == Kind::exp_weight; }

  std::string name() const {
    if (kind_ == Kind::power) return "phi_" + format_param();
    if (kind_ == Kind::exp_weight) return "exp_" + format_param();
    return name_;
  }

  /// Radial profile phi(xi) = radial(|xi|^2); isotropic kinds only.
  double radial(double s) const {
    s = std::max(s, 0.0);
    if (kind_ == Kind::power) {
      if (int_power_ >= 0) {
        double v = 1.0;
        for (int k = 0; k < int_power_; ++k) v *= s;
        return v;
      }
      return std::pow(s, param_);
    }
    if (kind_ == Kind::exp_weight) return std::exp(param_ * s);
    throw InvalidInput("test function '" + name() + "' is not isotropic");
  }

  double operator()(const Vec& x) const {
    switch (kind_) {
      case Kind::power:
      case Kind::exp_weight:
        return radial(norm2(x));
      case Kind::polynomial:
        return poly_.eval(x);
      case Kind::custom:
        return fn_(x);
    }
    return 0.0;
  }

  /// Polynomial form; available for integer powers and polynomial kinds.
  Polynomial as_polynomial() const {
    if (kind_ == Kind::polynomial) return poly_;
    require(kind_ == Kind::power && int_power_ >= 0,
            "only integer powers expand to polynomials");
    Polynomial s;
    for (int i = 0; i < max_dim; ++i) {
      Exponents e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = 2;
      s.add(e, 1.0);
    }
    Polynomial out(1.0);
    for (int k = 0; k < int_power_; ++k) out = out * s;
    return out;
  }

  /// Exact derivative d^eta phi as a polynomial test function.
  TestFunction derivative(const MultiIndex& eta) const {
    Polynomial p = as_polynomial();
    for (int i = 0; i < max_dim; ++i)
      for (int k = 0; k < eta[static_cast<std::size_t>(i)]; ++k) p = p.derivative(i);
    return polynomial(std::move(p), "d" + eta.str() + " " + name());
  }

 private:
  std::string format_param() const {
    std::string s = std::to_string(param_);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Kind kind_ = Kind::power;
  double param_ = 0.0;
  int int_power_ = 0;
  Polynomial poly_;
  std::function<double(const Vec&)> fn_;
  std::string name_;
};

/// Product rule on S^{n-1} adapted to h: Gauss-Jacobi in z = u_hat . sigma
/// times equispaced azimuths (two antipodal points when n = 2). Weights
/// include h, so sum w F = int F(sigma) h(u_hat . sigma) d sigma.
struct SphereRule {
  int n = 3;
  std::vector<double> z;
  std::vector<double> w;
  std::vector<double> ca;
  std::vector<double> sa;

  std::size_t size() const { return z.size() * ca.size(); }
};

inline SphereRule build_sphere_rule(const AngularCrossSection& cs, int nz = 16, int naz = 8) {
  require(nz >= 1 && naz >= 1, "sphere rule orders must be positive");
  SphereRule rule;
  rule.n = cs.n;
  const LineRule zr = cs.default_rule(nz);
  if (cs.n == 2) {
    rule.ca = {1.0, -1.0};
    rule.sa = {0.0, 0.0};
  } else {
    for (int k = 0; k < naz; ++k) {
      const double ph = 2.0 * pi * (k + 0.5) / naz;
      rule.ca.push_back(std::cos(ph));
      rule.sa.push_back(std::sin(ph));
    }
  }
  const double per_az = cs.omega() / static_cast<double>(rule.ca.size());
  for (std::size_t i = 0; i < zr.size(); ++i) {
    rule.z.push_back(zr.nodes[i]);
    rule.w.push_back(per_az * zr.weights[i] * cs.regular(zr.nodes[i]));
  }
  return rule;
}

/// Visits (xi', xi'_*, weight) for every sphere node.
template <class Fn>
void sphere_visit(const SphereRule& rule, const Vec& xi, const Vec& xi_star, Fn&& fn) {
  const Vec u = xi - xi_star;
  const double r = norm(u);
  const Vec V = 0.5 * (xi + xi_star);
  if (r == 0.0) {
    double total = 0.0;
    for (double w : rule.w) total += w * static_cast<double>(rule.ca.size());
    fn(xi, xi_star, total);
    return;
  }
  const Vec uh = (1.0 / r) * u;
  const auto frame = orthogonal_frame(uh, rule.n);
  for (std::size_t i = 0; i < rule.z.size(); ++i) {
    const double z = rule.z[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t k = 0; k < rule.ca.size(); ++k) {
      Vec sigma = z * uh + (st * rule.ca[k]) * frame[0];
      if (rule.n == 3) sigma += (st * rule.sa[k]) * frame[1];
      const Vec d = (0.5 * r) * sigma;
      fn(V + d, V - d, rule.w[i]);
    }
  }
}

/// {int phi(xi') h d sigma, int phi(xi'_*) h d sigma}.
inline std::pair<double, double> sphere_split(const TestFunction& phi, const Vec& xi,
                                              const Vec& xi_star, const SphereRule& rule) {
  double sp = 0.0, sm = 0.0;
  if (!phi.isotropic()) {
    sphere_visit(rule, xi, xi_star, [&](const Vec& a, const Vec& b, double w) {
      sp += w * phi(a);
      sm += w * phi(b);
    });
    return {sp, sm};
  }
  // |xi'|^2 = |V|^2 + r^2/4 + r V.sigma, and V.sigma only sees z and the
  // component of V orthogonal to u.
  const Vec u = xi - xi_star;
  const double r = norm(u);
  const Vec V = 0.5 * (xi + xi_star);
  const double v2 = norm2(V);
  const double c0 = v2 + 0.25 * r * r;
  double vu = 0.0, vperp = 0.0;
  if (r > 0.0) {
    vu = dot(V, u) / r;
    vperp = std::sqrt(std::max(0.0, v2 - vu * vu));
  }
  for (std::size_t i = 0; i < rule.z.size(); ++i) {
    const double z = rule.z[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ap = 0.0, am = 0.0;
    for (double c : rule.ca) {
      const double t = r * (z * vu + st * vperp * c);
      ap += phi.radial(c0 + t);
      am += phi.radial(c0 - t);
    }
    sp += rule.w[i] * ap;
    sm += rule.w[i] * am;
  }
  return {sp, sm};
}

/// A+[phi] = int (phi' + phi'_*) h(u_hat . sigma) d sigma.
inline double a_plus(const TestFunction& phi, const Vec& xi, const Vec& xi_star,
                     const SphereRule& rule) {
  const auto [sp, sm] = sphere_split(phi, xi, xi_star, rule);
  return sp + sm;
}

inline double a_plus(const TestFunction& phi, const Vec& xi, const Vec& xi_star,
                     const AngularCrossSection& h) {
  const SphereRule rule =
      phi.isotropic() ? build_sphere_rule(h, 32, 16) : build_sphere_rule(h, 48, 96);
  return a_plus(phi, xi, xi_star, rule);
}

/// A[phi] = A+[phi] - (phi + phi_*).
inline double a_op(const TestFunction& phi, const Vec& xi, const Vec& xi_star,
                   const SphereRule& rule) {
  return a_plus(phi, xi, xi_star, rule) - phi(xi) - phi(xi_star);
}

inline double a_op(const TestFunction& phi, const Vec& xi, const Vec& xi_star,
                   const AngularCrossSection& h) {
  return a_plus(phi, xi, xi_star, h) - phi(xi) - phi(xi_star);
}

struct PairOptions {
  int v_order = 5;
  int radial_panels = 4;
  int radial_order = 10;
  int polar = 10;
  int azimuth = 20;
  int sphere_z = 8;
  int sphere_az = 8;
  /// Extra polynomial degree of the integrand beyond the densities.
  double extra_degree = 4.0;
  unsigned threads = default_threads();

  /// Fewer nodes on every axis; used for quadrature error estimates.
  PairOptions coarser() const {
    PairOptions c = *this;
    c.v_order = std::max(2, v_order - 2);
    c.radial_order = std::max(4, radial_order - 2);
    c.polar = std::max(4, polar - 2);
    c.azimuth = std::max(4, azimuth - 4);
    c.sphere_z = std::max(4, sphere_z - 4);
    return c;
  }
  /// More nodes on every axis; an independent rule for cross-checks.
  PairOptions finer() const {
    PairOptions c = *this;
    c.v_order += 1;
    c.radial_order += 2;
    c.radial_panels += 1;
    c.polar += 2;
    c.azimuth += 4;
    c.sphere_z += 4;
    return c;
  }
};

/// Rule for int int F(xi) G(xi_*) K |u|^alpha with F, G single Gaussian
/// terms, in V = (xi + xi_*)/2 and u = xi - xi_* (unit Jacobian). For fixed
/// u the product F G is Gaussian in V about c0 + kappa u, so V nodes follow
/// that centre. u uses radial panels with r^{n-1+alpha} folded into the first
/// panel's Jacobi weight, times a product rule on directions that is
/// symmetric under u -> -u.
struct PairRule {
  int n = 3;
  double alpha = 1.0;
  Vec v_center{};
  double v_shift = 0.0;
  std::vector<Vec> v_offsets;
  std::vector<double> v_weights;
  std::vector<Vec> u_nodes;
  std::vector<double> u_weights;

  std::size_t size() const { return v_offsets.size() * u_nodes.size(); }
};

inline PairRule build_pair_rule(int n, double alpha, const Vec& v_center, double v_shift,
                                double v_scale, double u_cutoff, const PairOptions& opt = {}) {
  check_dimension(n);
  require(u_cutoff > 0.0, "pair rule cutoff must be positive");
  PairRule rule;
  rule.n = n;
  rule.alpha = alpha;
  rule.v_center = v_center;
  rule.v_shift = v_shift;
  const VelocityRule vr = build_velocity_rule(n, opt.v_order, v_scale);
  rule.v_offsets = vr.nodes;
  rule.v_weights = vr.full_weights;

  const double beta = n - 1.0 + alpha;
  const double h = u_cutoff / opt.radial_panels;
  std::vector<double> rn, rw;
  const LineRule first = build_jacobi_rule(opt.radial_order, 0.0, beta);
  for (std::size_t i = 0; i < first.size(); ++i) {
    rn.push_back(0.5 * h * (first.nodes[i] + 1.0));
    rw.push_back(std::pow(0.5 * h, beta + 1.0) * first.weights[i]);
  }
  if (opt.radial_panels > 1) {
    const LineRule rest =
        composite_legendre(h, u_cutoff, opt.radial_panels - 1, opt.radial_order);
    for (std::size_t i = 0; i < rest.size(); ++i) {
      rn.push_back(rest.nodes[i]);
      rw.push_back(rest.weights[i] * std::pow(rest.nodes[i], beta));
    }
  }

  std::vector<Vec> dirs;
  std::vector<double> dw;
  if (n == 2) {
    for (int k = 0; k < opt.azimuth; ++k) {
      const double ph = 2.0 * pi * (k + 0.5) / opt.azimuth;
      dirs.push_back(Vec{{std::cos(ph), std::sin(ph), 0.0}});
      dw.push_back(2.0 * pi / opt.azimuth);
    }
  } else {
    const LineRule pol = build_legendre_rule(opt.polar);
    for (std::size_t i = 0; i < pol.size(); ++i) {
      const double ct = pol.nodes[i], st = std::sqrt(1.0 - ct * ct);
      for (int k = 0; k < opt.azimuth; ++k) {
        const double ph = 2.0 * pi * (k + 0.5) / opt.azimuth;
        dirs.push_back(Vec{{st * std::cos(ph), st * std::sin(ph), ct}});
        dw.push_back(pol.weights[i] * 2.0 * pi / opt.azimuth);
      }
    }
  }
  for (std::size_t i = 0; i < rn.size(); ++i)
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rule.u_nodes.push_back(rn[i] * dirs[j]);
      rule.u_weights.push_back(rw[i] * dw[j]);
    }
  return rule;
}

/// Rule adapted to term a at xi and term b at xi_*, truncated where the
/// Gaussian envelope in u drops below 1e-14 of its peak.
inline PairRule pair_rule_for(const GaussTerm& a, const GaussTerm& b, int n, double alpha,
                              double degree, const PairOptions& opt = {}) {
  const double T1 = a.width, T2 = b.width;
  const double P = 0.5 / T1 + 0.5 / T2;
  const Vec c0 = (1.0 / P) * ((0.5 / T1) * a.center + (0.5 / T2) * b.center);
  const double kappa = (0.25 / T2 - 0.25 / T1) / P;
  const double S = T1 + T2;
  const double k = degree + opt.extra_degree + n + alpha;
  const double cutoff = norm(a.center - b.center) + std::sqrt(2.0 * S) * (std::sqrt(k) + 6.5);
  return build_pair_rule(n, alpha, c0, kappa, std::sqrt(1.0 / P), cutoff, opt);
}

/// sum over pair nodes of w * fn(xi, xi_*, acc) accumulated into K slots.
/// Partial sums are kept per u node and added in order, so the result does
/// not depend on the thread count.
template <std::size_t K, class Fn>
std::array<double, K> pair_integrate(const PairRule& rule, unsigned threads, Fn&& fn) {
  std::vector<std::array<double, K>> partial(rule.u_nodes.size());
  parallel_for(rule.u_nodes.size(), threads, [&](std::size_t j) {
    std::array<double, K> acc{};
    std::array<double, K> local{};
    const Vec& u = rule.u_nodes[j];
    const Vec base = rule.v_center + rule.v_shift * u;
    const Vec half = 0.5 * u;
    for (std::size_t i = 0; i < rule.v_offsets.size(); ++i) {
      const Vec V = base + rule.v_offsets[i];
      local.fill(0.0);
      fn(V + half, V - half, local);
      const double w = rule.v_weights[i];
      for (std::size_t k = 0; k < K; ++k) acc[k] += w * local[k];
    }
    for (std::size_t k = 0; k < K; ++k) acc[k] *= rule.u_weights[j];
    partial[j] = acc;
  });
  std::array<double, K> total{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
  return total;
}

/// Splits the bilinear integral into Gaussian term pairs: fn(a, b, xi,
/// xi_*, acc) runs on the rule adapted to term a of f at xi and term b of g
/// at xi_*, and the caller evaluates only those terms.
template <std::size_t K, class Fn>
std::array<double, K> term_pair_integrate(const PolyGaussianDensity& f,
                                          const PolyGaussianDensity& g, double alpha,
                                          double degree, const PairOptions& opt, Fn&& fn) {
  require(f.dimension() == g.dimension(), "density dimensions differ");
  std::array<double, K> total{};
  for (std::size_t a = 0; a < f.terms().size(); ++a)
    for (std::size_t b = 0; b < g.terms().size(); ++b) {
      const PairRule rule =
          pair_rule_for(f.terms()[a], g.terms()[b], f.dimension(), alpha, degree, opt);
      const auto s = pair_integrate<K>(rule, opt.threads, [&](const Vec& x, const Vec& y,
                                                              auto& acc) { fn(a, b, x, y, acc); });
      for (std::size_t k = 0; k < K; ++k) total[k] += s[k];
    }
  return total;
}

/// Density made of a single term of d.
inline PolyGaussianDensity term_density(const PolyGaussianDensity& d, std::size_t i) {
  return PolyGaussianDensity(d.dimension(), {d.terms()[i]});
}

}  // namespace boltzmom
