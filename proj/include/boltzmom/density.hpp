#pragma once

// Manufactured densities: finite sums of polynomial x Gaussian terms. The
// family is closed under differentiation, which gives exact access to every
// derivative of f entering the absolute moments delta^eta m_p.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "multi_index.hpp"
#include "quadrature.hpp"

namespace boltzmom {

using Exponents = std::array<int, max_dim>;

/// Multivariate polynomial in absolute velocity coordinates.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(double constant) {
    if (constant != 0.0) add({0, 0, 0}, constant);
  }

  static Polynomial monomial(Exponents e, double c = 1.0) {
    Polynomial p;
    p.add(e, c);
    return p;
  }

  void add(Exponents e, double c) {
    if (c == 0.0) return;
    auto it = coeffs_.find(e);
    if (it == coeffs_.end()) {
      coeffs_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0.0) coeffs_.erase(it);
    }
    rebuild();
  }

  const std::map<Exponents, double>& coefficients() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : coeffs_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  double eval(const Vec& x) const {
    double s = 0.0;
    for (const auto& [e, c] : flat_) {
      double t = c;
      for (std::size_t i = 0; i < max_dim; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  Polynomial derivative(int i) const {
    Polynomial out;
    const auto d = static_cast<std::size_t>(i);
    for (const auto& [e, c] : coeffs_) {
      if (e[d] == 0) continue;
      Exponents f = e;
      f[d] -= 1;
      out.add(f, c * e[d]);
    }
    return out;
  }

  /// this * (a + b * x_i)
  Polynomial times_affine(int i, double a, double b) const {
    Polynomial out;
    const auto d = static_cast<std::size_t>(i);
    for (const auto& [e, c] : coeffs_) {
      out.add(e, a * c);
      Exponents f = e;
      f[d] += 1;
      out.add(f, b * c);
    }
    return out;
  }

  Polynomial scaled(double s) const {
    Polynomial out;
    for (const auto& [e, c] : coeffs_) out.add(e, s * c);
    return out;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ea, ca] : a.coeffs_)
      for (const auto& [eb, cb] : b.coeffs_)
        out.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    for (const auto& [e, c] : b.coeffs_) out.add(e, c);
    return out;
  }

 private:
  void rebuild() { flat_.assign(coeffs_.begin(), coeffs_.end()); }

  std::map<Exponents, double> coeffs_;
  std::vector<std::pair<Exponents, double>> flat_;
};

/// poly(xi) * exp(-|xi - center|^2 / (2 width))
struct GaussTerm {
  Polynomial poly;
  Vec center{};
  double width = 1.0;

  double eval(const Vec& x) const {
    const double r2 = norm2(x - center);
    return poly.eval(x) * std::exp(-0.5 * r2 / width);
  }
};

namespace detail {

// int (m + y)^a exp(-y^2/(2T)) dy over the real line.
inline double shifted_gauss_moment(double m, int a, double T) {
  double s = 0.0;
  double even_moment = std::sqrt(2.0 * pi * T);  // j = 0
  for (int j = 0; j <= a; j += 2) {
    if (j > 0) even_moment *= (j - 1) * T;
    s += gen_binomial(a, j) * std::pow(m, a - j) * even_moment;
  }
  return s;
}

}  // namespace detail

class PolyGaussianDensity {
 public:
  PolyGaussianDensity() = default;
  explicit PolyGaussianDensity(int n) : n_(n) { check_dimension(n); }
  PolyGaussianDensity(int n, std::vector<GaussTerm> terms) : n_(n), terms_(std::move(terms)) {
    check_dimension(n);
    for (const auto& t : terms_) validate(t);
  }

  /// mass * (2 pi T)^{-n/2} exp(-|xi - center|^2 / (2T))
  static PolyGaussianDensity maxwellian(int n, double T = 1.0, Vec center = {}, double mass = 1.0) {
    require(T > 0.0, "temperature must be positive");
    const double c = mass * std::pow(2.0 * pi * T, -0.5 * n);
    return PolyGaussianDensity(n, {GaussTerm{Polynomial(c), center, T}});
  }

  /// exp(-r |xi|^2), the Maxwellian weight M_r.
  static PolyGaussianDensity weight(int n, double r) {
    require(r > 0.0, "weight exponent must be positive");
    return PolyGaussianDensity(n, {GaussTerm{Polynomial(1.0), Vec{}, 0.5 / r}});
  }

  int dimension() const { return n_; }
  const std::vector<GaussTerm>& terms() const { return terms_; }

  void add_term(GaussTerm t) {
    validate(t);
    terms_.push_back(std::move(t));
  }

  double operator()(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.eval(x);
    return s;
  }

  /// d(x) * exp(r |x|^2), evaluated term by term so that far-tail values
  /// neither underflow nor overflow before the product is formed.
  double eval_reweighted(const Vec& x, double r) const {
    double s = 0.0;
    const double x2 = norm2(x);
    for (const auto& t : terms_) {
      const double e = -0.5 * norm2(x - t.center) / t.width + r * x2;
      s += t.poly.eval(x) * std::exp(e);
    }
    return s;
  }

  PolyGaussianDensity scaled(double s) const {
    PolyGaussianDensity out(n_);
    for (const auto& t : terms_) out.terms_.push_back({t.poly.scaled(s), t.center, t.width});
    return out;
  }

  friend PolyGaussianDensity operator+(const PolyGaussianDensity& a, const PolyGaussianDensity& b) {
    require(a.n_ == b.n_, "density dimensions differ");
    PolyGaussianDensity out = a;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    return out;
  }

  /// Exact first derivative along coordinate i.
  PolyGaussianDensity derivative(int i) const {
    require(i >= 0 && i < n_, "derivative direction out of range");
    PolyGaussianDensity out(n_);
    for (const auto& t : terms_) {
      // d/dx_i [P G] = (dP/dx_i - P (x_i - m_i)/T) G
      Polynomial p = t.poly.derivative(i) +
                     t.poly.times_affine(i, t.center[static_cast<std::size_t>(i)] / t.width,
                                         -1.0 / t.width);
      if (!p.empty()) out.terms_.push_back({std::move(p), t.center, t.width});
    }
    return out;
  }

  /// int d(xi) xi^beta d xi in closed form.
  double signed_integral(Exponents beta = {0, 0, 0}) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      for (const auto& [e, c] : t.poly.coefficients()) {
        double prod = c;
        for (int i = 0; i < n_; ++i) {
          const auto d = static_cast<std::size_t>(i);
          prod *= detail::shifted_gauss_moment(t.center[d], e[d] + beta[d], t.width);
        }
        s += prod;
      }
    }
    return s;
  }

  double mass() const { return signed_integral(); }

  Vec mean() const {
    const double m = mass();
    Vec v;
    for (int i = 0; i < n_; ++i) {
      Exponents e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = 1;
      v[static_cast<std::size_t>(i)] = signed_integral(e) / m;
    }
    return v;
  }

  double max_width() const {
    double w = 0.0;
    for (const auto& t : terms_) w = std::max(w, t.width);
    return w;
  }
  double min_width() const {
    double w = INFINITY;
    for (const auto& t : terms_) w = std::min(w, t.width);
    return w;
  }
  double max_center_norm() const {
    double c = 0.0;
    for (const auto& t : terms_) c = std::max(c, norm(t.center));
    return c;
  }
  /// Average of the term centers.
  Vec mean_center() const {
    Vec c;
    if (terms_.empty()) return c;
    for (const auto& t : terms_) c += t.center;
    return (1.0 / static_cast<double>(terms_.size())) * c;
  }
  int max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.poly.degree());
    return d;
  }

 private:
  void validate(const GaussTerm& t) const {
    require(t.width > 0.0, "Gaussian term width must be positive");
    for (int i = n_; i < max_dim; ++i) {
      const auto d = static_cast<std::size_t>(i);
      require(t.center[d] == 0.0, "term center has components beyond the dimension");
      for (const auto& [e, c] : t.poly.coefficients())
        require(e[d] == 0, "polynomial uses coordinates beyond the dimension");
    }
  }

  int n_ = 3;
  std::vector<GaussTerm> terms_;
};

/// Exact eta-derivative, staying inside the family.
inline PolyGaussianDensity differentiate(const PolyGaussianDensity& d, const MultiIndex& eta) {
  PolyGaussianDensity out = d;
  for (int i = 0; i < d.dimension(); ++i)
    for (int k = 0; k < eta[static_cast<std::size_t>(i)]; ++k) out = out.derivative(i);
  for (int i = d.dimension(); i < max_dim; ++i)
    require(eta[static_cast<std::size_t>(i)] == 0, "multi-index exceeds density dimension");
  return out;
}

/// Moments of the unit-temperature-scaled Maxwellian: int M_T |xi|^{2p}
/// = (2T)^p Gamma(p + n/2) / Gamma(n/2) for unit mass.
inline double maxwellian_moment(int n, double T, double p) {
  return std::exp(p * std::log(2.0 * T) + log_gamma(p + 0.5 * n) - log_gamma(0.5 * n));
}

struct ShellOptions {
  int shells = 64;
  int shell_order = 8;
  double rel_tol = 1e-8;
  /// Highest moment order the radial truncation must resolve.
  double p_max = 10.0;
  unsigned threads = 1;
};

/// Angular integrals S(r) = int_{S^{n-1}} |d(r w)| dw on radial Gauss nodes.
/// Any absolute moment then costs one weighted sum over shells.
struct RadialProfile {
  int n = 3;
  std::vector<double> radii;
  std::vector<double> weights;
  std::vector<double> shell;
  std::vector<double> shell_error;

  double moment(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
      s += weights[i] * std::pow(radii[i], n - 1 + 2.0 * p) * shell[i];
    return s;
  }
  double error(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
      s += weights[i] * std::pow(radii[i], n - 1 + 2.0 * p) * shell_error[i];
    return s;
  }
};

/// Radial cutoff beyond which r^{2p+n-1} |d| is negligible at double precision.
inline double radial_cutoff(const PolyGaussianDensity& d, double p_max) {
  const double T = d.max_width();
  const double k = 2.0 * p_max + d.dimension() - 1 + d.max_degree();
  return d.max_center_norm() + std::sqrt(T) * (std::sqrt(k) + 10.0);
}

inline RadialProfile radial_profile(const PolyGaussianDensity& d, const ShellOptions& opt = {}) {
  const int n = d.dimension();
  RadialProfile prof;
  prof.n = n;
  const LineRule radial = composite_legendre(0.0, radial_cutoff(d, opt.p_max), opt.shells,
                                             opt.shell_order);
  prof.radii = radial.nodes;
  prof.weights = radial.weights;
  prof.shell.assign(radial.size(), 0.0);
  prof.shell_error.assign(radial.size(), 0.0);
  AdaptiveOptions inner;
  inner.abs_tol = 1e-300;
  inner.rel_tol = 0.1 * opt.rel_tol;
  inner.max_intervals = 2000;
  inner.throw_on_failure = false;
  parallel_for(radial.size(), opt.threads, [&](std::size_t i) {
    const double r = prof.radii[i];
    if (n == 2) {
      auto res = adaptive_integrate(
          [&](double ph) { return std::abs(d(Vec{{r * std::cos(ph), r * std::sin(ph), 0.0}})); },
          0.0, 2.0 * pi, inner);
      prof.shell[i] = res.value;
      prof.shell_error[i] = res.error;
      return;
    }
    double err = 0.0;
    auto res = adaptive_integrate(
        [&](double t) {
          const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
          auto in = adaptive_integrate(
              [&](double ph) {
                return std::abs(d(Vec{{r * st * std::cos(ph), r * st * std::sin(ph), r * t}}));
              },
              0.0, 2.0 * pi, inner);
          err += in.error;
          return in.value;
        },
        -1.0, 1.0, inner);
    prof.shell[i] = res.value;
    prof.shell_error[i] = res.error + err / 15.0;
  });
  return prof;
}

struct AbsMomentResult {
  double value = 0.0;
  double error = 0.0;
  bool warning = false;
};

/// delta m_p = int |d| |xi|^{2p} by radial-shell decomposition.
inline AbsMomentResult abs_moment(const PolyGaussianDensity& d, double p,
                                  ShellOptions opt = {}) {
  require(p >= 0.0, "moment order must be nonnegative");
  opt.p_max = std::max(opt.p_max, p);
  const RadialProfile prof = radial_profile(d, opt);
  AbsMomentResult res{prof.moment(p), prof.error(p), false};
  res.warning = res.error > opt.rel_tol * res.value;
  return res;
}

/// Fixed-rule variant. The error estimate compares against a rule four
/// orders coarser; `warning` flags a rule/density width mismatch.
inline AbsMomentResult abs_moment(const PolyGaussianDensity& d, double p, const VelocityRule& rule,
                                  double tol = 1e-8) {
  require(p >= 0.0, "moment order must be nonnegative");
  auto integrand = [&](const Vec& x) { return std::abs(d(x)) * std::pow(norm2(x), p); };
  AbsMomentResult res;
  res.value = rule.integrate(integrand);
  const VelocityRule coarse = build_velocity_rule(rule.dimension, std::max(1, rule.order - 4),
                                                  rule.scale, rule.center);
  res.error = std::abs(res.value - coarse.integrate(integrand));
  res.warning = res.error > tol * std::abs(res.value);
  return res;
}

struct TailRatio {
  double sup = 0.0;
  Vec argmax{};
  bool divergent = false;
};

/// sup |d| / ((1+|xi|^2)^{w/2} exp(-r|xi|^2)) over a radial grid along a
/// fixed fan of directions. Divergence is flagged when the log-ratio keeps
/// climbing in |xi|^2 across the outer half of the grid.
inline TailRatio tail_ratio_sup(const PolyGaussianDensity& d, double r, int weight_power,
                                int radial_points = 400) {
  require(r > 0.0, "tail exponent must be positive");
  require(weight_power >= 0, "weight power must be nonnegative");
  const int n = d.dimension();
  std::vector<Vec> dirs;
  if (n == 2) {
    for (int k = 0; k < 16; ++k)
      dirs.push_back(Vec{{std::cos(2 * pi * k / 16), std::sin(2 * pi * k / 16), 0.0}});
  } else {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          Vec v{{double(a), double(b), double(c)}};
          dirs.push_back((1.0 / norm(v)) * v);
        }
  }
  // Stay where the density terms do not underflow.
  const double reach = std::sqrt(2.0 * d.min_width() * 600.0);
  const double R = std::max(1.0, std::min(30.0, reach - d.max_center_norm()));
  TailRatio out;
  for (const Vec& w : dirs) {
    std::vector<double> rho2, logr;
    for (int k = 0; k <= radial_points; ++k) {
      const double rho = R * k / radial_points;
      const Vec x = rho * w;
      const double val = std::abs(d(x));
      const double denom_log = 0.5 * weight_power * std::log1p(rho * rho) - r * rho * rho;
      const double lr = val > 0.0 ? std::log(val) - denom_log : -INFINITY;
      if (std::isfinite(lr) && std::exp(lr) > out.sup) {
        out.sup = std::exp(lr);
        out.argmax = x;
      }
      if (k >= radial_points / 2) {
        rho2.push_back(rho * rho);
        logr.push_back(lr);
      }
    }
    const double first = logr.front(), last = logr.back();
    if (std::isfinite(last) && (!std::isfinite(first) || last - first > std::log(2.0))) {
      // Least-squares slope of log-ratio against |xi|^2 on the outer half.
      double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
      for (std::size_t i = 0; i < rho2.size(); ++i) {
        if (!std::isfinite(logr[i])) continue;
        sx += rho2[i];
        sy += logr[i];
        sxx += rho2[i] * rho2[i];
        sxy += rho2[i] * logr[i];
        cnt += 1;
      }
      const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      if (slope > 1e-6) out.divergent = true;
    }
  }
  if (out.divergent) out.sup = INFINITY;
  return out;
}

}  // namespace boltzmom
