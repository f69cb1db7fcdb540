#pragma once

// Sharp Povzner constants gamma_p, the Povzner inequality for A[|xi|^{2p}],
// and the generalized binomial sandwich.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "collision.hpp"
#include "common.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "weak_form.hpp"

namespace boltzmom {

enum class GammaConvention { paper, symmetrized };

inline std::string to_string(GammaConvention c) {
  return c == GammaConvention::paper ? "paper" : "sym";
}

/// omega_{n-2} int ((1+z)/2)^p h_bar(z) (1-z^2)^{(n-3)/2} dz.
///
/// The factor ((1+z)/2)^p is folded into the Jacobi weight, so large p
/// costs nothing extra.
inline double gamma_paper(const AngularCrossSection& h, double p, int order = 64) {
  require(p >= 1.0, "gamma_p needs p >= 1");
  const double a = h.jacobi_exponent();
  const LineRule rule = build_jacobi_rule(order, a, a + p, -p * std::log(2.0));
  return h.omega() * rule.integrate([&](double z) { return h.regular_bar(z); });
}

/// Same integral with ((1+z)/2)^p + ((1-z)/2)^p. h_bar is even, so this is
/// exactly twice gamma_paper and gamma_1 = 1.
inline double gamma_sym(const AngularCrossSection& h, double p, int order = 64) {
  return 2.0 * gamma_paper(h, p, order);
}

inline double gamma_p(const AngularCrossSection& h, double p, GammaConvention c,
                      int order = 64) {
  return c == GammaConvention::paper ? gamma_paper(h, p, order) : gamma_sym(h, p, order);
}

struct GammaTable {
  std::string cross_section;
  double epsilon = 0.0;
  std::map<double, double> entries;  // p -> gamma_p (paper convention)

  double sym(double p) const { return 2.0 * entries.at(p); }

  bool strictly_decreasing() const {
    double prev = INFINITY;
    for (const auto& [p, g] : entries) {
      if (!(g < prev)) return false;
      prev = g;
    }
    return true;
  }
  bool in_unit_interval() const {
    for (const auto& [p, g] : entries)
      if (p > 1.0 && !(g > 0.0 && g < 1.0)) return false;
    return true;
  }
};

inline GammaTable build_gamma_table(const AngularCrossSection& h, const std::vector<double>& ps,
                                    unsigned threads = default_threads()) {
  std::vector<double> vals(ps.size());
  parallel_for(ps.size(), threads, [&](std::size_t i) { vals[i] = gamma_paper(h, ps[i]); });
  GammaTable t;
  t.cross_section = h.name;
  t.epsilon = h.epsilon();
  for (std::size_t i = 0; i < ps.size(); ++i) t.entries[ps[i]] = vals[i];
  return t;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of y on x.
inline SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "least squares needs matching samples");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "least squares needs distinct abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

/// Slope of log gamma_p against log p on a geometric grid; expected -epsilon/2.
inline SlopeFit gamma_asymptotic_fit(const AngularCrossSection& h, double p_min, double p_max,
                                     int count) {
  require(p_min >= 10.0, "asymptotic fit needs p_min >= 10");
  require(p_max > p_min, "asymptotic fit needs p_max > p_min");
  if (count < 4) throw NumericalFailure("degenerate asymptotic fit: fewer than 4 points");
  std::vector<double> lx, ly;
  for (int i = 0; i < count; ++i) {
    const double p = p_min * std::pow(p_max / p_min, i / (count - 1.0));
    lx.push_back(std::log(p));
    ly.push_back(std::log(gamma_paper(h, p)));
  }
  return least_squares(lx, ly);
}

struct BoundCheck {
  double gamma = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// gamma_p < min{1, 16 pi |h|_inf / (p+1)} for bounded h.
inline BoundCheck bounded_h_bound_check(const AngularCrossSection& h, double p) {
  require(h.mu == 0.0, "bounded-h estimate needs mu = 0");
  BoundCheck b;
  b.gamma = gamma_paper(h, p);
  b.bound = std::min(1.0, 16.0 * pi * h.c_bound / (p + 1.0));
  b.slack = b.bound - b.gamma;
  b.holds = b.gamma < b.bound;
  return b;
}

/// Right side of the Povzner inequality in x = |xi|^2, y = |xi_*|^2.
inline double povzner_rhs(double gamma, double p, double x, double y) {
  const double xp = std::pow(x, p), yp = std::pow(y, p);
  return -(1.0 - gamma) * (xp + yp) + gamma * (std::pow(x + y, p) - xp - yp);
}

struct PovznerReport {
  WeakFormReport paper;
  WeakFormReport sym;

  /// "paper", "sym", "both" or "none" under the reports' own error bars.
  std::string passing() const {
    const bool a = paper.passes(), b = sym.passes();
    return a && b ? "both" : a ? "paper" : b ? "sym" : "none";
  }
};

struct PovznerOptions {
  int sphere_z = 32;
  int sphere_az = 32;
  unsigned threads = default_threads();
};

/// Evaluates A[|xi|^{2p}] against the Povzner right side under both gamma
/// conventions for each (xi, xi_*) pair.
inline std::vector<PovznerReport> povzner_check(
    const AngularCrossSection& h, double p, const std::vector<std::pair<Vec, Vec>>& pairs,
    const PovznerOptions& opt = {}) {
  require(p >= 1.0, "povzner check needs p >= 1");
  const TestFunction phi = TestFunction::power(p);
  const SphereRule fine = build_sphere_rule(h, opt.sphere_z, opt.sphere_az);
  const SphereRule coarse =
      build_sphere_rule(h, std::max(4, opt.sphere_z / 2), std::max(2, opt.sphere_az / 2));
  const double gp = gamma_paper(h, p), gp_c = gamma_paper(h, p, 48);
  std::vector<PovznerReport> out(pairs.size());
  parallel_for(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [xi, xs] = pairs[i];
    const double lhs = a_op(phi, xi, xs, fine);
    const double lhs_err = std::abs(lhs - a_op(phi, xi, xs, coarse));
    const double x = norm2(xi), y = norm2(xs);
    const double scale = std::pow(x + y, p);
    for (int c = 0; c < 2; ++c) {
      const double g = c == 0 ? gp : 2.0 * gp;
      const double gc = c == 0 ? gp_c : 2.0 * gp_c;
      WeakFormReport r;
      r.lhs = lhs;
      r.rhs = povzner_rhs(g, p, x, y);
      r.margin = r.rhs - r.lhs;
      r.err_estimate = lhs_err + std::abs(g - gc) * 2.0 * scale + 1e-12 * scale;
      r.case_id = "povzner_p" + std::to_string(p) + "_" + std::to_string(i) + "_" +
                  (c == 0 ? "paper" : "sym");
      r.params = {{"p", p},
                  {"gamma", g},
                  {"convention", c == 0 ? "paper" : "sym"},
                  {"xi", xi.c},
                  {"xi_star", xs.c},
                  {"cross_section", h.name}};
      (c == 0 ? out[i].paper : out[i].sym) = std::move(r);
    }
  });
  return out;
}

struct Sandwich {
  double lower = 0.0;
  double mid = 0.0;
  double upper = 0.0;
  int k_p = 0;

  bool holds(double rel_tol = 1e-12) const {
    const double tol = rel_tol * (std::abs(lower) + std::abs(mid) + std::abs(upper));
    return lower <= mid + tol && mid <= upper + tol;
  }
};

/// Partial binomial sums around (x+y)^p - x^p - y^p with k_p = floor((p+1)/2).
inline Sandwich binomial_sandwich_check(double p, double x, double y) {
  require(p > 1.0, "binomial sandwich needs p > 1");
  require(x > 0.0 && y > 0.0, "binomial sandwich needs x, y > 0");
  Sandwich s;
  s.k_p = binomial_split_order(p);
  s.mid = std::pow(x + y, p) - std::pow(x, p) - std::pow(y, p);
  double acc = 0.0;
  for (int k = 1; k <= s.k_p; ++k) {
    if (k == s.k_p) s.lower = acc;
    acc += gen_binomial(p, k) * (std::pow(x, k) * std::pow(y, p - k) +
                                 std::pow(x, p - k) * std::pow(y, k));
  }
  s.upper = acc;
  return s;
}

}  // namespace boltzmom
