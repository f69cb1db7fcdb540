#pragma once

// Weak forms of Q+, Q- and of the derivative d^eta Q(f,f), plus the checker
// for the signed derivative bound.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "collision.hpp"
#include "density.hpp"
#include "kernel.hpp"
#include "multi_index.hpp"

namespace boltzmom {

struct WeakFormReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double err_estimate = 0.0;
  std::string case_id;
  nlohmann::json params = nlohmann::json::object();

  bool passes(double tol = 0.0) const { return margin >= -(tol + err_estimate); }

  nlohmann::json to_json() const {
    return {{"lhs", lhs},       {"rhs", rhs},         {"margin", margin},
            {"err_estimate", err_estimate}, {"case_id", case_id}, {"params", params}};
  }
};

struct GainLoss {
  double gain = 0.0;
  double loss = 0.0;
  double net() const { return gain - loss; }
};

namespace detail {

inline SphereRule sphere_for(const CollisionKernel& k, const PairOptions& opt) {
  return build_sphere_rule(k.cross_section, opt.sphere_z, opt.sphere_az);
}

// Derivatives d^nu t for every nu in the lower set of eta, for each Gaussian
// term t of f separately; fam[a].d[i] belongs to term a and index[i].
struct DerivativeFamily {
  std::vector<MultiIndex> index;
  std::vector<std::vector<PolyGaussianDensity>> fam;
  int degree = 0;

  DerivativeFamily(const PolyGaussianDensity& f, const MultiIndex& eta) : index(lower_set(eta)) {
    for (std::size_t a = 0; a < f.terms().size(); ++a) {
      std::vector<PolyGaussianDensity> d;
      for (const auto& nu : index) d.push_back(differentiate(term_density(f, a), nu));
      fam.push_back(std::move(d));
    }
    degree = f.max_degree() + eta.total();
  }
  std::size_t find(const MultiIndex& nu) const {
    for (std::size_t i = 0; i < index.size(); ++i)
      if (index[i] == nu) return i;
    throw InvalidInput("multi-index not in lower set");
  }
  void eval(std::size_t a, const Vec& x, std::vector<double>& out) const {
    out.resize(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) out[i] = fam[a][i](x);
  }
};

// Smooth partition of unity over the Gaussian terms of a density, used to
// split integrands that are not linear in the terms (absolute values).
inline double term_share(const PolyGaussianDensity& f, std::size_t a, const Vec& x) {
  double lmax = -INFINITY;
  thread_local std::vector<double> l;
  l.resize(f.terms().size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    const auto& t = f.terms()[i];
    l[i] = -0.5 * norm2(x - t.center) / t.width;
    lmax = std::max(lmax, l[i]);
  }
  double s = 0.0;
  for (double v : l) s += std::exp(v - lmax);
  return std::exp(l[a] - lmax) / s;
}

struct NuPair {
  std::size_t nu, rest;
  double c;
};

inline std::vector<NuPair> nu_pairs(const DerivativeFamily& fam, const MultiIndex& eta,
                                    bool inner_only) {
  std::vector<NuPair> out;
  for (const auto& nu : fam.index) {
    if (inner_only && (nu.is_zero() || nu == eta)) continue;
    out.push_back({fam.find(nu), fam.find(eta - nu), binomial(eta, nu)});
  }
  return out;
}

}  // namespace detail

/// Both halves of the bilinear weak form:
/// gain = 1/2 int int int (f g_* phi' + f_* g phi'_*) h |u|^alpha,
/// loss = 1/2 int int (f g_* phi + f_* g phi_*) |u|^alpha.
/// The two products are integrated on separately adapted rules.
inline GainLoss weak_gain_loss(const PolyGaussianDensity& f, const PolyGaussianDensity& g,
                               const TestFunction& phi, const CollisionKernel& k,
                               const PairOptions& opt = {}) {
  const SphereRule sr = detail::sphere_for(k, opt);
  const double deg = f.max_degree() + g.max_degree();
  const auto fg = term_pair_integrate<2>(
      f, g, k.alpha, deg, opt, [&](std::size_t a, std::size_t b, const Vec& x, const Vec& y,
                                   auto& acc) {
        const double w = f.terms()[a].eval(x) * g.terms()[b].eval(y);
        if (w == 0.0) return;
        acc[0] = w * sphere_split(phi, x, y, sr).first;
        acc[1] = w * phi(x);
      });
  const auto gf = term_pair_integrate<2>(
      g, f, k.alpha, deg, opt, [&](std::size_t a, std::size_t b, const Vec& x, const Vec& y,
                                   auto& acc) {
        const double w = g.terms()[a].eval(x) * f.terms()[b].eval(y);
        if (w == 0.0) return;
        acc[0] = w * sphere_split(phi, x, y, sr).second;
        acc[1] = w * phi(y);
      });
  return {0.5 * (fg[0] + gf[0]), 0.5 * (fg[1] + gf[1])};
}

inline double weak_gain(const PolyGaussianDensity& f, const PolyGaussianDensity& g,
                        const TestFunction& phi, const CollisionKernel& k,
                        const PairOptions& opt = {}) {
  return weak_gain_loss(f, g, phi, k, opt).gain;
}

inline double weak_loss(const PolyGaussianDensity& f, const PolyGaussianDensity& g,
                        const TestFunction& phi, const CollisionKernel& k,
                        const PairOptions& opt = {}) {
  return weak_gain_loss(f, g, phi, k, opt).loss;
}

/// int d^eta Q(f,f) phi in the derivative-action form
///   int int f_* d^eta f A[phi] |u|^alpha
///   + 1/2 sum_{0<nu<eta} (eta nu) int int d^nu f d^{eta-nu} f_* A[phi] |u|^alpha.
/// For eta = 0 the leading term carries a factor 1/2: it is the single
/// nu = 0 = eta term of the Leibniz sum.
inline double weak_derivative_action(const PolyGaussianDensity& f, const MultiIndex& eta,
                                     const TestFunction& phi, const CollisionKernel& k,
                                     const PairOptions& opt = {}) {
  const detail::DerivativeFamily fam(f, eta);
  const SphereRule sr = detail::sphere_for(k, opt);
  const std::size_t top = fam.find(eta), zero = fam.find(MultiIndex{});
  const auto inner = detail::nu_pairs(fam, eta, true);
  const double lead = eta.is_zero() ? 0.5 : 1.0;
  const auto s = term_pair_integrate<1>(
      f, f, k.alpha, 2.0 * fam.degree, opt,
      [&](std::size_t a, std::size_t b, const Vec& x, const Vec& y, auto& acc) {
        thread_local std::vector<double> dx, dy;
        fam.eval(a, x, dx);
        fam.eval(b, y, dy);
        double c = lead * dy[zero] * dx[top];
        for (const auto& t : inner) c += 0.5 * t.c * dx[t.nu] * dy[t.rest];
        if (c == 0.0) return;
        acc[0] = c * (a_plus(phi, x, y, sr) - phi(x) - phi(y));
      });
  return s[0];
}

/// Same quantity through the Leibniz expansion
/// sum_{nu<=eta} (eta nu) [gain - loss](d^nu f, d^{eta-nu} f, phi), keeping
/// both halves of every bilinear form and the phi' and phi'_* averages
/// separate.
inline double leibniz_action(const PolyGaussianDensity& f, const MultiIndex& eta,
                             const TestFunction& phi, const CollisionKernel& k,
                             const PairOptions& opt = {}) {
  const detail::DerivativeFamily fam(f, eta);
  const SphereRule sr = detail::sphere_for(k, opt);
  const auto all = detail::nu_pairs(fam, eta, false);
  const auto s = term_pair_integrate<2>(
      f, f, k.alpha, 2.0 * fam.degree, opt,
      [&](std::size_t a, std::size_t b, const Vec& x, const Vec& y, auto& acc) {
        thread_local std::vector<double> dx, dy;
        fam.eval(a, x, dx);
        fam.eval(b, y, dy);
        // F = d^nu f at x with G = d^{eta-nu} f at y, and the swapped product.
        double fg = 0.0, gf = 0.0;
        for (const auto& t : all) {
          fg += t.c * dx[t.nu] * dy[t.rest];
          gf += t.c * dy[t.nu] * dx[t.rest];
        }
        if (fg == 0.0 && gf == 0.0) return;
        const auto [sp, sm] = sphere_split(phi, x, y, sr);
        acc[0] = 0.5 * (fg * sp + gf * sm);
        acc[1] = 0.5 * (fg * phi(x) + gf * phi(y));
      });
  return s[0] - s[1];
}

/// Integration by parts: (-1)^{|eta|} int Q(f,f) d^eta phi. Needs a
/// polynomial phi.
inline double ibp_action(const PolyGaussianDensity& f, const MultiIndex& eta,
                         const TestFunction& phi, const CollisionKernel& k,
                         const PairOptions& opt = {}) {
  const TestFunction dphi = phi.derivative(eta);
  const double sign = eta.total() % 2 == 0 ? 1.0 : -1.0;
  return sign * weak_gain_loss(f, f, dphi, k, opt).net();
}

namespace detail {

struct SignedBoundParts {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline SignedBoundParts signed_bound_parts(const PolyGaussianDensity& f, const MultiIndex& eta,
                                           const TestFunction& phi, const CollisionKernel& k,
                                           const PairOptions& opt) {
  const DerivativeFamily fam(f, eta);
  const SphereRule sr = sphere_for(k, opt);
  const std::size_t top = fam.find(eta), zero = fam.find(MultiIndex{});
  const auto all = nu_pairs(fam, eta, false);
  const auto inner = nu_pairs(fam, eta, true);
  std::vector<PolyGaussianDensity> full;
  for (const auto& nu : fam.index) full.push_back(differentiate(f, nu));
  const PolyGaussianDensity& top_d = full[top];
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  const auto s = term_pair_integrate<2>(
      f, f, k.alpha, 2.0 * fam.degree, opt,
      [&](std::size_t a, std::size_t b, const Vec& x, const Vec& y, auto& acc) {
        thread_local std::vector<double> dx, dy;
        fam.eval(a, x, dx);
        fam.eval(b, y, dy);
        double fg = 0.0, gf = 0.0;
        for (const auto& t : all) {
          fg += t.c * dx[t.nu] * dy[t.rest];
          gf += t.c * dy[t.nu] * dx[t.rest];
        }
        const double px = phi(x), py = phi(y);
        const double sx = sgn(top_d(x)), sy = sgn(top_d(y));
        if (fg != 0.0 || gf != 0.0) {
          double gp = 0.0, gm = 0.0;
          sphere_visit(sr, x, y, [&](const Vec& xp, const Vec& yp, double w) {
            gp += w * sgn(top_d(xp)) * phi(xp);
            gm += w * sgn(top_d(yp)) * phi(yp);
          });
          acc[0] = 0.5 * (fg * (gp - sx * px) + gf * (gm - sy * py));
        }
        // The bound uses |d^nu f| of the whole density; each term-pair rule
        // takes its share of that integrand.
        const double share = f.terms().size() == 1
                                 ? 1.0
                                 : term_share(f, a, x) * term_share(f, b, y);
        thread_local std::vector<double> Dx, Dy;
        Dx.resize(full.size());
        Dy.resize(full.size());
        for (std::size_t i = 0; i < full.size(); ++i) {
          Dx[i] = full[i](x);
          Dy[i] = full[i](y);
        }
        const double A = a_plus(phi, x, y, sr) - px - py;
        const double t = std::abs(Dx[top]) * Dy[zero];
        double rhs = t * A + 2.0 * t * py;
        for (const auto& in : inner) {
          const double m = in.c * std::abs(Dx[in.nu] * Dy[in.rest]);
          rhs += 0.5 * m * A + m * py;
        }
        rhs *= share;
        acc[1] = rhs;
      });
  return {s[0], s[1]};
}

}  // namespace detail
/// LHS = int d^eta Q(f,f) sgn(d^eta f) phi by direct quadrature; RHS = the
/// four-term bound built from |d^nu f| and A[phi]. The error estimate is the
/// change of both sides under a coarser rule.
inline WeakFormReport signed_bound_check(const PolyGaussianDensity& f, const MultiIndex& eta,
                                         const TestFunction& phi, const CollisionKernel& k,
                                         const PairOptions& opt = {}, std::string case_id = "") {
  require(phi.isotropic(), "signed bound check needs an isotropic nonnegative phi");
  const auto fine = detail::signed_bound_parts(f, eta, phi, k, opt);
  const auto coarse = detail::signed_bound_parts(f, eta, phi, k, opt.coarser());
  WeakFormReport rep;
  rep.lhs = fine.lhs;
  rep.rhs = fine.rhs;
  rep.margin = fine.rhs - fine.lhs;
  rep.err_estimate = std::abs(fine.lhs - coarse.lhs) + std::abs(fine.rhs - coarse.rhs);
  rep.case_id = std::move(case_id);
  rep.params = {{"eta", eta.str(f.dimension())},
                {"phi", phi.name()},
                {"alpha", k.alpha},
                {"cross_section", k.cross_section.name},
                {"n", f.dimension()}};
  return rep;
}

}  // namespace boltzmom
