#pragma once

// Deterministic integration primitives: Gauss-Jacobi line rules with
// singular endpoint weights, tensor Gauss-Hermite velocity rules, and an
// interval-bisection Gauss-Kronrod integrator used as an independent oracle.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "common.hpp"

namespace boltzmom {

/// Gauss rule for the weight (1-z)^a (1+z)^b on (-1,1).
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double exponent_a = 0.0;
  double exponent_b = 0.0;

  std::size_t size() const { return nodes.size(); }
  /// Highest polynomial degree integrated exactly against the weight.
  int degree() const { return 2 * static_cast<int>(nodes.size()) - 1; }

  template <class Fn>
  double integrate(Fn&& fn) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * fn(nodes[i]);
    return s;
  }
};

namespace detail {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
inline void golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag_sq,
                         double log_mass, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  const Eigen::Index n = static_cast<Eigen::Index>(diag.size());
  Eigen::VectorXd d(n);
  Eigen::VectorXd e(std::max<Eigen::Index>(n - 1, 1));
  for (Eigen::Index i = 0; i < n; ++i) d[i] = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = std::sqrt(offdiag_sq[static_cast<std::size_t>(i)]);
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    nodes[0] = d[0];
    weights[0] = std::exp(log_mass);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e.head(n - 1), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalFailure("Golub-Welsch eigen-decomposition failed");
  const double mass = std::exp(log_mass);
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = mass * v * v;
  }
}

}  // namespace detail

/// Gauss-Jacobi rule with `order` nodes. `log_scale` multiplies every weight
/// by exp(log_scale); it lets callers fold huge factors such as 2^{-p} into
/// the rule without overflowing the weight mass.
inline LineRule build_jacobi_rule(int order, double a, double b, double log_scale = 0.0) {
  require(order >= 1, "jacobi rule order must be >= 1");
  require(a > -1.0 && b > -1.0, "jacobi exponents must exceed -1 (non-integrable weight)");
  const auto n = static_cast<std::size_t>(order);
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  const double ab = a + b;
  diag[0] = (b - a) / (ab + 2.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    diag[k] = (b * b - a * a) / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    if (k == 1) {
      off[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      off[k - 1] = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  const double log_mass = (ab + 1.0) * std::log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) -
                          log_gamma(ab + 2.0) + log_scale;
  LineRule rule;
  rule.exponent_a = a;
  rule.exponent_b = b;
  detail::golub_welsch(diag, off, log_mass, rule.nodes, rule.weights);
  return rule;
}

inline LineRule build_legendre_rule(int order) { return build_jacobi_rule(order, 0.0, 0.0); }

/// Gauss-Hermite nodes/weights for the weight exp(-x^2) on the real line.
inline void hermite_rule(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  require(order >= 1, "hermite rule order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  std::vector<double> diag(n, 0.0), off(n > 1 ? n - 1 : 0);
  for (std::size_t k = 1; k < n; ++k) off[k - 1] = 0.5 * static_cast<double>(k);
  detail::golub_welsch(diag, off, 0.5 * std::log(pi), nodes, weights);
}

/// Tensor Gauss-Hermite rule in R^n adapted to exp(-|x-center|^2/scale^2).
struct VelocityRule {
  int dimension = 3;
  int order = 16;
  double scale = 1.0;
  Vec center{};
  std::vector<Vec> nodes;
  /// Weights for integrands already stripped of the Gaussian factor.
  std::vector<double> weights;
  /// Weights for full integrands (Gaussian factor divided back out).
  std::vector<double> full_weights;

  /// Total polynomial degree integrated exactly against the Gaussian weight.
  int degree() const { return 2 * order - 1; }

  template <class Fn>
  double integrate_weighted(Fn&& poly) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * poly(nodes[i]);
    return s;
  }
  template <class Fn>
  double integrate(Fn&& fn) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += full_weights[i] * fn(nodes[i]);
    return s;
  }
};

inline VelocityRule build_velocity_rule(int n, int order, double scale, Vec center = {}) {
  check_dimension(n);
  require(order >= 1, "velocity rule order must be >= 1");
  require(scale > 0.0, "velocity rule scale must be positive");
  std::vector<double> x, w;
  hermite_rule(order, x, w);
  VelocityRule rule;
  rule.dimension = n;
  rule.order = order;
  rule.scale = scale;
  rule.center = center;
  const std::size_t m = x.size();
  const std::size_t total = n == 2 ? m * m : m * m * m;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  rule.full_weights.reserve(total);
  const double jac = std::pow(scale, n);
  auto push = [&](std::array<std::size_t, 3> idx) {
    Vec p;
    double wt = jac;
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const double t = x[idx[static_cast<std::size_t>(d)]];
      p[static_cast<std::size_t>(d)] = center[static_cast<std::size_t>(d)] + scale * t;
      wt *= w[idx[static_cast<std::size_t>(d)]];
      r2 += t * t;
    }
    rule.nodes.push_back(p);
    rule.weights.push_back(wt);
    rule.full_weights.push_back(wt * std::exp(r2));
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (n == 2) {
        push({i, j, 0});
      } else {
        for (std::size_t k = 0; k < m; ++k) push({i, j, k});
      }
    }
  return rule;
}

/// Result of an adaptive integration.
struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Raised when the adaptive integrator exhausts its interval budget.
class ConvergenceError : public NumericalFailure {
 public:
  ConvergenceError(const std::string& what, IntegrationResult partial)
      : NumericalFailure(what), partial_(partial) {}
  const IntegrationResult& partial() const { return partial_; }

 private:
  IntegrationResult partial_;
};

namespace detail {

inline constexpr std::array<double, 8> gk_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_wk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class Fn>
Segment gauss_kronrod15(Fn& fn, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = fn(c);
  double k = fc * gk_wk[7];
  double g = fc * gk_wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk_x[static_cast<std::size_t>(j)];
    const double f1 = fn(c - dx);
    const double f2 = fn(c + dx);
    k += gk_wk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) g += gk_wg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
  bool throw_on_failure = true;
};

/// Globally adaptive Gauss-Kronrod (7/15) with interval bisection. Never
/// evaluates endpoints, so integrable endpoint singularities are allowed.
template <class Fn>
IntegrationResult adaptive_integrate(Fn&& fn, double a, double b, const AdaptiveOptions& opt) {
  require(opt.abs_tol > 0.0 || opt.rel_tol > 0.0, "adaptive_integrate needs a positive tolerance");
  IntegrationResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod15(fn, a, b);
  double total = first.value, err = first.error;
  heap.push(first);
  int count = 1;
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (err > target() && count < opt.max_intervals) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    auto left = detail::gauss_kronrod15(fn, worst.a, mid);
    auto right = detail::gauss_kronrod15(fn, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  err = 0.0;
  for (auto h = heap; !h.empty(); h.pop()) {
    total += h.top().value;
    err += h.top().error;
  }
  res.value = total;
  res.error = err;
  res.intervals = count;
  res.converged = err <= target();
  if (!res.converged && opt.throw_on_failure)
    throw ConvergenceError("adaptive_integrate did not converge: error estimate " +
                               std::to_string(err) + " after " + std::to_string(count) +
                               " intervals",
                           res);
  return res;
}

template <class Fn>
IntegrationResult adaptive_integrate(Fn&& fn, double a, double b, double tol) {
  AdaptiveOptions opt;
  opt.abs_tol = tol;
  return adaptive_integrate(std::forward<Fn>(fn), a, b, opt);
}

/// Composite Gauss-Legendre rule on [a,b] with equal panels.
inline LineRule composite_legendre(double a, double b, int panels, int order) {
  const LineRule base = build_legendre_rule(order);
  LineRule out;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t i = 0; i < base.size(); ++i) {
      out.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

}  // namespace boltzmom
