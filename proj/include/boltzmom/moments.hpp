#pragma once

// Moment-table algebra: Leibniz-weighted products, the S_p and Z_p
// aggregates, geometric envelopes and tail-rate estimates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "moment_table.hpp"
#include "multi_index.hpp"
#include "povzner.hpp"
#include "weak_form.hpp"

namespace boltzmom {

enum class Scale { raw, normalized };

/// Table renormalized with parameter b; m entries are untouched.
inline MomentTable normalize(const MomentTable& m, double b) {
  require(b > 0.0, "normalize needs b > 0");
  return m.normalized(b);
}

/// m_p recovered from z_p and b.
inline double denormalize(double z, double p, double b) { return z * std::tgamma(p + b); }

namespace detail {

inline MomentValue lookup(const MomentTable& t, const MultiIndex& nu, double p, Scale s,
                          bool allow_interpolation, double time) {
  if (!allow_interpolation) {
    const double v = s == Scale::raw ? t.m(nu, p, time) : t.z(nu, p, time);
    return {v, false};
  }
  return s == Scale::raw ? t.m_at(nu, p, time) : t.z_at(nu, p, time);
}

}  // namespace detail

struct ProductSumOptions {
  Scale scale = Scale::raw;
  bool allow_interpolation = false;
  double t = 0.0;
};

/// sum over nu <= eta (nu != eta when strict) of (eta choose nu) x^nu_p x^{eta-nu}_q.
inline MomentValue product_sum(const MomentTable& m, const MultiIndex& eta, double p, double q,
                               bool strict, const ProductSumOptions& opt = {}) {
  MomentValue out;
  for (const auto& nu : lower_set(eta)) {
    if (strict && nu == eta) continue;
    const auto a = detail::lookup(m, nu, p, opt.scale, opt.allow_interpolation, opt.t);
    const auto b = detail::lookup(m, eta - nu, q, opt.scale, opt.allow_interpolation, opt.t);
    out.value += binomial(eta, nu) * a.value * b.value;
    out.interpolated = out.interpolated || a.interpolated || b.interpolated;
  }
  return out;
}

/// sum_{k=1}^{k_p} (p choose k) [(m_k m_{p-k+a/2}) + (m_{k+a/2} m_{p-k})] under the
/// eta-Leibniz product.
inline MomentValue s_p(const MomentTable& m, const MultiIndex& eta, double p, double alpha,
                       bool allow_interpolation = true, double t = 0.0) {
  require(p > 1.0, "S_p needs p > 1");
  const ProductSumOptions opt{Scale::raw, allow_interpolation, t};
  MomentValue out;
  for (int k = 1; k <= binomial_split_order(p); ++k) {
    const auto x = product_sum(m, eta, k, p - k + 0.5 * alpha, false, opt);
    const auto y = product_sum(m, eta, k + 0.5 * alpha, p - k, false, opt);
    out.value += gen_binomial(p, k) * (x.value + y.value);
    out.interpolated = out.interpolated || x.interpolated || y.interpolated;
  }
  return out;
}

/// max over 1 <= k <= k_p of the normalized products (z_k z_{p-k+a/2}) and
/// (z_{k+a/2} z_{p-k}).
inline MomentValue z_cap(const MomentTable& z, const MultiIndex& eta, double p, double alpha,
                         bool allow_interpolation = true, double t = 0.0) {
  require(p > 1.0, "Z_p needs p > 1");
  const ProductSumOptions opt{Scale::normalized, allow_interpolation, t};
  MomentValue out;
  for (int k = 1; k <= binomial_split_order(p); ++k) {
    for (const auto& cand : {product_sum(z, eta, k, p - k + 0.5 * alpha, false, opt),
                             product_sum(z, eta, k + 0.5 * alpha, p - k, false, opt)}) {
      out.value = std::max(out.value, cand.value);
      out.interpolated = out.interpolated || cand.interpolated;
    }
  }
  return out;
}

/// Empirical constant A in S_p <= A Gamma(p + a/2 + 2b) Z_p over a p-grid.
/// lhs is the largest ratio (the smallest admissible A), rhs is `a_bound`.
inline WeakFormReport lemma7_check(const MomentTable& table, const MultiIndex& eta,
                                   const std::vector<double>& ps, double alpha,
                                   double a_bound = std::numeric_limits<double>::infinity(),
                                   double t = 0.0) {
  require(!ps.empty(), "lemma7 check needs at least one order");
  WeakFormReport r;
  r.case_id = "lemma7_eta" + eta.str(table.n);
  nlohmann::json ratios = nlohmann::json::array();
  bool degenerate = false, interpolated = false;
  double worst = 0.0;
  for (double p : ps) {
    const auto s = s_p(table, eta, p, alpha, true, t);
    const auto zc = z_cap(table, eta, p, alpha, true, t);
    interpolated = interpolated || s.interpolated || zc.interpolated;
    if (zc.value == 0.0) {
      degenerate = true;
      ratios.push_back({{"p", p}, {"A", nullptr}});
      continue;
    }
    const double a = s.value / (std::tgamma(p + 0.5 * alpha + 2.0 * table.b) * zc.value);
    worst = std::max(worst, a);
    ratios.push_back({{"p", p}, {"A", a}, {"S", s.value}, {"Z", zc.value}});
  }
  r.lhs = worst;
  r.rhs = a_bound;
  r.margin = a_bound - worst;
  r.params = {{"eta", eta.str(table.n)}, {"alpha", alpha},       {"b", table.b},
              {"ratios", ratios},        {"degenerate", degenerate}, {"interpolated", interpolated}};
  return r;
}

/// z_{1+a/2} <= 1 + z_{3/2}. Asserted only when both entries are stored.
inline WeakFormReport low_order_interpolation_check(const MomentTable& table,
                                                    const MultiIndex& eta, double alpha,
                                                    double t = 0.0) {
  const double p = 1.0 + 0.5 * alpha;
  WeakFormReport r;
  r.case_id = "low_order_eta" + eta.str(table.n);
  const auto lhs = table.z_at(eta, p, t);
  r.lhs = lhs.value;
  r.rhs = 1.0 + table.z(eta, 1.5, t);
  r.margin = r.rhs - r.lhs;
  r.params = {{"eta", eta.str(table.n)}, {"alpha", alpha}, {"direct", !lhs.interpolated}};
  return r;
}

struct GeometricBound {
  double K = 0.0;
  double Q = 0.0;
  std::vector<double> p_grid;
  /// log z_p - log(K Q^p); all <= 0 after inflation.
  std::vector<double> residuals;
  double r2 = 0.0;
  /// False when the local growth rate keeps increasing (super-geometric).
  bool geometric = true;
};

/// Least-squares fit of log z_p against p, with K inflated to an envelope.
inline GeometricBound fit_geometric_bound(const MomentTable& z, const MultiIndex& nu,
                                          std::vector<double> p_grid, double t = 0.0) {
  require(p_grid.size() >= 4, "geometric fit needs at least 4 grid points");
  std::sort(p_grid.begin(), p_grid.end());
  std::vector<double> ly;
  for (double p : p_grid) {
    const double v = z.z(nu, p, t);
    require(v > 0.0, "geometric fit needs positive z entries");
    ly.push_back(std::log(v));
  }
  const SlopeFit f = least_squares(p_grid, ly);
  GeometricBound g;
  g.p_grid = p_grid;
  g.Q = std::exp(f.slope);
  g.r2 = f.r2;
  double lift = -INFINITY;
  for (std::size_t i = 0; i < p_grid.size(); ++i)
    lift = std::max(lift, ly[i] - f.intercept - f.slope * p_grid[i]);
  const double log_k = f.intercept + lift;
  g.K = std::exp(log_k);
  for (std::size_t i = 0; i < p_grid.size(); ++i)
    g.residuals.push_back(ly[i] - log_k - f.slope * p_grid[i]);
  const std::size_t m = p_grid.size();
  const double first = (ly[1] - ly[0]) / (p_grid[1] - p_grid[0]);
  const double last = (ly[m - 1] - ly[m - 2]) / (p_grid[m - 1] - p_grid[m - 2]);
  g.geometric = last <= first + 1e-6;
  return g;
}

struct TailEstimate {
  double s = 2.0;
  /// Estimated supremal rate; +inf when every rate is admissible.
  double r_bar = 0.0;
  std::string method = "series-ratio";
  double t_begin = 0.0;
  double t_end = 0.0;
  int k_max = 25;
  /// Slope of log(a_{k+1}/a_k) against log k over the tail window.
  double ratio_trend = 0.0;

  nlohmann::json to_json() const {
    return {{"s", s},
            {"r_bar", std::isinf(r_bar) ? nlohmann::json("inf") : nlohmann::json(r_bar)},
            {"method", method},
            {"horizon", {t_begin, t_end}},
            {"k_max", k_max},
            {"ratio_trend", ratio_trend}};
  }
};

namespace detail {

/// Radius of convergence of sum a_k r^k from the ratios a_{k+1}/a_k over the
/// last `window` terms, extrapolated in 1/k.
inline double series_radius(const std::vector<double>& a, int window, double& trend) {
  const int kmax = static_cast<int>(a.size()) - 1;
  std::vector<double> lk, lr, inv, ratio;
  for (int k = std::max(1, kmax - window); k < kmax; ++k) {
    if (a[k] <= 0.0 || a[k + 1] <= 0.0) continue;
    const double rk = a[k + 1] / a[k];
    lk.push_back(std::log(k));
    lr.push_back(std::log(rk));
    inv.push_back(1.0 / k);
    ratio.push_back(rk);
  }
  if (ratio.size() < 3) {
    trend = 0.0;
    return INFINITY;
  }
  trend = least_squares(lk, lr).slope;
  if (trend < -0.25) return INFINITY;
  if (trend > 0.25) return 0.0;
  const double limit = least_squares(inv, ratio).intercept;
  return limit > 0.0 ? 1.0 / limit : INFINITY;
}

}  // namespace detail

/// r_bar from sum_k delta^nu m_{sk/2} r^k / k!, minimized over the table's times.
inline TailEstimate tail_order_estimate(const MomentTable& m, const MultiIndex& nu, double s,
                                        int k_max = 25, int window = 10) {
  require(s > 0.0, "tail order needs s > 0");
  require(k_max >= 10, "tail order needs k_max >= 10");
  TailEstimate e;
  e.s = s;
  e.k_max = k_max;
  e.r_bar = INFINITY;
  const auto times = m.times();
  require(!times.empty(), "tail order needs a non-empty moment table");
  e.t_begin = times.front();
  e.t_end = times.back();
  for (double t : times) {
    std::vector<double> a(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
      a[k] = std::exp(std::log(m.m_at(nu, 0.5 * s * k, t).value) - std::lgamma(k + 1.0));
    double trend = 0.0;
    const double r = detail::series_radius(a, window, trend);
    if (r <= e.r_bar) {
      e.r_bar = r;
      e.ratio_trend = trend;
    }
  }
  return e;
}

}  // namespace boltzmom
