#pragma once

// Differential inequalities for normalized derivative moments, the induction
// producing uniform geometric bounds K Q^p, and the equality-version ODE
// system used as a cross-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>
#include <map>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "common.hpp"
#include "comparison.hpp"
#include "json.hpp"
#include "kernel.hpp"
#include "moment_table.hpp"
#include "multi_index.hpp"
#include "povzner.hpp"

namespace boltzmom {

struct HierarchyParams {
  double alpha = 1.0;
  AngularCrossSection cross_section = hard_sphere_cross_section(3);
  /// Normalization parameter; <= 0 selects epsilon/4.
  double b = -1.0;
  double k0 = 1.0;
  double k1 = 1.0;
  double k_alpha = 1.0;
  /// sup_t of delta^eta m_0.
  double m0_sup = 1.0;
  /// Bound on delta^nu m_0, delta^nu m_{alpha/2} and delta^nu m_1 for all nu <= eta.
  double w_norm = 1.0;
  double p_max = 20.0;
  MultiIndex eta;
  /// Initial growth hypothesis delta^nu z_p(0) <= k q^p.
  double k = 1.0;
  double q = 1.0;

  double epsilon() const { return cross_section.epsilon(); }
  double b_value() const { return b > 0.0 ? b : 0.25 * epsilon(); }

  void validate() const {
    require(alpha > 0.0 && alpha <= 1.0, "hierarchy needs alpha in (0, 1]");
    require(b_value() < 0.5 * epsilon(), "hierarchy needs b < epsilon/2 (threshold decay)");
    require(k0 > 0.0 && k1 > 0.0 && k_alpha > 0.0, "hierarchy needs k0, k1, k_alpha > 0");
    require(m0_sup > 0.0 && w_norm > 0.0, "hierarchy needs positive norm bounds");
    require(p_max >= 3.0, "hierarchy needs p_max >= 3");
    require(k > 0.0 && q >= 1.0, "hierarchy needs k > 0 and q >= 1");
  }

  /// {3/2, 2, 5/2, ..., p_max}.
  std::vector<double> grid(double upto = -1.0) const {
    const double top = upto > 0.0 ? upto : p_max;
    std::vector<double> g;
    for (double p = 1.5; p <= top + 1e-12; p += 0.5) g.push_back(p);
    return g;
  }
};

/// Bound on delta^mu z_q for any mu <= eta and order q.
using BoundLookup = std::function<double(const MultiIndex&, double)>;

struct OdeCoefficients {
  double p = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
  double c = 0.0;
  double d_star = 0.0;
  nlohmann::json provenance = nlohmann::json::object();
};

/// a*_p = |delta^eta m_0|^{-alpha/2p} (1 - gamma_p) k_alpha Gamma(p+b)^{alpha/2p}.
inline double a_star(const HierarchyParams& hp, double p, double gamma) {
  const double e = hp.alpha / (2.0 * p);
  return std::exp(-e * std::log(hp.m0_sup) + e * std::lgamma(p + hp.b_value())) *
         (1.0 - gamma) * hp.k_alpha;
}

namespace detail {

inline double z_norm_bound(const HierarchyParams& hp, double q) {
  return hp.w_norm / std::tgamma(q + hp.b_value());
}

/// Running log(sum exp(x_i)).
struct LogSum {
  double top = -INFINITY;
  double acc = 0.0;
  void add(double x) {
    if (x == -INFINITY) return;
    if (x <= top) {
      acc += std::exp(x - top);
    } else {
      acc = acc * std::exp(top - x) + 1.0;
      top = x;
    }
  }
  double value() const { return top == -INFINITY ? -INFINITY : top + std::log(acc); }
};

struct LogCoefficients {
  double a_star = 0.0;
  double c = 0.0;
  double log_b = -INFINITY;
  double log_d = -INFINITY;
  double log_zcap = -INFINITY;
};

/// Coefficients with every moment bound handled in log form, so orders far
/// past the overflow range of K Q^p stay representable. `log_z(mu, q)` is
/// only queried for q > 1.
template <class LogZ>
LogCoefficients log_coefficients(double p, const HierarchyParams& hp, const MultiIndex& nu,
                                 double gamma, const LogZ& log_z) {
  require(p >= 1.5 && std::abs(2.0 * p - std::round(2.0 * p)) < 1e-12,
          "coefficients need p in {3/2, 2, 5/2, ...}");
  require(gamma > 0.0 && gamma < 1.0, "coefficients need gamma_p in (0, 1)");
  const double al = hp.alpha, b = hp.b_value(), logW = std::log(hp.w_norm);
  auto lz = [&](const MultiIndex& mu, double q) {
    return q <= 1.0 ? logW - std::lgamma(q + b) : log_z(mu, q);
  };
  auto prod = [&](double x, double y, bool strict) {
    LogSum s;
    for (const auto& mu : lower_set(nu)) {
      if (strict && mu == nu) continue;
      s.add(std::log(binomial(nu, mu)) + lz(mu, x) + lz(nu - mu, y));
    }
    return s.value();
  };
  // Lower-derivative terms: the z factor carries the strictly lower index.
  auto lower = [&](double x) {
    LogSum s;
    for (const auto& mu : lower_set(nu))
      if (mu != nu) s.add(std::log(binomial(nu, mu)) + logW + lz(mu, x));
    return s.value();
  };

  LogCoefficients co;
  co.c = al / (2.0 * p);
  co.a_star = a_star(hp, p, gamma);
  const double log_pre = std::log(gamma * hp.k0) + (0.5 * al + b) * std::log(p);
  if (p == 1.5) {
    const double log_half = logW - std::lgamma(0.5 + b);
    co.log_d = log_pre + log_half;
    LogSum z;
    z.add(prod(1.0, 0.5 * (1.0 + al), false));
    z.add(prod(1.0 + 0.5 * al, 0.5, true));
    z.add(log_half);
    co.log_zcap = z.value();
  } else {
    for (int kk = 1; kk <= binomial_split_order(p); ++kk)
      co.log_zcap = std::max({co.log_zcap, prod(kk, p - kk + 0.5 * al, false),
                              prod(kk + 0.5 * al, p - kk, false)});
  }
  LogSum bs;
  bs.add(log_pre + co.log_zcap);
  bs.add(std::log(hp.k1) + 0.5 * al * std::log(p) + lower(p + 0.5 * al));
  bs.add(lower(p));
  co.log_b = bs.value();
  return co;
}

}  // namespace detail

/// Coefficients of y' + a y^{1+c} <= d y + b for y = delta^nu z_p. `bound`
/// supplies delta^mu z_q for the orders the right side needs; orders <= 1 are
/// taken from the norm bound.
inline OdeCoefficients assemble_coefficients(double p, const HierarchyParams& hp,
                                             const MultiIndex& nu, double gamma,
                                             const BoundLookup& bound) {
  const auto lc = detail::log_coefficients(
      p, hp, nu, gamma, [&](const MultiIndex& mu, double q) { return std::log(bound(mu, q)); });
  OdeCoefficients co;
  co.p = p;
  co.a_star = lc.a_star;
  co.c = lc.c;
  co.b_star = std::exp(lc.log_b);
  co.d_star = std::exp(lc.log_d);
  co.provenance = {{"gamma_p", gamma},    {"k_alpha", hp.k_alpha}, {"k0", hp.k0},
                   {"k1", hp.k1},         {"b", hp.b_value()},     {"m0_sup", hp.m0_sup},
                   {"w_norm", hp.w_norm}, {"nu", nu.str()},        {"z_cap", std::exp(lc.log_zcap)}};
  return co;
}

/// Uniform bound on delta^nu z_p for one multi-index.
struct LevelBound {
  MultiIndex nu;
  double K = 0.0;
  double Q = 0.0;
  double p0 = 0.0;
  /// log of the Lemma-9 bound at each computed order.
  std::map<double, double> log_bound;
  std::map<double, std::string> trace;
  /// (2^{|nu|} A1_p K1 Q^{alpha/2} + A2_p / K) <= 1 for every checked p > p0.
  bool tail_contracts = false;
  /// Smallest order the threshold criterion needs; above p_limit the
  /// induction stops without contracting.
  double p0_required = 0.0;

  double envelope(double p) const { return K * std::pow(Q, p); }
  double log_envelope(double p) const { return std::log(K) + p * std::log(Q); }
  double bound(double p) const { return std::exp(log_bound.at(p)); }
};

struct BoundPipelineResult {
  double K = 0.0;
  double Q = 0.0;
  double p0 = 0.0;
  std::vector<LevelBound> levels;

  double envelope(double p) const { return K * std::pow(Q, p); }
  const LevelBound& level(const MultiIndex& nu) const {
    for (const auto& l : levels)
      if (l.nu == nu) return l;
    throw InvalidInput("no bound level for nu=" + nu.str());
  }

  /// Per-order table rows up to `p_max`: nu, p, bound, envelope, branch.
  std::string to_csv(double p_max) const {
    std::ostringstream os;
    os << std::setprecision(12) << "nu,p,bound,envelope,branch\n";
    for (const auto& l : levels)
      for (const auto& [p, lb] : l.log_bound)
        if (p <= p_max)
          os << l.nu.str() << ',' << p << ',' << std::exp(lb) << ',' << l.envelope(p) << ','
             << l.trace.at(p) << '\n';
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json lv = nlohmann::json::array();
    for (const auto& l : levels) {
      std::size_t initial = 0;
      for (const auto& [p, br] : l.trace) initial += br == "initial";
      lv.push_back({{"nu", l.nu.str()},
                    {"K", l.K},
                    {"Q", l.Q},
                    {"p0", l.p0},
                    {"tail_contracts", l.tail_contracts},
                    {"p0_required", l.p0_required},
                    {"orders_computed", l.log_bound.size()},
                    {"orders_from_initial_datum", initial}});
    }
    return {{"K", K}, {"Q", Q}, {"p0", p0}, {"levels", lv}};
  }
};

namespace detail {

/// log z at order q > 1 from bounds on the lattice p_j = 3/2 + j/2: exact on
/// lattice points, otherwise log-linear in m = z Gamma(q+b) between the
/// neighbours, with m_1 <= w_norm as the node below 3/2.
inline double lattice_log_z(const HierarchyParams& hp, const std::vector<double>& lz, double q) {
  const double x = 2.0 * q - 3.0;
  const double j0 = std::floor(x + 1e-9);
  if (std::abs(x - j0) < 1e-9) {
    const auto j = static_cast<std::size_t>(j0);
    if (j >= lz.size()) throw InvalidInput("bound requested above computed orders");
    return lz[j];
  }
  const auto j1 = static_cast<std::size_t>(j0 + 1.0);
  if (j1 >= lz.size()) throw InvalidInput("bound requested above computed orders");
  const double b = hp.b_value();
  const double p0 = 1.5 + 0.5 * j0, p1 = p0 + 0.5;
  const double lm0 = j0 < 0.0 ? std::log(hp.w_norm) : lz[j1 - 1] + std::lgamma(p0 + b);
  const double lm1 = lz[j1] + std::lgamma(p1 + b);
  const double th = (q - p0) / 0.5;
  return (1.0 - th) * lm0 + th * lm1 - std::lgamma(q + b);
}

/// Log bounds for one index: the current index from its lattice, strictly
/// lower indices from their envelopes.
class BoundBook {
 public:
  BoundBook(const HierarchyParams& hp, const std::vector<LevelBound>& done, MultiIndex nu)
      : hp_(hp), done_(done), nu_(nu) {}

  double operator()(const MultiIndex& mu, double q) const {
    if (mu != nu_) {
      for (const auto& l : done_)
        if (l.nu == mu) return l.log_envelope(q);
      throw InvalidInput("lower bound missing for nu=" + mu.str());
    }
    return lattice_log_z(hp_, lz_, q);
  }
  void push(double log_z) { lz_.push_back(log_z); }
  std::size_t size() const { return lz_.size(); }

 private:
  const HierarchyParams& hp_;
  const std::vector<LevelBound>& done_;
  MultiIndex nu_;
  std::vector<double> lz_;
};

inline std::vector<MultiIndex> by_total_order(const MultiIndex& eta) {
  auto set = lower_set(eta);
  std::stable_sort(set.begin(), set.end(),
                   [](const MultiIndex& a, const MultiIndex& b) { return a.total() < b.total(); });
  return set;
}

}  // namespace detail

/// A1_p = k0 gamma_p p^{alpha/2+b} / a*_p; decays like p^{b - epsilon/2}.
inline double threshold_sequence(const HierarchyParams& hp, double p) {
  const double g = gamma_paper(hp.cross_section, p);
  return hp.k0 * g * std::pow(p, 0.5 * hp.alpha + hp.b_value()) / a_star(hp, p, g);
}

struct PipelineOptions {
  /// Largest order the induction may extend to while searching for p0.
  double p_limit = 10000.0;
  /// Orders beyond the computed grid where the contraction step is checked.
  double tail_limit = 1e6;
};

/// Induction on |nu| and then on p. For each nu <= eta the Lemma-9 bound is
/// computed order by order; Q is the larger of q, the lower levels' Q and the
/// observed growth rate, K makes K Q^p dominate every computed bound with
/// K >= max{1, k, K1, 2 sup A2}, and p0 is the threshold past which the
/// contraction step carries the bound to all larger p.
inline BoundPipelineResult propagate_bounds(const HierarchyParams& hp,
                                            const MomentTable* initial_z = nullptr,
                                            const PipelineOptions& opt = {}) {
  hp.validate();
  if (initial_z) {
    for (const auto& [key, e] : initial_z->entries())
      if (key.p >= 1.5 && key.nu.leq(hp.eta) && e.z > hp.k * std::pow(hp.q, key.p) * (1 + 1e-12))
        throw InvalidInput("initial moment violates z_p(0) <= k q^p at nu=" + key.nu.str() +
                           " p=" + MomentTable::format_order(key.p));
  }
  const double al = hp.alpha;
  std::map<double, double> gamma_cache;
  auto gamma = [&](double p) {
    auto it = gamma_cache.find(p);
    if (it != gamma_cache.end()) return it->second;
    return gamma_cache[p] = gamma_paper(hp.cross_section, p, p > 100.0 ? 32 : 64);
  };
  auto a1 = [&](double p) {
    return hp.k0 * gamma(p) * std::pow(p, 0.5 * al + hp.b_value()) / a_star(hp, p, gamma(p));
  };

  BoundPipelineResult out;
  for (const auto& nu : detail::by_total_order(hp.eta)) {
    LevelBound lvl;
    lvl.nu = nu;
    double K1 = 0.0, Q_low = hp.q;
    for (const auto& l : out.levels)
      if (l.nu.leq(nu)) {
        K1 = std::max(K1, l.K);
        Q_low = std::max(Q_low, l.Q);
      }
    const double two_nu = std::pow(2.0, nu.total());
    detail::BoundBook book(hp, out.levels, nu);

    double top = hp.p_max, computed = 1.0;
    while (true) {
      for (double p : hp.grid(top)) {
        if (p <= computed) continue;
        const auto co = detail::log_coefficients(p, hp, nu, gamma(p), book);
        const double ly0 = std::log(hp.k) + p * std::log(hp.q);
        double lfix;
        if (p == 1.5) {
          lfix = std::log(affine_fixed_point(co.a_star, std::exp(co.log_b), std::exp(co.log_d),
                                             co.c));
        } else {
          lfix = (co.log_b - std::log(co.a_star)) / (1.0 + co.c);
        }
        lvl.log_bound[p] = std::max(ly0, lfix);
        lvl.trace[p] = ly0 >= lfix ? "initial" : "ode";
        book.push(lvl.log_bound[p]);
        computed = p;
      }
      // Growth rate over unit steps in the upper half of the computed orders.
      double rate = -INFINITY;
      for (const auto& [p, lb] : lvl.log_bound)
        if (p >= 0.5 * top && lvl.log_bound.count(p - 1.0))
          rate = std::max(rate, lb - lvl.log_bound.at(p - 1.0));
      const double Q = std::max(Q_low, std::exp(rate));
      const double lq = std::log(Q);
      auto a2 = [&](double p) {
        return two_nu * K1 * hp.w_norm *
               (hp.k1 * std::pow(Q, 0.5 * al) * std::pow(p, 0.5 * al) + 1.0) /
               a_star(hp, p, gamma(p));
      };
      std::vector<double> tail;
      for (double p = top; p <= opt.tail_limit; p *= 1.1) tail.push_back(std::round(2.0 * p) / 2.0);
      double sup_a2 = 0.0;
      for (const auto& [p, lb] : lvl.log_bound)
        if (p >= 2.0) sup_a2 = std::max(sup_a2, a2(p));
      for (double p : tail) sup_a2 = std::max(sup_a2, a2(p));
      double logK = std::log(std::max({1.0, hp.k, K1, 2.0 * sup_a2}));
      for (const auto& [p, lb] : lvl.log_bound) logK = std::max(logK, lb - p * lq);
      const double K = std::exp(logK);
      // For nu = 0 the gain products close on the level itself.
      const double crit = two_nu * (nu.is_zero() ? K : K1) * std::pow(Q, 0.5 * al);
      double p0 = -1.0;
      for (const auto& [p, lb] : lvl.log_bound) {
        if (crit * a1(p) > 0.5) {
          p0 = -1.0;
        } else if (p0 < 0.0) {
          p0 = p;
        }
      }
      double first_bad_tail = -1.0;
      for (double p : tail)
        if (crit * a1(p) > 0.5) first_bad_tail = p;
      bool contracts = p0 > 0.0 && first_bad_tail < 0.0;
      for (double p : tail)
        if (contracts && crit * a1(p) + a2(p) / K > 1.0) contracts = false;
      lvl.K = K;
      lvl.Q = Q;
      lvl.p0 = p0;
      lvl.tail_contracts = contracts;
      lvl.p0_required = first_bad_tail > 0.0 ? first_bad_tail + 0.5 : p0;
      if (contracts || top >= opt.p_limit || first_bad_tail >= opt.p_limit) break;
      top = std::min(opt.p_limit, std::max(2.0 * top, first_bad_tail + 1.0));
    }
    out.levels.push_back(std::move(lvl));
  }
  for (const auto& l : out.levels) {
    out.K = std::max(out.K, l.K);
    out.Q = std::max(out.Q, l.Q);
    out.p0 = std::max(out.p0, l.p0);
  }
  // The shared Q may exceed a level's own; K stays valid since Q >= 1.
  return out;
}

struct TruncatedRun {
  MomentTable table;
  double t_reached = 0.0;
  bool completed = false;
};

/// Equality version of the differential inequalities for all nu <= eta on
/// the p-grid, integrated with an adaptive Dormand-Prince stepper. Orders
/// above the grid use the envelope from `bounds`.
inline TruncatedRun integrate_truncated_hierarchy(const HierarchyParams& hp,
                                                  const BoundPipelineResult& bounds,
                                                  const MomentTable* initial_z, double t_end,
                                                  const std::vector<double>& observe,
                                                  double tol = 1e-9) {
  namespace ode = boost::numeric::odeint;
  hp.validate();
  const auto nus = detail::by_total_order(hp.eta);
  const auto grid = hp.grid();
  const std::size_t np = grid.size();
  std::vector<double> gam(np);
  for (std::size_t j = 0; j < np; ++j) gam[j] = gamma_paper(hp.cross_section, grid[j]);
  using State = std::vector<double>;
  State y(nus.size() * np);
  for (std::size_t i = 0; i < nus.size(); ++i)
    for (std::size_t j = 0; j < np; ++j) {
      const double p = grid[j];
      y[i * np + j] = initial_z && initial_z->has(nus[i], p) ? initial_z->z(nus[i], p)
                                                               : hp.k * std::pow(hp.q, p);
    }

  auto rhs = [&](const State& s, State& ds, double) {
    std::vector<std::vector<double>> cur(nus.size(), std::vector<double>(np));
    for (std::size_t i = 0; i < nus.size(); ++i)
      for (std::size_t j = 0; j < np; ++j)
        cur[i][j] = std::log(std::max(1e-300, s[i * np + j]));
    auto log_z = [&](const MultiIndex& mu, double q) {
      if (q > hp.p_max) return bounds.level(mu).log_envelope(q);
      for (std::size_t m = 0; m < nus.size(); ++m)
        if (nus[m] == mu) return detail::lattice_log_z(hp, cur[m], q);
      throw InvalidInput("truncated hierarchy: index outside lower set");
    };
    for (std::size_t i = 0; i < nus.size(); ++i)
      for (std::size_t j = 0; j < np; ++j) {
        const auto co = detail::log_coefficients(grid[j], hp, nus[i], gam[j], log_z);
        const double v = std::max(0.0, s[i * np + j]);
        ds[i * np + j] =
            std::exp(co.log_b) + std::exp(co.log_d) * v - co.a_star * std::pow(v, 1.0 + co.c);
      }
  };

  TruncatedRun run;
  run.table = MomentTable(hp.cross_section.n, hp.alpha, hp.b_value());
  auto record = [&](const State& s, double t) {
    for (std::size_t i = 0; i < nus.size(); ++i)
      for (std::size_t j = 0; j < np; ++j)
        run.table.set(nus[i], grid[j],
                      std::max(0.0, s[i * np + j]) * std::tgamma(grid[j] + hp.b_value()), t);
    run.t_reached = t;
  };
  std::vector<double> times{0.0};
  for (double t : observe)
    if (t > 0.0 && t < t_end) times.push_back(t);
  times.push_back(t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  try {
    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-4, record);
    run.completed = true;
  } catch (const std::exception&) {
    run.completed = false;
  }
  return run;
}

}  // namespace boltzmom
