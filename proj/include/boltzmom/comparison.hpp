#pragma once

// Comparison bounds for y' + a y^{1+c} <= d y + b and an adaptive integrator
// for the equality version used as an oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "common.hpp"

namespace boltzmom {

/// max{y0, (b/a)^{1/(1+c)}}.
inline double comparison_bound(double a_star, double b_star, double c, double y0) {
  require(a_star > 0.0, "comparison bound needs a_star > 0");
  require(c > 0.0, "comparison bound needs c > 0");
  require(y0 >= 0.0 && b_star >= 0.0, "comparison bound needs y0, b_star >= 0");
  return std::max(y0, std::pow(b_star / a_star, 1.0 / (1.0 + c)));
}

/// Positive root of a y^{1+c} = d y + b (0 when b = d = 0).
inline double affine_fixed_point(double a_star, double b_star, double d_star, double c) {
  require(a_star > 0.0 && c > 0.0, "affine fixed point needs a_star, c > 0");
  require(b_star >= 0.0 && d_star >= 0.0, "affine fixed point needs b_star, d_star >= 0");
  if (b_star == 0.0 && d_star == 0.0) return 0.0;
  if (b_star == 0.0) return std::pow(d_star / a_star, 1.0 / c);
  auto g = [&](double y) { return a_star * std::pow(y, 1.0 + c) - d_star * y - b_star; };
  // g(0) = -b < 0; the upper end is where a y^{1+c} beats 2 max(d y, b).
  double hi = std::max({1.0, std::pow(2.0 * d_star / a_star, 1.0 / c),
                        std::pow(2.0 * b_star / a_star, 1.0 / (1.0 + c))});
  while (g(hi) <= 0.0) hi *= 2.0;
  std::uintmax_t iters = 200;
  const auto [lo_y, hi_y] = boost::math::tools::toms748_solve(
      g, 0.0, hi, -b_star, g(hi), boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) throw NumericalFailure("affine fixed point: root bracketing failed");
  return 0.5 * (lo_y + hi_y);
}

/// max{y0, y_bar} with a y_bar^{1+c} = d y_bar + b.
inline double comparison_bound_affine(double a_star, double b_star, double d_star, double c,
                                      double y0) {
  require(y0 >= 0.0, "comparison bound needs y0 >= 0");
  if (d_star == 0.0) return comparison_bound(a_star, b_star, c, y0);
  return std::max(y0, affine_fixed_point(a_star, b_star, d_star, c));
}

using TimeFn = std::function<double(double)>;

struct ScalarOdeResult {
  double y_max = 0.0;
  double y_end = 0.0;
  double t_end = 0.0;
};

/// Integrates y' = b(t) + d(t) y - a(t) y^{1+c} with a Dormand-Prince stepper
/// and returns the running maximum of y.
inline ScalarOdeResult integrate_comparison_ode(const TimeFn& a, const TimeFn& b, const TimeFn& d,
                                                double c, double y0, double t_end,
                                                double tol = 1e-11) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  State y{y0};
  ScalarOdeResult r;
  r.y_max = y0;
  auto rhs = [&](const State& s, State& ds, double t) {
    const double v = std::max(0.0, s[0]);
    ds[0] = b(t) + d(t) * v - a(t) * std::pow(v, 1.0 + c);
  };
  auto obs = [&](const State& s, double t) {
    r.y_max = std::max(r.y_max, s[0]);
    r.t_end = t;
  };
  auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, y, 0.0, t_end, 1e-3 * t_end, obs);
  r.y_end = y[0];
  return r;
}

}  // namespace boltzmom
