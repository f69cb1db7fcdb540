#pragma once

#include <cmath>
#include <random>

#include <boltzmom/comparison.hpp>
#include <boltzmom/povzner.hpp>

#include "harness.hpp"

namespace acceptance {

using namespace boltzmom;

inline Outcome gamma_hard_sphere() {
  const auto h = hard_sphere_cross_section(3);
  double worst = 0.0;
  bool bound = true;
  for (int p = 1; p <= 50; ++p) {
    const double g = gamma_paper(h, p);
    worst = std::max(worst, std::abs(g - 1.0 / (p + 1.0)));
    bound = bound && g <= std::min(1.0, 4.0 / (p + 1.0));
  }
  return {worst <= 1e-10 && bound, cat("max |gamma_p - 1/(p+1)| = ", worst, ", bound ", bound ? "holds" : "fails")};
}

inline Outcome gamma_asymptotics() {
  Outcome o{true, ""};
  for (double mu : {0.0, 0.25, 0.5, 1.0}) {
    const auto h = mu == 0.0 ? hard_sphere_cross_section(3) : singular_cross_section(mu, 3);
    const auto f = gamma_asymptotic_fit(h, 50.0, 5000.0, 12);
    const double want = -0.5 * h.epsilon();
    const double rel = std::abs(f.slope / want - 1.0);
    o.pass = o.pass && rel <= 0.05;
    o.detail += cat("mu=", mu, " slope ", f.slope, " (", want, ") ");
  }
  return o;
}

inline Outcome binomial_sandwich() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> up(0.0, 1.0), ul(std::log(1e-2), std::log(1e2));
  int failures = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const double p = 20.0 - 19.0 * up(rng);  // (1, 20]
    const double x = std::exp(ul(rng)), y = std::exp(ul(rng));
    failures += !binomial_sandwich_check(p, x, y).holds();
  }
  return {failures == 0, cat(trials, " samples, ", failures, " violations")};
}

inline Outcome comparison_bounds() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.1 + 3.0 * u(rng), b = 5.0 * u(rng), c = 0.02 + 0.5 * u(rng);
    const double d = i % 2 ? 2.0 * u(rng) : 0.0;
    const double y0 = 4.0 * u(rng), w = 0.2 + 5.0 * u(rng), ph = 6.0 * u(rng);
    // a(t) >= a, b(t) <= b, d(t) <= d
    const TimeFn at = [=](double t) { return a * (1.0 + std::pow(std::sin(w * t + ph), 2)); };
    const TimeFn bt = [=](double t) { return b * std::pow(std::cos(w * t), 2); };
    const TimeFn dt = [=](double t) { return d * std::exp(-t); };
    const double bound = comparison_bound_affine(a, b, d, c, y0);
    const auto r = integrate_comparison_ode(at, bt, dt, c, y0, 10.0);
    worst = std::max(worst, (r.y_max - bound) / std::max(1.0, bound));
  }
  return {worst <= 1e-9, cat("1000 ODEs, worst relative excess ", worst)};
}

}  // namespace acceptance
