#pragma once

// Statistics of particle ensembles: entropy, density lower bounds, the
// angular law of accepted collisions and factorial moment envelopes.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "angular_table.hpp"
#include "dsmc.hpp"
#include "moments.hpp"

namespace boltzmom {

namespace detail {

inline std::vector<Vec> subsample(const ParticleEnsemble& e, std::size_t m, std::uint64_t tag) {
  if (m >= e.size()) return e.velocities;
  auto rng = stream(e.seed, tag, e.step_index);
  std::vector<Vec> out;
  out.reserve(m);
  std::sample(e.velocities.begin(), e.velocities.end(), std::back_inserter(out), m, rng);
  return out;
}

}  // namespace detail

/// Kozachenko-Leonenko estimate of -int f log f from the k-th nearest
/// neighbour distances of a subsample of size m.
inline double knn_entropy(const ParticleEnsemble& e, int k = 1, std::size_t m = 20000) {
  require(k >= 1, "knn entropy needs k >= 1");
  const auto x = detail::subsample(e, m, 0xE47u);
  const std::size_t M = x.size();
  require(M > static_cast<std::size_t>(k), "knn entropy needs more points than k");
  const int n = e.dimension();
  std::vector<double> logd(M);
  const unsigned threads = e.options.threads ? e.options.threads : default_threads();
  parallel_for(M, threads, [&](std::size_t i) {
    std::vector<double> best(k, INFINITY);
    for (std::size_t j = 0; j < M; ++j) {
      if (j == i) continue;
      const double d2 = norm2(x[i] - x[j]);
      if (d2 < best.back()) {
        best.back() = d2;
        std::sort(best.begin(), best.end());
      }
    }
    logd[i] = 0.5 * std::log(std::max(best.back(), 1e-300));
  });
  double s = 0.0;
  for (double v : logd) s += v;
  const double log_vn = 0.5 * n * std::log(pi) - std::lgamma(0.5 * n + 1.0);
  return boost::math::digamma(static_cast<double>(M)) - boost::math::digamma(static_cast<double>(k)) +
         log_vn + n * s / static_cast<double>(M);
}

struct LowerBoundFit {
  double c = 0.0;
  double r0 = 0.0;
  double radius = 0.0;
  double bandwidth = 0.0;
  Vec argmin{};
};

/// min over |xi| <= radius of f_hat(xi) exp(r0 |xi|^2), where f_hat is a
/// Gaussian kernel density estimate with Silverman's bandwidth. The minimum
/// is taken over `shells` radii times `directions` fixed random directions.
inline LowerBoundFit kde_lower_bound(const ParticleEnsemble& e, double r0, double radius = 3.0,
                                     int shells = 13, int directions = 16) {
  require(r0 > 0.0 && radius > 0.0, "kde lower bound needs r0, radius > 0");
  const int n = e.dimension();
  const std::size_t N = e.size();
  const Vec mean = e.momentum();
  double var = 0.0;
  for (const auto& v : e.velocities) var += norm2(v - mean);
  var /= static_cast<double>(N) * n;
  LowerBoundFit fit;
  fit.r0 = r0;
  fit.radius = radius;
  fit.bandwidth = std::sqrt(var) * std::pow(4.0 / ((n + 2.0) * N), 1.0 / (n + 4.0));
  const double h2 = fit.bandwidth * fit.bandwidth;
  const double norm_c = std::pow(2.0 * pi * h2, -0.5 * n) / static_cast<double>(N);

  auto rng = detail::stream(0x51u, 0x4B1u, 0);
  std::normal_distribution<double> gauss;
  std::vector<Vec> pts{Vec{}};
  std::vector<Vec> dirs(directions);
  for (auto& d : dirs) {
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    d *= 1.0 / norm(d);
  }
  for (int s = 1; s < shells; ++s)
    for (const auto& d : dirs) pts.push_back(radius * s / (shells - 1) * d);

  std::vector<double> val(pts.size());
  const unsigned threads = e.options.threads ? e.options.threads : default_threads();
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    long double s = 0.0L;
    for (const auto& v : e.velocities) s += std::exp(-0.5 * norm2(pts[i] - v) / h2);
    val[i] = static_cast<double>(s) * norm_c * std::exp(r0 * norm2(pts[i]));
  });
  const auto it = std::min_element(val.begin(), val.end());
  fit.c = *it;
  fit.argmin = pts[static_cast<std::size_t>(it - val.begin())];
  return fit;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  std::size_t samples = 0;
};

/// Pearson test of sampled cosines against the sampler's angular law on
/// `bins` equal-probability bins.
inline ChiSquareResult angular_chi_square(const std::vector<double>& z, const AngularSampler& law,
                                          int bins = 50) {
  require(bins >= 2, "chi-square test needs at least two bins");
  require(z.size() >= static_cast<std::size_t>(5 * bins), "chi-square test needs 5 samples per bin");
  std::vector<double> count(bins, 0.0);
  for (double v : z) {
    const int b = std::clamp(static_cast<int>(law.cdf(v) * bins), 0, bins - 1);
    count[b] += 1.0;
  }
  const double expect = static_cast<double>(z.size()) / bins;
  ChiSquareResult r;
  for (double c : count) r.statistic += (c - expect) * (c - expect) / expect;
  r.dof = bins - 1;
  r.samples = z.size();
  r.p_value = boost::math::cdf(boost::math::complement(
      boost::math::chi_squared_distribution<double>(r.dof), r.statistic));
  return r;
}

/// Geometric envelope K Q^p of m_p / p! at time t.
inline GeometricBound factorial_envelope(const MomentTable& m, const std::vector<double>& ps,
                                         double t = 0.0) {
  return fit_geometric_bound(m.normalized(1.0), MultiIndex(), ps, t);
}

}  // namespace boltzmom
