#pragma once

// Nanbu-Babovsky particle solver for the space-homogeneous Boltzmann equation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "angular_table.hpp"
#include "common.hpp"
#include "density.hpp"
#include "kernel.hpp"
#include "moment_table.hpp"

namespace boltzmom {

struct DsmcOptions {
  int table_size = 4096;
  std::size_t chunks = 64;
  double majorant_safety = 1.5;
  double max_candidate_probability = 0.5;
  unsigned threads = 0;  // 0 means default_threads()
};

struct StepStats {
  std::size_t candidates = 0;
  std::size_t collisions = 0;
  int substeps = 0;
  double lambda = 0.0;
};

class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(CollisionKernel k, std::vector<Vec> v, std::uint64_t seed,
                   const DsmcOptions& opt = {})
      : kernel(std::move(k)),
        velocities(std::move(v)),
        seed(seed),
        options(opt),
        sampler(kernel.cross_section, opt.table_size) {
    require(velocities.size() >= 2, "ensemble needs at least two particles");
  }

  int dimension() const { return kernel.n; }
  std::size_t size() const { return velocities.size(); }
  double weight() const { return 1.0 / static_cast<double>(velocities.size()); }

  Vec momentum() const {
    Vec s{};
    for (const auto& v : velocities) s += v;
    return weight() * s;
  }
  double energy() const {
    long double s = 0.0L;
    for (const auto& v : velocities) s += norm2(v);
    return static_cast<double>(s / velocities.size());
  }

  CollisionKernel kernel;
  std::vector<Vec> velocities;
  std::uint64_t seed = 0;
  std::uint64_t step_index = 0;
  double time = 0.0;
  DsmcOptions options;
  AngularSampler sampler;
  /// When set, the cosine of every accepted collision is appended.
  std::vector<double>* cosine_log = nullptr;
};

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

inline double gaussian_density(const Vec& x, const Vec& m, double s2, int n) {
  return std::pow(2.0 * pi * s2, -0.5 * n) * std::exp(-0.5 * norm2(x - m) / s2);
}

}  // namespace detail

/// N i.i.d. samples of d by rejection from a Gaussian mixture over the terms
/// of d with widths inflated by 1.5. The envelope constant is the largest
/// observed ratio d/g over a pilot sample, times 1.25.
inline ParticleEnsemble init_from_density(const PolyGaussianDensity& d, const CollisionKernel& k,
                                          std::size_t N, std::uint64_t seed,
                                          const DsmcOptions& opt = {}) {
  const int n = d.dimension();
  require(n == k.n, "density and kernel dimensions differ");
  require(N >= 2, "ensemble needs at least two particles");
  require(std::abs(d.mass() - 1.0) < 1e-8, "initial density must have mass 1");
  const auto& terms = d.terms();
  require(!terms.empty(), "initial density has no terms");
  const double inflate = 1.5;
  std::vector<double> mix(terms.size(), 1.0);
  std::discrete_distribution<std::size_t> pick(mix.begin(), mix.end());
  auto g = [&](const Vec& x) {
    double s = 0.0;
    for (const auto& t : terms) s += detail::gaussian_density(x, t.center, inflate * t.width, n);
    return s / static_cast<double>(terms.size());
  };
  auto rng = detail::stream(seed, 0xD5u, 0);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  auto propose = [&] {
    const auto& t = terms[pick(rng)];
    const double s = std::sqrt(inflate * t.width);
    Vec x{};
    for (int i = 0; i < n; ++i) x[i] = t.center[i] + s * gauss(rng);
    return x;
  };

  const std::size_t pilot = 20000;
  double ratio = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < pilot; ++i) {
    const Vec x = propose();
    const double dv = d(x);
    dmax = std::max(dmax, std::abs(dv));
    ratio = std::max(ratio, dv / g(x));
  }
  require(ratio > 0.0, "initial density vanishes on the proposal support");
  const double M = 1.25 * ratio;

  std::vector<Vec> v;
  v.reserve(N);
  std::size_t tries = 0;
  while (v.size() < N) {
    const Vec x = propose();
    ++tries;
    const double dv = d(x);
    if (dv < -1e-12 * dmax) throw InvalidInput("initial density is negative at a sampled point");
    if (unif(rng) * M * g(x) < dv) v.push_back(x);
    if (tries >= 100000 && static_cast<double>(v.size()) < 1e-4 * static_cast<double>(tries))
      throw NumericalFailure("rejection sampling efficiency below 1e-4 after " +
                             std::to_string(tries) + " proposals");
  }
  return ParticleEnsemble(k, std::move(v), seed, opt);
}

/// Mean of |u|^alpha over `pairs` random pairs, the inverse mean free time.
inline double mean_collision_rate(const ParticleEnsemble& e, std::size_t pairs = 20000) {
  auto rng = detail::stream(e.seed, 0x3F7u, e.step_index);
  std::uniform_int_distribution<std::size_t> idx(0, e.size() - 1);
  double s = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t i = idx(rng);
    std::size_t j = idx(rng);
    while (j == i) j = idx(rng);
    s += std::pow(norm(e.velocities[i] - e.velocities[j]), e.kernel.alpha);
  }
  return s / static_cast<double>(pairs);
}

inline double mean_free_time(const ParticleEnsemble& e) { return 1.0 / mean_collision_rate(e); }

/// Post-collision velocities for cosine z and azimuth phi.
inline std::pair<Vec, Vec> scatter(const Vec& a, const Vec& b, double z, double phi, int n) {
  const Vec u = a - b;
  const double r = norm(u);
  if (r == 0.0) return {a, b};
  const Vec uh = (1.0 / r) * u;
  const auto fr = orthogonal_frame(uh, n);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  Vec sigma = z * uh;
  if (n == 2)
    sigma += (std::cos(phi) >= 0.0 ? s : -s) * fr[0];
  else
    sigma += s * std::cos(phi) * fr[0] + s * std::sin(phi) * fr[1];
  const Vec V = 0.5 * (a + b);
  const Vec w = 0.5 * r * sigma;
  return {V + w, V - w};
}

/// One sweep of duration dt over a random pairing of the particles.
inline StepStats collision_sweep(ParticleEnsemble& e, double dt) {
  const std::size_t N = e.size();
  auto rng = detail::stream(e.seed, 0x9A1u, e.step_index);
  std::vector<std::size_t> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t pairs = N / 2;
  const double alpha = e.kernel.alpha;

  double umax = 0.0;
  for (std::size_t k = 0; k < pairs; ++k)
    umax = std::max(umax, norm2(e.velocities[perm[2 * k]] - e.velocities[perm[2 * k + 1]]));
  StepStats st;
  st.lambda = e.options.majorant_safety * std::pow(std::sqrt(umax), alpha);
  st.substeps = 1;
  if (st.lambda == 0.0) return st;
  require(dt * st.lambda < 1.0 + 1e-12, "collision sweep: dt * lambda exceeds 1");

  const std::size_t chunks = std::max<std::size_t>(1, std::min(e.options.chunks, pairs));
  std::vector<std::size_t> cand(chunks, 0), coll(chunks, 0);
  std::vector<std::vector<double>> zs(e.cosine_log ? chunks : 0);
  std::vector<char> violated(chunks, 0);
  const unsigned threads = e.options.threads ? e.options.threads : default_threads();
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto r = detail::stream(e.seed, e.step_index + 1, c + 1);
    std::uniform_real_distribution<double> unif;
    const std::size_t lo = pairs * c / chunks, hi = pairs * (c + 1) / chunks;
    for (std::size_t k = lo; k < hi; ++k) {
      if (unif(r) >= dt * st.lambda) continue;
      ++cand[c];
      Vec& a = e.velocities[perm[2 * k]];
      Vec& b = e.velocities[perm[2 * k + 1]];
      const double rate = std::pow(norm(a - b), alpha);
      if (rate > st.lambda) violated[c] = 1;
      if (unif(r) * st.lambda >= rate) continue;
      const double z = e.sampler.sample(unif(r));
      const double phi = 2.0 * pi * unif(r);
      std::tie(a, b) = scatter(a, b, z, phi, e.kernel.n);
      ++coll[c];
      if (e.cosine_log) zs[c].push_back(z);
    }
  });
  if (std::any_of(violated.begin(), violated.end(), [](char v) { return v != 0; }))
    throw NumericalFailure("collision sweep: majorant violated, rebuild lambda");
  st.candidates = std::accumulate(cand.begin(), cand.end(), std::size_t{0});
  st.collisions = std::accumulate(coll.begin(), coll.end(), std::size_t{0});
  if (e.cosine_log)
    for (const auto& v : zs) e.cosine_log->insert(e.cosine_log->end(), v.begin(), v.end());
  return st;
}

/// Advances by dt, splitting into sweeps so that the candidate probability
/// stays below options.max_candidate_probability.
inline StepStats step(ParticleEnsemble& e, double dt) {
  require(dt > 0.0, "step needs dt > 0");
  StepStats total;
  double left = dt;
  while (left > 0.0) {
    double h = left;
    // Any pair speed is at most 2 max|v - mean|, which bounds the sweep's lambda.
    double vmax = 0.0;
    const Vec m = e.momentum();
    for (const auto& v : e.velocities) vmax = std::max(vmax, norm2(v - m));
    const double lam = e.options.majorant_safety * std::pow(2.0 * std::sqrt(vmax), e.kernel.alpha);
    if (lam > 0.0) h = std::min(h, e.options.max_candidate_probability / lam);
    const auto st = collision_sweep(e, h);
    ++e.step_index;
    e.time += h;
    left -= h;
    if (left < 1e-14 * dt) left = 0.0;
    total.candidates += st.candidates;
    total.collisions += st.collisions;
    total.substeps += 1;
    total.lambda = std::max(total.lambda, st.lambda);
  }
  return total;
}

struct EmpiricalMoment {
  double value = 0.0;
  double std_error = 0.0;
};

/// (1/N) sum |v|^{2p} with the standard error of the mean.
inline EmpiricalMoment empirical_moment(const ParticleEnsemble& e, double p) {
  long double s = 0.0L, s2 = 0.0L;
  for (const auto& v : e.velocities) {
    const long double x = std::pow(norm2(v), p);
    s += x;
    s2 += x * x;
  }
  const long double N = e.size();
  const long double mean = s / N;
  const long double var = std::max<long double>(0.0L, s2 / N - mean * mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / N))};
}

struct DsmcRun {
  MomentTable table;
  std::map<std::pair<double, double>, double> std_error;  // (p, t) -> standard error
  std::vector<double> times;
  double dt = 0.0;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  std::size_t collisions = 0;
  std::size_t sweeps = 0;

  double error(double p, double t) const { return std_error.at({p, t}); }
};

/// Advances to t_end with step dt (default 0.1 mean free time at the start),
/// recording m_p for each observed order at t = 0 and every observe_every.
/// `on_observe` is called with the ensemble at each checkpoint.
using Observer = std::function<void(const ParticleEnsemble&, double)>;

inline DsmcRun run(ParticleEnsemble& e, double t_end, const std::vector<double>& observe_orders,
                   double observe_every, double dt = 0.0, const Observer& on_observe = {}) {
  require(t_end >= 0.0, "run needs t_end >= 0");
  require(!observe_orders.empty(), "run needs at least one observed order");
  DsmcRun out;
  out.dt = dt > 0.0 ? dt : 0.1 * mean_free_time(e);
  out.table = MomentTable(e.dimension(), e.kernel.alpha, 0.25 * e.kernel.cross_section.epsilon());
  const double e0 = e.energy();
  const Vec p0 = e.momentum();
  const double t0 = e.time;
  auto record = [&](double t) {
    for (double p : observe_orders) {
      const auto m = empirical_moment(e, p);
      out.table.set(MultiIndex(), p, m.value, t);
      out.std_error[{p, t}] = m.std_error;
    }
    out.times.push_back(t);
    if (on_observe) on_observe(e, t);
  };
  record(0.0);
  if (t_end == 0.0) return out;
  const double every = observe_every > 0.0 ? observe_every : t_end;
  double next = std::min(every, t_end);
  while (e.time - t0 < t_end * (1.0 - 1e-12)) {
    const double h = std::min(out.dt, next - (e.time - t0));
    const auto st = step(e, h);
    out.collisions += st.collisions;
    out.sweeps += st.substeps;
    if (e.time - t0 >= next * (1.0 - 1e-12)) {
      record(next);
      next = std::min(next + every, t_end);
      if (out.times.back() >= t_end * (1.0 - 1e-12)) break;
    }
  }
  out.energy_drift = std::abs(e.energy() - e0) / std::max(e0, 1e-300);
  out.momentum_drift = norm(e.momentum() - p0);
  return out;
}

}  // namespace boltzmom
