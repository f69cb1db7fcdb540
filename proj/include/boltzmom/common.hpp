#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace boltzmom {

inline constexpr double pi = std::numbers::pi;
inline constexpr int max_dim = 3;

/// Velocity in R^n, n <= 3. Unused trailing components are zero.
struct Vec {
  std::array<double, max_dim> c{0.0, 0.0, 0.0};

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < max_dim; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < max_dim; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend bool operator==(const Vec&, const Vec&) = default;
};

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

/// Thrown when a precondition on user-supplied input is violated.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot deliver its contract.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

inline void check_dimension(int n) {
  require(n == 2 || n == 3, "unsupported dimension " + std::to_string(n) + " (expected 2 or 3)");
}

/// Surface measure of the unit sphere S^k in R^{k+1}.
inline double sphere_area(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(pi, h) / std::tgamma(h);
}

/// Generalized binomial coefficient p(p-1)...(p-k+1)/k! as a falling-factorial product.
inline double gen_binomial(double p, int k) {
  if (k < 0) return 0.0;
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= (p - j) / static_cast<double>(j + 1);
  return r;
}

inline double log_gamma(double x) { return std::lgamma(x); }

/// Order of the Lemma-5 style binomial split, floor((p+1)/2).
inline int binomial_split_order(double p) {
  return static_cast<int>(std::floor((p + 1.0) / 2.0 + 1e-12));
}

/// Runs fn(i) for i in [0, count) over `threads` workers. Each index is
/// visited exactly once; callers write into per-index slots so results do
/// not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Process-wide default worker count used by data-parallel loops.
inline unsigned& default_threads() {
  static unsigned n = 1;
  return n;
}

}  // namespace boltzmom
