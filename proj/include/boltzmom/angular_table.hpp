#pragma once

// Inverse-CDF table for the scattering cosine z = u_hat . sigma with density
// proportional to h_bar(z) (1-z^2)^{(n-3)/2}.

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"

namespace boltzmom {

class AngularSampler {
 public:
  AngularSampler() = default;

  /// Tabulates the CDF in theta (z = -cos theta), where the density is
  /// regular_bar(z) sin^{n-2-mu}(theta), then inverts it on `size` points.
  explicit AngularSampler(const AngularCrossSection& h, int size = 4096, int panels = 8192)
      : n_(h.n) {
    require(size >= 2 && panels >= size, "angular table needs size >= 2 and panels >= size");
    const double ex = h.n - 2.0 - h.mu;
    require(ex > -1.0, "angular law is not integrable (mu >= n-1)");
    auto dens = [&](double th) {
      const double s = std::sin(th);
      return s > 0.0 ? h.regular_bar(-std::cos(th)) * std::pow(s, ex) : 0.0;
    };
    std::vector<double> theta(panels + 1), cdf(panels + 1, 0.0);
    AdaptiveOptions ao;
    ao.abs_tol = 1e-15;
    ao.rel_tol = 1e-12;
    ao.throw_on_failure = false;
    for (int i = 0; i <= panels; ++i) theta[i] = pi * i / panels;
    for (int i = 0; i < panels; ++i)
      cdf[i + 1] = cdf[i] + adaptive_integrate(dens, theta[i], theta[i + 1], ao).value;
    const double total = cdf.back();
    require(total > 0.0, "angular law has zero mass");
    for (auto& c : cdf) c /= total;
    cdf_theta_ = theta;
    cdf_ = cdf;
    table_.resize(size);
    for (int j = 0; j < size; ++j) {
      const double u = static_cast<double>(j) / (size - 1);
      table_[j] = -std::cos(theta_at(u));
    }
  }

  /// z for a uniform variate u in [0, 1).
  double sample(double u) const {
    const double x = u * (table_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(x), table_.size() - 2);
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * table_[i] + t * table_[i + 1];
  }

  /// P(Z <= z) from the fine CDF.
  double cdf(double z) const { return cdf_at_theta(std::acos(std::clamp(-z, -1.0, 1.0))); }

  std::size_t size() const { return table_.size(); }
  int dimension() const { return n_; }

 private:
  double theta_at(double u) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return 0.0;
    if (it == cdf_.end()) return pi;
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return cdf_theta_[i - 1] + t * (cdf_theta_[i] - cdf_theta_[i - 1]);
  }
  double cdf_at_theta(double th) const {
    auto it = std::lower_bound(cdf_theta_.begin(), cdf_theta_.end(), th);
    if (it == cdf_theta_.begin()) return 0.0;
    if (it == cdf_theta_.end()) return 1.0;
    const auto i = static_cast<std::size_t>(it - cdf_theta_.begin());
    const double t = (th - cdf_theta_[i - 1]) / (cdf_theta_[i] - cdf_theta_[i - 1]);
    return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
  }

  int n_ = 3;
  std::vector<double> table_;
  std::vector<double> cdf_theta_;
  std::vector<double> cdf_;
};

}  // namespace boltzmom
