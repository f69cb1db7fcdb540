#pragma once

// Tables of derivative moments delta^nu m_p(t) and their normalized form
// delta^nu z_p = delta^nu m_p / Gamma(p + b).

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "density.hpp"
#include "json.hpp"
#include "multi_index.hpp"

namespace boltzmom {

struct MomentKey {
  MultiIndex nu;
  double p = 0.0;
  double t = 0.0;
  friend auto operator<=>(const MomentKey&, const MomentKey&) = default;
};

struct MomentEntry {
  double m = 0.0;
  double z = 0.0;
};

/// Result of a table lookup; `interpolated` marks values not stored directly.
struct MomentValue {
  double value = 0.0;
  bool interpolated = false;
};

class MomentTable {
 public:
  int n = 3;
  double alpha = 1.0;
  double b = 0.5;

  MomentTable() = default;
  MomentTable(int dim, double a, double b_param) : n(dim), alpha(a), b(b_param) {
    check_dimension(dim);
    require(b_param > 0.0, "normalization parameter b must be positive");
  }

  void set(const MultiIndex& nu, double p, double m, double t = 0.0) {
    require(p >= 0.0, "moment order must be nonnegative");
    require(m >= 0.0 && std::isfinite(m), "stored moments must be finite and nonnegative");
    entries_[{nu, p, t}] = {m, m / std::tgamma(p + b)};
  }

  bool has(const MultiIndex& nu, double p, double t = 0.0) const {
    return entries_.count({nu, p, t}) > 0;
  }

  const std::map<MomentKey, MomentEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Stored m, throwing with the missing (nu, p) otherwise.
  double m(const MultiIndex& nu, double p, double t = 0.0) const {
    auto it = entries_.find({nu, p, t});
    if (it == entries_.end())
      throw InvalidInput("moment table has no entry for nu=" + nu.str(n) +
                         " p=" + format_order(p) + " t=" + std::to_string(t));
    return it->second.m;
  }
  double z(const MultiIndex& nu, double p, double t = 0.0) const {
    return m(nu, p, t) / std::tgamma(p + b);
  }

  /// Orders stored for (nu, t), ascending.
  std::vector<double> orders(const MultiIndex& nu, double t = 0.0) const {
    std::vector<double> out;
    for (const auto& [k, e] : entries_)
      if (k.nu == nu && k.t == t) out.push_back(k.p);
    return out;
  }
  std::vector<double> times() const {
    std::vector<double> out;
    for (const auto& [k, e] : entries_) out.push_back(k.t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<MultiIndex> indices() const {
    std::vector<MultiIndex> out;
    for (const auto& [k, e] : entries_) out.push_back(k.nu);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// m at order p, log-linearly interpolated between the bracketing stored
  /// orders when p itself is absent. By Hoelder this is an upper bound for
  /// true moments.
  MomentValue m_at(const MultiIndex& nu, double p, double t = 0.0) const {
    auto it = entries_.find({nu, p, t});
    if (it != entries_.end()) return {it->second.m, false};
    const auto ps = orders(nu, t);
    auto hi = std::upper_bound(ps.begin(), ps.end(), p);
    if (hi == ps.begin() || hi == ps.end())
      throw InvalidInput("moment order " + format_order(p) + " outside stored range for nu=" +
                         nu.str(n));
    const double p1 = *hi, p0 = *(hi - 1);
    const double m0 = m(nu, p0, t), m1 = m(nu, p1, t);
    if (m0 == 0.0 || m1 == 0.0) return {0.0, true};
    const double th = (p - p0) / (p1 - p0);
    return {std::exp((1.0 - th) * std::log(m0) + th * std::log(m1)), true};
  }
  MomentValue z_at(const MultiIndex& nu, double p, double t = 0.0) const {
    auto v = m_at(nu, p, t);
    v.value /= std::tgamma(p + b);
    return v;
  }

  /// Same entries renormalized with a different b.
  MomentTable normalized(double b_new) const {
    MomentTable out(n, alpha, b_new);
    for (const auto& [k, e] : entries_) out.set(k.nu, k.p, e.m, k.t);
    return out;
  }

  /// Every entry multiplied by c (c >= 0).
  MomentTable scaled(double c) const {
    MomentTable out(n, alpha, b);
    for (const auto& [k, e] : entries_) out.set(k.nu, k.p, c * e.m, k.t);
    return out;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17) << "nu,p,t,m,z,b\n";
    for (const auto& [k, e] : entries_)
      os << k.nu.str(n) << ',' << k.p << ',' << k.t << ',' << e.m << ',' << e.z << ',' << b
         << '\n';
    return os.str();
  }

  /// Reads the CSV layout written by to_csv; z is recomputed from m.
  static MomentTable from_csv(const std::string& text, int dim, double a) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    do {
      require(static_cast<bool>(std::getline(is, line)), "empty moment CSV");
      ++lineno;
    } while (!line.empty() && line[0] == '#');
    std::vector<std::tuple<MultiIndex, double, double, double>> rows;
    double b_val = -1.0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      require(f.size() >= 4, "moment CSV line " + std::to_string(lineno) + ": expected nu,p,t,m");
      try {
        rows.emplace_back(parse_multi_index(f[0]), std::stod(f[1]), std::stod(f[2]),
                          std::stod(f[3]));
        if (f.size() >= 6) b_val = std::stod(f[5]);
      } catch (const std::logic_error&) {
        throw InvalidInput("moment CSV line " + std::to_string(lineno) + ": malformed number");
      }
    }
    MomentTable out(dim, a, b_val > 0.0 ? b_val : (dim - 1.0) / 4.0);
    for (const auto& [nu, p, t, m] : rows) out.set(nu, p, m, t);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [k, e] : entries_)
      rows.push_back({{"nu", k.nu.str(n)}, {"p", k.p}, {"t", k.t}, {"m", e.m}, {"z", e.z}});
    return {{"n", n}, {"alpha", alpha}, {"b", b}, {"entries", rows}};
  }

  static std::string format_order(double p) {
    std::ostringstream os;
    os << p;
    return os.str();
  }

 private:
  std::map<MomentKey, MomentEntry> entries_;
};

/// delta^nu m_p of a density for every nu in `nus` and p in `ps` at time t.
/// One radial profile per nu serves all orders.
inline MomentTable moment_table_from_density(const PolyGaussianDensity& f,
                                             const std::vector<MultiIndex>& nus,
                                             const std::vector<double>& ps, double alpha,
                                             double b, ShellOptions opt = {}, double t = 0.0) {
  MomentTable table(f.dimension(), alpha, b);
  for (double p : ps) opt.p_max = std::max(opt.p_max, p);
  for (const auto& nu : nus) {
    const RadialProfile prof = radial_profile(differentiate(f, nu), opt);
    for (double p : ps) table.set(nu, p, prof.moment(p), t);
  }
  return table;
}

}  // namespace boltzmom
