#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

#include "common.hpp"

namespace boltzmom {

/// Derivative orders (eta_1, ..., eta_n). Unused trailing slots stay zero.
struct MultiIndex {
  std::array<int, max_dim> orders{0, 0, 0};

  MultiIndex() = default;
  MultiIndex(int a, int b = 0, int c = 0) : orders{a, b, c} {
    require(a >= 0 && b >= 0 && c >= 0, "multi-index entries must be nonnegative");
  }

  static MultiIndex unit(int i) {
    MultiIndex m;
    m.orders[static_cast<std::size_t>(i)] = 1;
    return m;
  }

  int operator[](std::size_t i) const { return orders[i]; }
  int total() const { return orders[0] + orders[1] + orders[2]; }
  bool is_zero() const { return total() == 0; }

  /// Componentwise nu <= eta.
  bool leq(const MultiIndex& eta) const {
    for (std::size_t i = 0; i < max_dim; ++i)
      if (orders[i] > eta.orders[i]) return false;
    return true;
  }
  /// nu < eta: componentwise leq and strictly lower total order.
  bool less(const MultiIndex& eta) const { return leq(eta) && total() < eta.total(); }

  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    for (std::size_t i = 0; i < max_dim; ++i) {
      r.orders[i] = a.orders[i] - b.orders[i];
      require(r.orders[i] >= 0, "multi-index difference is negative");
    }
    return r;
  }
  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    for (std::size_t i = 0; i < max_dim; ++i) r.orders[i] = a.orders[i] + b.orders[i];
    return r;
  }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  std::string str(int n = max_dim) const {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (i) s += '.';
      s += std::to_string(orders[static_cast<std::size_t>(i)]);
    }
    return s;
  }
};

/// Product of componentwise binomial coefficients (eta choose nu).
inline double binomial(const MultiIndex& eta, const MultiIndex& nu) {
  if (!nu.leq(eta)) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < max_dim; ++i) r *= gen_binomial(eta.orders[i], nu.orders[i]);
  return r;
}

/// All nu with nu <= eta (componentwise), in lexicographic order.
inline std::vector<MultiIndex> lower_set(const MultiIndex& eta) {
  std::vector<MultiIndex> out;
  for (int a = 0; a <= eta.orders[0]; ++a)
    for (int b = 0; b <= eta.orders[1]; ++b)
      for (int c = 0; c <= eta.orders[2]; ++c) out.emplace_back(a, b, c);
  return out;
}

/// Parses "1.0.2" or "1,0,2".
inline MultiIndex parse_multi_index(const std::string& text) {
  std::array<int, max_dim> v{0, 0, 0};
  std::size_t slot = 0;
  std::string cur;
  auto flush = [&] {
    require(!cur.empty(), "malformed multi-index '" + text + "'");
    require(slot < max_dim, "multi-index has too many entries: '" + text + "'");
    v[slot++] = std::stoi(cur);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '.' || ch == ',') {
      flush();
    } else if (ch >= '0' && ch <= '9') {
      cur += ch;
    } else if (ch != ' ') {
      throw InvalidInput("malformed multi-index '" + text + "'");
    }
  }
  flush();
  return MultiIndex(v[0], v[1], v[2]);
}

}  // namespace boltzmom
