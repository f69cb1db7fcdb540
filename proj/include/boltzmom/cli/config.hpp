#pragma once

// YAML experiment configuration. Schema errors carry the config line number.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "../common.hpp"
#include "../density.hpp"
#include "../kernel.hpp"
#include "../multi_index.hpp"

namespace boltzmom::cli {

class ConfigError : public InvalidInput {
 public:
  ConfigError(int line, const std::string& what)
      : InvalidInput("config line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

/// Reads `key` from a map node; missing keys yield `fallback`.
template <class T>
T get(const YAML::Node& map, const std::string& key, const T& fallback) {
  const YAML::Node v = map[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(line_of(v), "key '" + key + "' has the wrong type");
  }
}

template <class T>
T get_required(const YAML::Node& map, const std::string& key) {
  const YAML::Node v = map[key];
  if (!v) throw ConfigError(line_of(map), "missing key '" + key + "'");
  return get<T>(map, key, T{});
}

/// 64-bit FNV-1a of the config text, as 16 hex digits.
inline std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

struct ExperimentConfig {
  std::string text;
  std::string hash;
  std::filesystem::path base_dir;
  YAML::Node root;

  CollisionKernel kernel;
  bool has_density = false;
  PolyGaussianDensity density;
  std::vector<double> p_grid;
  /// <= 0 selects epsilon/4.
  double b = -1.0;
  std::uint64_t seed = 1;

  int n() const { return kernel.n; }
  double b_value() const { return b > 0.0 ? b : 0.25 * kernel.cross_section.epsilon(); }
  /// Subcommand block; an undefined node when absent.
  YAML::Node block(const std::string& name) const { return root[name]; }
  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  }
};

namespace detail {

inline Vec read_vec(const YAML::Node& node, int n, const std::string& key) {
  Vec v{};
  if (!node) return v;
  if (!node.IsSequence() || static_cast<int>(node.size()) != n)
    throw ConfigError(line_of(node), "'" + key + "' must be a list of " + std::to_string(n) +
                                         " numbers");
  for (int i = 0; i < n; ++i) {
    try {
      v[i] = node[i].as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(line_of(node[i]), "'" + key + "' entries must be numbers");
    }
  }
  return v;
}

inline CollisionKernel read_kernel(const YAML::Node& k) {
  if (!k) return CollisionKernel(1.0, hard_sphere_cross_section(3));
  if (!k.IsMap()) throw ConfigError(line_of(k), "'kernel' must be a map");
  const int n = get<int>(k, "n", 3);
  if (n != 2 && n != 3) throw ConfigError(line_of(k["n"]), "kernel.n must be 2 or 3");
  const double alpha = get<double>(k, "alpha", 1.0);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError(line_of(k["alpha"]), "kernel.alpha must lie in (0, 1]");
  const auto name = get<std::string>(k, "cross_section", "hard_sphere");
  const double mu = get<double>(k, "mu", 0.0);
  const auto coeffs = get<std::vector<double>>(k, "coeffs", {});
  try {
    return CollisionKernel(alpha, make_cross_section(name, n, mu, coeffs));
  } catch (const InvalidInput& e) {
    throw ConfigError(line_of(k), e.what());
  }
}

// density:
//   maxwellian: {T: 1, center: [0, 0, 0]}
// or
//   terms:
//     - {width: 1, center: [..], poly: [[coeff, e1, e2, e3], ...]}
//   normalize: true
inline PolyGaussianDensity read_density(const YAML::Node& d, int n) {
  if (!d.IsMap()) throw ConfigError(line_of(d), "'density' must be a map");
  if (const auto m = d["maxwellian"]) {
    const double T = get<double>(m, "T", 1.0);
    if (!(T > 0.0)) throw ConfigError(line_of(m), "maxwellian T must be positive");
    return PolyGaussianDensity::maxwellian(n, T, read_vec(m["center"], n, "center"));
  }
  const auto terms = d["terms"];
  if (!terms || !terms.IsSequence() || terms.size() == 0)
    throw ConfigError(line_of(d), "density needs 'maxwellian' or a non-empty 'terms' list");
  PolyGaussianDensity out(n);
  for (const auto& t : terms) {
    GaussTerm g;
    g.width = get<double>(t, "width", 1.0);
    if (!(g.width > 0.0)) throw ConfigError(line_of(t), "term width must be positive");
    g.center = read_vec(t["center"], n, "center");
    const auto poly = t["poly"];
    if (!poly) {
      g.poly = Polynomial(std::pow(2.0 * pi * g.width, -0.5 * n));
    } else {
      if (!poly.IsSequence()) throw ConfigError(line_of(poly), "'poly' must be a list");
      for (const auto& mono : poly) {
        std::vector<double> row;
        try {
          row = mono.as<std::vector<double>>();
        } catch (const YAML::Exception&) {
          throw ConfigError(line_of(mono), "monomial must be [coeff, e1, ..., en]");
        }
        if (static_cast<int>(row.size()) != n + 1)
          throw ConfigError(line_of(mono), "monomial must be [coeff, e1, ..., en]");
        Exponents e{0, 0, 0};
        for (int i = 0; i < n; ++i) {
          if (row[i + 1] < 0.0 || std::floor(row[i + 1]) != row[i + 1])
            throw ConfigError(line_of(mono), "exponents must be nonnegative integers");
          e[i] = static_cast<int>(row[i + 1]);
        }
        g.poly.add(e, row[0]);
      }
    }
    try {
      out.add_term(g);
    } catch (const InvalidInput& ex) {
      throw ConfigError(line_of(t), ex.what());
    }
  }
  if (get<bool>(d, "normalize", true)) {
    const double m = out.mass();
    if (!(m > 0.0)) throw ConfigError(line_of(d), "density has nonpositive mass");
    out = out.scaled(1.0 / m);
  }
  return out;
}

// p_grid: [1.5, 2, 3]  or  {from: 1.5, to: 20, step: 0.5}
inline std::vector<double> read_grid(const YAML::Node& g) {
  std::vector<double> out;
  if (!g) return out;
  if (g.IsSequence()) {
    for (const auto& v : g) {
      try {
        out.push_back(v.as<double>());
      } catch (const YAML::Exception&) {
        throw ConfigError(line_of(v), "p_grid entries must be numbers");
      }
    }
  } else if (g.IsMap()) {
    const double from = get_required<double>(g, "from");
    const double to = get_required<double>(g, "to");
    const double step = get_required<double>(g, "step");
    if (!(step > 0.0) || to < from) throw ConfigError(line_of(g), "p_grid range is empty");
    for (int i = 0; from + i * step <= to + 1e-12 * std::abs(to); ++i) out.push_back(from + i * step);
  } else {
    throw ConfigError(line_of(g), "p_grid must be a list or {from, to, step}");
  }
  if (out.empty()) throw ConfigError(line_of(g), "p_grid is empty");
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text,
                                     const std::filesystem::path& base_dir = ".") {
  ExperimentConfig c;
  c.text = text;
  c.hash = config_hash(text);
  c.base_dir = base_dir;
  try {
    c.root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, e.msg);
  }
  if (!c.root || c.root.IsNull()) c.root = YAML::Node(YAML::NodeType::Map);
  if (!c.root.IsMap()) throw ConfigError(1, "config must be a key-value map");
  c.kernel = detail::read_kernel(c.root["kernel"]);
  if (const auto d = c.root["density"]) {
    c.density = detail::read_density(d, c.n());
    c.has_density = true;
  }
  c.p_grid = detail::read_grid(c.root["p_grid"]);
  c.b = get<double>(c.root, "b", -1.0);
  if (c.b > 0.0 && c.b >= 0.5 * c.kernel.cross_section.epsilon())
    throw ConfigError(line_of(c.root["b"]), "b must be below epsilon/2");
  c.seed = get<std::uint64_t>(c.root, "seed", 1);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

/// p_grid from the config; an empty grid is a schema error for commands that need one.
inline const std::vector<double>& require_grid(const ExperimentConfig& c) {
  if (c.p_grid.empty()) throw ConfigError(line_of(c.root), "missing or empty p_grid");
  return c.p_grid;
}

}  // namespace boltzmom::cli
