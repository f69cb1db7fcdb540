#pragma once

// Subcommands. Each writes <name>.csv and/or <name>.json into the output
// directory; every artifact carries the tool version and config hash.
// Failed inequality margins are result rows, not errors.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "../dsmc_diagnostics.hpp"
#include "../gain_loss.hpp"
#include "../hierarchy.hpp"
#include "../moments.hpp"
#include "../povzner.hpp"
#include "../version.hpp"
#include "../weak_form.hpp"
#include "config.hpp"

namespace boltzmom::cli {

struct Context {
  ExperimentConfig cfg;
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string command;
};

inline nlohmann::json meta(const Context& c) {
  return {{"tool", "boltzmom"},       {"version", version}, {"command", c.command},
          {"config_hash", c.cfg.hash}, {"seed", c.seed},     {"threads", c.threads}};
}

inline std::string csv_header(const Context& c) {
  return std::string("# boltzmom ") + version + " command=" + c.command +
         " config=" + c.cfg.hash + " seed=" + std::to_string(c.seed) + "\n";
}

inline void write_text(const Context& c, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(c.out);
  std::ofstream f(c.out / name, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + (c.out / name).string() + "'");
  f << body;
}

inline void write_json(const Context& c, const std::string& name, nlohmann::json body) {
  body["meta"] = meta(c);
  write_text(c, name, body.dump(2) + "\n");
}

inline MultiIndex read_multi_index(const YAML::Node& node, const std::string& key) {
  if (!node) return MultiIndex();
  try {
    if (node.IsSequence()) {
      const auto v = node.as<std::vector<int>>();
      if (v.size() > static_cast<std::size_t>(max_dim) ||
          std::any_of(v.begin(), v.end(), [](int x) { return x < 0; }))
        throw ConfigError(line_of(node), "'" + key + "' must hold at most 3 nonnegative orders");
      std::array<int, max_dim> o{0, 0, 0};
      std::copy(v.begin(), v.end(), o.begin());
      return MultiIndex(o[0], o[1], o[2]);
    }
    return parse_multi_index(node.as<std::string>());
  } catch (const YAML::Exception&) {
    throw ConfigError(line_of(node), "'" + key + "' must be a multi-index");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(line_of(node), e.what());
  }
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline const PolyGaussianDensity& require_density(const Context& c) {
  if (!c.cfg.has_density) throw ConfigError(line_of(c.cfg.root), "missing 'density' block");
  return c.cfg.density;
}

// gamma: CSV p,gamma_paper,gamma_sym over p_grid.
inline int cmd_gamma(const Context& c) {
  const auto& grid = require_grid(c.cfg);
  const auto table = build_gamma_table(c.cfg.kernel.cross_section, grid, c.threads);
  std::ostringstream os;
  os << csv_header(c) << "p,gamma_paper,gamma_sym\n";
  for (double p : grid)
    os << fmt(p) << ',' << fmt(table.entries.at(p)) << ',' << fmt(table.sym(p)) << '\n';
  write_text(c, "gamma.csv", os.str());
  return 0;
}

// povzner: {p: [...], samples: 200, scale: 2}. One row per sample, p and
// convention; the origin pair (xi, 0) is always sample 0.
inline int cmd_povzner(const Context& c) {
  const auto blk = c.cfg.block("povzner");
  std::vector<double> ps = blk ? get<std::vector<double>>(blk, "p", c.cfg.p_grid) : c.cfg.p_grid;
  if (ps.empty()) throw ConfigError(line_of(c.cfg.root), "povzner needs a p list or p_grid");
  for (double p : ps)
    if (p < 1.0) throw ConfigError(line_of(blk ? blk : c.cfg.root), "povzner orders must be >= 1");
  const int samples = blk ? get<int>(blk, "samples", 200) : 200;
  const double scale = blk ? get<double>(blk, "scale", 2.0) : 2.0;
  if (samples < 1 || !(scale > 0.0))
    throw ConfigError(line_of(blk ? blk : c.cfg.root), "povzner needs samples >= 1, scale > 0");
  const int n = c.cfg.n();
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int s = 0; s < samples; ++s) {
    Vec a{}, b{};
    for (int i = 0; i < n; ++i) a[i] = g(rng);
    if (s > 0)
      for (int i = 0; i < n; ++i) b[i] = g(rng);
    pairs.emplace_back(a, b);
  }
  PovznerOptions opt;
  opt.threads = c.threads;
  std::ostringstream os;
  os << csv_header(c)
     << "sample,p,convention,xi_norm,xi_star_norm,lhs,rhs,margin,err_estimate,passes\n";
  nlohmann::json summary = nlohmann::json::array();
  for (double p : ps) {
    const auto reps = povzner_check(c.cfg.kernel.cross_section, p, pairs, opt);
    int pass_paper = 0, pass_sym = 0;
    for (std::size_t s = 0; s < reps.size(); ++s) {
      for (const auto* r : {&reps[s].paper, &reps[s].sym}) {
        const bool ok = r->passes();
        os << s << ',' << fmt(p) << ',' << r->params.value("convention", "") << ','
           << fmt(norm(pairs[s].first)) << ',' << fmt(norm(pairs[s].second)) << ','
           << fmt(r->lhs) << ',' << fmt(r->rhs) << ',' << fmt(r->margin) << ','
           << fmt(r->err_estimate) << ',' << (ok ? 1 : 0) << '\n';
      }
      pass_paper += reps[s].paper.passes();
      pass_sym += reps[s].sym.passes();
    }
    summary.push_back({{"p", p},
                       {"samples", reps.size()},
                       {"passes_paper", pass_paper},
                       {"passes_sym", pass_sym}});
  }
  write_text(c, "povzner.csv", os.str());
  write_json(c, "povzner.json", {{"orders", summary}});
  return 0;
}

// weakform: {eta: [[0,0,0], [1,0,0]], phi: [1, 2]}. Signed-bound reports for
// phi_p = |xi|^{2p}, plus the conservation rows gain - loss for 1, xi_i, |xi|^2.
inline int cmd_weakform(const Context& c) {
  const auto& f = require_density(c);
  const auto blk = c.cfg.block("weakform");
  std::vector<MultiIndex> etas{MultiIndex()};
  std::vector<double> phis{1.0};
  if (blk) {
    if (const auto e = blk["eta"]) {
      if (!e.IsSequence() || e.size() == 0)
        throw ConfigError(line_of(e), "'eta' must be a non-empty list");
      etas.clear();
      for (const auto& x : e) etas.push_back(read_multi_index(x, "eta"));
    }
    phis = get<std::vector<double>>(blk, "phi", phis);
  }
  PairOptions opt;
  opt.threads = c.threads;
  std::ostringstream os;
  os << csv_header(c) << "case_id,eta,phi,lhs,rhs,margin,err_estimate,passes\n";
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& eta : etas)
    for (double p : phis) {
      const std::string id = "eta=" + eta.str(c.cfg.n()) + ",p=" + fmt(p);
      const auto r = signed_bound_check(f, eta, TestFunction::power(p), c.cfg.kernel, opt, id);
      reports.push_back(r.to_json());
      os << '"' << id << "\"," << eta.str(c.cfg.n()) << ',' << fmt(p) << ',' << fmt(r.lhs) << ','
         << fmt(r.rhs) << ',' << fmt(r.margin) << ',' << fmt(r.err_estimate) << ','
         << (r.passes() ? 1 : 0) << '\n';
    }
  nlohmann::json cons = nlohmann::json::array();
  std::vector<TestFunction> inv{TestFunction::power(0.0), TestFunction::power(1.0)};
  for (int i = 0; i < c.cfg.n(); ++i) inv.push_back(TestFunction::coordinate(i));
  for (const auto& phi : inv) {
    const auto gl = weak_gain_loss(f, f, phi, c.cfg.kernel, opt);
    cons.push_back({{"phi", phi.name()}, {"gain", gl.gain}, {"loss", gl.loss}, {"net", gl.net()}});
  }
  write_text(c, "weakform.csv", os.str());
  write_json(c, "weakform.json", {{"signed_bound", reports}, {"conservation", cons}});
  return 0;
}

// hierarchy: {eta, k0, k1, k_alpha, m0_sup, w_norm, p_max, k, q, p_limit,
// tail_limit, t_end, observe}. Without k and q the initial growth constants
// are fitted to the density's moments; t_end > 0 also integrates the
// truncated hierarchy and reports its worst ratio to the envelope.
inline int cmd_hierarchy(const Context& c) {
  const auto blk = c.cfg.block("hierarchy");
  const YAML::Node b = blk ? blk : YAML::Node(YAML::NodeType::Map);
  HierarchyParams hp;
  hp.alpha = c.cfg.kernel.alpha;
  hp.cross_section = c.cfg.kernel.cross_section;
  hp.b = c.cfg.b;
  hp.eta = read_multi_index(b["eta"], "eta");
  hp.k0 = get<double>(b, "k0", 1.0);
  hp.k1 = get<double>(b, "k1", 1.0);
  hp.k_alpha = get<double>(b, "k_alpha", 1.0);
  hp.m0_sup = get<double>(b, "m0_sup", 1.0);
  hp.w_norm = get<double>(b, "w_norm", 1.0);
  hp.p_max = get<double>(b, "p_max", 20.0);
  hp.k = get<double>(b, "k", 1.0);
  hp.q = get<double>(b, "q", 1.0);
  PipelineOptions po;
  po.p_limit = get<double>(b, "p_limit", po.p_limit);
  po.tail_limit = get<double>(b, "tail_limit", po.tail_limit);
  try {
    hp.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(line_of(b), e.what());
  }

  MomentTable initial;
  const MomentTable* init_ptr = nullptr;
  nlohmann::json fitted = nullptr;
  if (c.cfg.has_density) {
    const auto nus = lower_set(hp.eta);
    ShellOptions so;
    so.p_max = hp.p_max + 1.0;
    initial = moment_table_from_density(c.cfg.density, nus, hp.grid(), hp.alpha, hp.b_value(), so);
    init_ptr = &initial;
    if (!b["k"] && !b["q"]) {
      double K = 1.0, Q = 1.0;
      for (const auto& nu : nus) {
        const auto fit = fit_geometric_bound(initial, nu, hp.grid());
        K = std::max(K, fit.K);
        Q = std::max(Q, fit.Q);
      }
      hp.k = K;
      hp.q = Q;
      fitted = {{"k", K}, {"q", Q}};
    }
    if (hp.eta == MultiIndex() && !b["w_norm"])
      hp.w_norm = std::max(1.0, c.cfg.density.signed_integral({2, 0, 0}) +
                                    c.cfg.density.signed_integral({0, 2, 0}) +
                                    c.cfg.density.signed_integral({0, 0, 2}));
  }
  const auto res = propagate_bounds(hp, init_ptr, po);
  nlohmann::json out = res.to_json();
  out["params"] = {{"eta", hp.eta.str(c.cfg.n())}, {"alpha", hp.alpha},
                   {"b", hp.b_value()},            {"k", hp.k},
                   {"q", hp.q},                    {"w_norm", hp.w_norm},
                   {"m0_sup", hp.m0_sup},          {"p_max", hp.p_max},
                   {"fitted", fitted}};
  const double t_end = get<double>(b, "t_end", 0.0);
  if (t_end > 0.0) {
    const auto obs = get<std::vector<double>>(b, "observe", {});
    const auto tr = integrate_truncated_hierarchy(hp, res, init_ptr, t_end, obs);
    double worst = 0.0;
    for (const auto& [key, e] : tr.table.entries())
      worst = std::max(worst, e.z / res.level(key.nu).envelope(key.p));
    out["truncated"] = {{"completed", tr.completed},
                        {"t_reached", tr.t_reached},
                        {"max_ratio_to_envelope", worst}};
  }
  write_text(c, "hierarchy.csv", csv_header(c) + res.to_csv(hp.p_max));
  write_json(c, "hierarchy.json", out);
  return 0;
}

// dsmc: {N, dt, t_end, observe_every (all in initial mean free times),
// orders, entropy, kde_r0}.
inline int cmd_dsmc(const Context& c) {
  const auto& f = require_density(c);
  const auto blk = c.cfg.block("dsmc");
  const YAML::Node b = blk ? blk : YAML::Node(YAML::NodeType::Map);
  const auto N = get<std::size_t>(b, "N", 100000);
  const double dt = get<double>(b, "dt", 0.1);
  const double t_end = get<double>(b, "t_end", 2.0);
  const double every = get<double>(b, "observe_every", 0.5);
  const auto orders = get<std::vector<double>>(b, "orders", {1.0, 2.0, 3.0});
  const bool entropy = get<bool>(b, "entropy", true);
  const double r0 = get<double>(b, "kde_r0", 0.0);
  if (N < 2 || !(dt > 0.0) || t_end < 0.0 || orders.empty())
    throw ConfigError(line_of(b), "dsmc needs N >= 2, dt > 0, t_end >= 0 and some orders");
  DsmcOptions opt;
  opt.threads = c.threads;
  auto e = init_from_density(f, c.cfg.kernel, N, c.seed, opt);
  const double tau = mean_free_time(e);
  nlohmann::json checkpoints = nlohmann::json::array();
  auto observe = [&](const ParticleEnsemble& en, double t) {
    nlohmann::json cp{{"t", t}, {"t_mft", t / tau}};
    if (entropy) cp["entropy"] = knn_entropy(en);
    if (r0 > 0.0) cp["kde_lower_bound"] = kde_lower_bound(en, r0).c;
    checkpoints.push_back(cp);
  };
  const auto r = run(e, t_end * tau, orders, every * tau, dt * tau, observe);
  nlohmann::json md{{"N", N},
                    {"mean_free_time", tau},
                    {"dt", r.dt},
                    {"t_end", t_end * tau},
                    {"energy_drift", r.energy_drift},
                    {"momentum_drift", r.momentum_drift},
                    {"collisions", r.collisions},
                    {"sweeps", r.sweeps},
                    {"checkpoints", checkpoints}};
  nlohmann::json se = nlohmann::json::array();
  for (const auto& [key, v] : r.std_error) se.push_back({{"p", key.first}, {"t", key.second}, {"std_error", v}});
  md["std_error"] = se;
  write_text(c, "dsmc.csv", csv_header(c) + r.table.to_csv());
  write_json(c, "dsmc.json", md);
  return 0;
}

// tails: {input: moments.csv, s: 2, nu: [0,0,0], k_max: 25, window: 10}.
inline int cmd_tails(const Context& c) {
  const auto blk = c.cfg.block("tails");
  if (!blk) throw ConfigError(line_of(c.cfg.root), "missing 'tails' block");
  const auto path = c.cfg.resolve(get_required<std::string>(blk, "input"));
  std::ifstream in(path);
  if (!in) throw ConfigError(line_of(blk["input"]), "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto table = MomentTable::from_csv(ss.str(), c.cfg.n(), c.cfg.kernel.alpha);
  const double s = get<double>(blk, "s", 2.0);
  const auto nu = read_multi_index(blk["nu"], "nu");
  const int k_max = get<int>(blk, "k_max", 25);
  const int window = get<int>(blk, "window", 10);
  const auto est = tail_order_estimate(table, nu, s, k_max, window);
  write_json(c, "tails.json", {{"estimate", est.to_json()}, {"input", path.string()}});
  return 0;
}

// gainratio: {r: [0.25, 0.5], s: [0], radii: [...], direction: [1, 0, 0]}.
// Ratio Q+(g, W)/W divided by ||g/M_r||_1 along a ray, W = (1+|xi|^2)^s M_r.
inline int cmd_gainratio(const Context& c) {
  const auto& g = require_density(c);
  const auto blk = c.cfg.block("gainratio");
  const YAML::Node b = blk ? blk : YAML::Node(YAML::NodeType::Map);
  const int n = c.cfg.n();
  const auto rs = get<std::vector<double>>(b, "r", {0.25, 0.5});
  const auto ss_ = get<std::vector<int>>(b, "s", {0});
  auto radii = detail::read_grid(b["radii"]);
  if (radii.empty())
    for (int i = 0; i <= 20; ++i) radii.push_back(1.5 * i);
  Vec dir = detail::read_vec(b["direction"], n, "direction");
  if (norm(dir) == 0.0) dir[0] = 1.0;
  dir *= 1.0 / norm(dir);
  std::ostringstream os;
  os << csv_header(c) << "r,s,xi_norm,ratio,normalized\n";
  nlohmann::json rows = nlohmann::json::array();
  double k_emp = 0.0;
  for (double r : rs)
    for (int s : ss_) {
      const auto W = polynomial_weight(n, r, s);
      const double l1 = weighted_l1(g, r);
      std::vector<double> vals(radii.size());
      parallel_for(radii.size(), c.threads, [&](std::size_t i) {
        vals[i] = gain_ratio(g, W, radii[i] * dir, c.cfg.kernel);
      });
      double sup = 0.0;
      bool tail_monotone = true;
      for (std::size_t i = 0; i < radii.size(); ++i) {
        const double v = vals[i] / l1;
        sup = std::max(sup, v);
        if (i > 0 && radii[i - 1] >= 10.0 && v > vals[i - 1] / l1 * (1.0 + 1e-9))
          tail_monotone = false;
        os << fmt(r) << ',' << s << ',' << fmt(radii[i]) << ',' << fmt(vals[i]) << ',' << fmt(v)
           << '\n';
      }
      k_emp = std::max(k_emp, sup);
      rows.push_back({{"r", r}, {"s", s}, {"sup_normalized", sup}, {"nonincreasing_tail", tail_monotone}});
    }
  const auto loss = loss_lower_constant(g, c.cfg.kernel.alpha);
  write_text(c, "gainratio.csv", os.str());
  write_json(c, "gainratio.json",
             {{"K_emp", k_emp}, {"curves", rows}, {"loss_lower_constant", loss.k_alpha}});
  return 0;
}

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"gamma", "povzner",  "weakform", "hierarchy",
                                              "dsmc",  "tails",    "gainratio"};
  return names;
}

inline int run_subcommand(const Context& c) {
  if (c.command == "gamma") return cmd_gamma(c);
  if (c.command == "povzner") return cmd_povzner(c);
  if (c.command == "weakform") return cmd_weakform(c);
  if (c.command == "hierarchy") return cmd_hierarchy(c);
  if (c.command == "dsmc") return cmd_dsmc(c);
  if (c.command == "tails") return cmd_tails(c);
  if (c.command == "gainratio") return cmd_gainratio(c);
  throw InvalidInput("unknown subcommand '" + c.command + "'");
}

}  // namespace boltzmom::cli
