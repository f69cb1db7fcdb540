#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "criteria_dsmc.hpp"
#include "criteria_gain.hpp"
#include "criteria_gamma.hpp"
#include "criteria_weak.hpp"

using namespace acceptance;

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gamma constants, hard spheres", 1, gamma_hard_sphere},
      {2, "gamma asymptotics", 10, gamma_asymptotics},
      {3, "conservation", 300, conservation},
      {4, "Leibniz rule", 600, leibniz},
      {5, "Povzner margins", 0, povzner},
      {6, "binomial sandwich", 0, binomial_sandwich},
      {7, "comparison bounds", 0, comparison_bounds},
      {8, "bound pipeline vs DSMC", 900, bound_pipeline},
      {9, "tail order", 0, tail_order},
      {10, "DSMC physics", 0, dsmc_physics},
      {11, "gain ratio", 0, gain_ratio_bound},
      {12, "loss lower bound", 0, loss_lower_bound},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Timer t;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = t.seconds();
    bool pass = o.pass;
    if (c.budget_seconds > 0.0 && s > c.budget_seconds) {
      pass = false;
      o.detail += cat(" [over budget ", c.budget_seconds, " s]");
    }
    failed += !pass;
    std::printf("criterion %2d %-32s %s  (%.1f s)  %s\n", c.id, c.title.c_str(),
                pass ? "PASS" : "FAIL", s, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
