// Runs the nine acceptance criteria with default configurations and prints one
// PASS/FAIL line per criterion. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsregime/harness.hpp"

using namespace nlsr;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::vector<std::string> experiments;
  double limit_s;
};

std::string describe(const ScalingReport& r) {
  std::ostringstream os;
  os.precision(4);
  for (const auto& s : r.slopes) {
    os << " " << s.y << "=";
    if (s.fit.defined)
      os << s.fit.slope;
    else
      os << "undefined";
    os << (s.pass ? "" : "(fail)");
  }
  for (const auto& v : r.verdicts) {
    os << " " << v.name << (v.pass ? "" : "(fail)");
    if (!v.detail.empty()) os << " [" << v.detail << "]";
  }
  if (r.partial) os << " partial: " << r.error;
  return os.str();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "rectification", {"rectify"}, 10},
      {2, "sphm-order", {"sphm"}, 60},
      {3, "selection-rules", {"suppression"}, 300},
      {4, "accuracy-ladder", {"ladder"}, 1800},
      {5, "superposition", {"superposition"}, 1200},
      {6, "envelope-soundness", {"soundness"}, 300},
      {7, "lattice", {"lattice"}, 300},
      {8, "time-harmonic", {"harmonic"}, 120},
      {9, "bidirectional", {"bidirectional"}, 600},
  };
  RunOptions opt;
  opt.jobs = resolve_jobs(0);
  int failed = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& e : c.experiments) {
      try {
        const ExperimentConfig cfg = ExperimentConfig::defaults(e);
        cfg.check_time_window();
        const ScalingReport r = run_experiment(cfg, opt);
        pass = pass && r.pass();
        detail += " " + e + ":" + describe(r);
      } catch (const std::exception& ex) {
        pass = false;
        detail += " " + e + ": error " + ex.what();
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    if (!in_time) detail += " runtime over limit";
    pass = pass && in_time;
    char head[128];
    std::snprintf(head, sizeof head, "%s criterion %d %s (%.1f s, limit %.0f s)", pass ? "PASS" : "FAIL", c.id,
                  c.name.c_str(), secs, c.limit_s);
    std::cout << head << ":" << detail << std::endl;
    if (!pass) ++failed;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
