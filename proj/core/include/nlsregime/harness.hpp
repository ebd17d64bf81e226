#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nlsregime/common.hpp"

namespace nlsr {

// Experiment configuration: a JSON tree whose leaf set is fixed by the experiment's
// defaults. Overrides use dotted keys ("scaling.beta_sweep").
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params;

  static ExperimentConfig defaults(const std::string& experiment);
  // Merges a user tree; unknown keys are rejected with the full valid-key list.
  void merge(const nlohmann::json& user);
  // KEY=VALUE with VALUE parsed as JSON, falling back to a plain string.
  void apply_override(const std::string& assignment);
  std::vector<std::string> valid_keys() const;

  // alpha = c_a beta^kappa0, rho = c_r beta^kappa1 from the "scaling" block.
  double alpha(double beta) const;
  double rho(double beta) const;
  // Time-window constraint tau_star / rho <= alpha0 / alpha for every swept beta.
  void check_time_window() const;
};

std::vector<std::string> experiment_names();

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<rvec> rows;
  rvec column(const std::string& name) const;
};

// Slope requirement on one fitted column.
//   equal     |slope - target| <= tol
//   at_least  slope >= target
//   flat      |slope| <= tol
struct SlopeCheck {
  std::string table;
  std::string x;
  std::string y;
  std::string mode = "equal";
  double target = 0.0;
  double tol = 0.3;
  SlopeFit fit;
  bool pass = false;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScalingReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<Table> tables;
  std::vector<SlopeCheck> slopes;
  std::vector<Verdict> verdicts;
  nlohmann::json extra = nlohmann::json::object();
  bool partial = false;
  std::string error;

  Table& table(const std::string& name);
  const Table& table(const std::string& name) const;
  // Fits every slope check from its table (rows with non-positive values skipped).
  void fit_slopes();
  bool pass() const;
};

// Applies the check mode to a fit; undefined fits fail.
bool slope_passes(const SlopeCheck& c);

// Runs fn(i) for i in [0, n) on at most jobs worker threads; results are stored by index.
// The first exception is rethrown after all workers stop.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// Worker count: explicit value when > 0, else NLSREGIME_JOBS, else 1.
int resolve_jobs(int requested);

struct RunOptions {
  int jobs = 1;
  bool verbose = false;
  std::function<void(const std::string&)> log;
};

ScalingReport run_rectify(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_sphm(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_harmonic(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_fm_suppression(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_ladder(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_superposition(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_soliton_balance(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_enls_soundness(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_bidirectional(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_lattice(const ExperimentConfig& cfg, const RunOptions& opt = {});
ScalingReport run_bands(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Dispatch by experiment name.
ScalingReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace nlsr
