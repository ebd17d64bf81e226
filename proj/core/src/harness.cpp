#include "nlsregime/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "exp_common.hpp"

namespace nlsr {

namespace {

using nlohmann::json;

json exponential_overlap(bool omega_end = true) {
  return {{"type", "separable"}, {"kernel", "exponential"}, {"c", 4.0},   {"R0", 64.0},
          {"strength", -0.35},   {"g1", 0.3},               {"omega_end", omega_end}};
}

json constant_overlap(double q0) { return {{"type", "constant"}, {"q0", q0}}; }

json sqrt_model() { return {{"family", "sqrt"}, {"params", {{"mass", 1.0}}}}; }

json default_params(const std::string& e) {
  const double pi = std::numbers::pi;
  if (e == "bands") {
    json m = sqrt_model();
    m["susceptibility"] = exponential_overlap();
    return {{"model", m}, {"n0", 1}, {"k_star", 1.0}, {"n_k", 257}};
  }
  if (e == "rectify") {
    return {{"families",
             json::array({json{{"family", "2-cos"}, {"params", json::object()}, {"k_star", pi / 3}},
                          json{{"family", "sqrt"}, {"params", {{"mass", 1.0}}}, {"k_star", 1.0}},
                          json{{"family", "cospoly"},
                               {"params", {{"coeffs", {1.8, -1.0, 0.1}}}},
                               {"k_star", 1.0}}})},
            {"nu", {1, 2, 3, 4}},
            {"xi_max", 0.1},
            {"n_points", 201},
            {"residual_tol", 1e-10},
            {"eta_min", 1e-3},
            {"eta_max", 1e-1},
            {"n_eta", 9},
            {"slope_tol", 0.3}};
  }
  if (e == "sphm") {
    return {{"hessian", {{0.0, 2.0}, {2.0, 0.0}}},
            {"theta_min", 1e-3},
            {"theta_max", 1e-1},
            {"n_theta", 7},
            {"n3", {0, 1}},
            {"slope_tol", 0.3},
            {"check_theta", 0.1},
            {"check_value", 4.96e-3},
            {"check_rel_tol", 0.05}};
  }
  if (e == "harmonic") {
    return {{"kernel", {{"kind", "exponential"}, {"c", 1.0}, {"R0", 1.0}}},
            {"omega", {1.2, 1.2, -1.2}},
            {"tau", 0.45},
            {"profile_center", 0.5},
            {"profile_var", 0.02},
            {"rho_min", 1e-3},
            {"rho_max", 2e-2},
            {"n_rho", 6},
            {"slope_tol_n1_0", 0.2},
            {"slope_tol_n1_1", 0.3}};
  }
  if (e == "suppression") {
    json m = {{"family", "2-cos"}, {"params", json::object()}};
    m["susceptibility"] = exponential_overlap();
    return {{"model", m},
            {"n0", 1},
            {"k_star", pi / 3},
            {"beta", 0.01},
            {"alpha", 1e-3},
            {"tau0", 0.1},
            {"tau_star", 0.2},
            {"n_k", 4200},
            {"pi0", 0.1},
            {"rho_min", 1e-3},
            {"rho_max", 1e-1},
            {"n_rho", 5},
            {"panels_per_period", 2.0},
            {"phase_samples", 8},
            {"generic_margin", 1e-3},
            {"slope_tol", 0.2},
            {"flat_tol", 0.2}};
  }
  if (e == "ladder") {
    json m = sqrt_model();
    m["susceptibility"] = exponential_overlap();
    m["q5"] = 0.02 / 9.0;
    return {{"model", m},
            {"n0", 1},
            {"k_star", pi / 2},
            {"scaling",
             {{"c_a", 1.0},
              {"kappa0", 2.0},
              {"c_r", 1.0},
              {"kappa1", 2.0},
              {"alpha0", 2.0},
              {"beta_sweep", {0.16, 0.11, 0.08, 0.057, 0.04}}}},
            {"profile", {{"family", "gauss"}, {"amp", 1.0}, {"width", 1.0}}},
            {"tau0", 0.1},
            {"tau_star", 1.0},
            {"dtau", 1e-3},
            {"error_every", 0.05},
            {"L_over_beta", 40.0},
            {"pi0_factor", 24.0},
            {"pi0_cap", 1.45},
            {"n1", 1},
            {"current_iterations", 4},
            {"orders",
             json::array({json{{"nu", 2}, {"sigma", 0}, {"quintic", false}, {"target", 1.0}, {"tol", 0.3}},
                          json{{"nu", 3}, {"sigma", 1}, {"quintic", false}, {"target", 2.0}, {"tol", 0.3}},
                          json{{"nu", 4}, {"sigma", 2}, {"quintic", true}, {"target", 3.0}, {"tol", 0.4}}})}};
  }
  if (e == "superposition") {
    json m = sqrt_model();
    m["susceptibility"] = exponential_overlap();
    return {{"model", m},
            {"n0", 1},
            {"k1", 0.4},
            {"k2", 2.2},
            {"beta", 0.03},
            {"pi0", 0.35},
            {"tau0", 1.0},
            {"tau_star", 1.5},
            {"alpha0", 2.0},
            {"x_sweep", {0.01, 0.018, 0.032, 0.056, 0.1}},
            {"alpha_factor", 1.0},
            {"dtau", 2e-3},
            {"margin_over_beta", 80.0},
            {"pad", 1.1},
            {"gvm_margin", 0.05},
            {"slope_min", 3.0},
            {"same_slope_max", 1.2}};
  }
  if (e == "soliton") {
    json m = sqrt_model();
    m["susceptibility"] = constant_overlap(-1.0);
    return {{"model", m},
            {"n0", 1},
            {"k_star", 1.0},
            {"beta", 0.05},
            {"width_factor", 3.0},
            {"L_over_width", 60.0},
            {"points_per_width", 16},
            {"tau_end", 1.0},
            {"dtau", 1e-3},
            {"trace_every", 0.01},
            {"nonlinear_tol", 0.05},
            {"linear_decay_min", 0.2}};
  }
  if (e == "soundness") {
    json m = sqrt_model();
    m["susceptibility"] = constant_overlap(-1.0);
    return {{"model", m},
            {"n0", 1},
            {"k_star", 1.0},
            {"beta", 0.05},
            {"width_factor", 3.0},
            {"L_over_width", 60.0},
            {"points_per_width", 16},
            {"dtau", 1e-3},
            {"norm_tol", 1e-8},
            {"soliton_tol", 1e-3},
            {"decay_rel_tol", 0.01},
            {"source_tol", 1e-8},
            {"source_tau0", 0.1},
            {"source_tau_end", 0.3},
            {"source_dtau", 2.5e-4}};
  }
  if (e == "bidirectional") {
    json m = sqrt_model();
    m["susceptibility"] = constant_overlap(1e-3);
    return {{"model", m},
            {"n0", 1},
            {"k_star", 1.0},
            {"beta", 0.1},
            {"tau_end", 1.0},
            {"rho_sweep", {0.004, 0.008, 0.016, 0.032, 0.064}},
            {"dt", 0.02},
            {"margin_over_beta", 40.0},
            {"points_per_width", 8},
            {"slope_tol", 0.2},
            {"decouple_tol", 1e-10}};
  }
  if (e == "lattice") {
    json m = {{"family", "2-cos"}, {"params", json::object()}};
    m["susceptibility"] = constant_overlap(0.01);
    return {{"model", m},
            {"n0", 1},
            {"k_star", pi / 3},
            {"beta_sweep", {0.2, 0.14, 0.1, 0.07, 0.05}},
            {"dt", 0.05},
            {"margin_over_beta", 20.0},
            {"sample_every", 40},
            {"slope_min", 0.8},
            {"xi_min", 1e-3},
            {"xi_max", 1e-1},
            {"n_xi", 7},
            {"defect_target", 3.0},
            {"defect_tol", 0.3}};
  }
  throw Error("unknown experiment '" + e + "'");
}

void flatten(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object() && !j.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out.push_back(prefix);
  }
}

// Model sub-trees are free-form; everything else must match the defaults.
bool free_form(const std::string& path) {
  return path == "model" || path.rfind("model.", 0) == 0 || path == "families" ||
         path == "orders" || path == "profile";
}

std::string key_list(const std::vector<std::string>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
  return s;
}

void merge_into(json& dst, const json& src, const std::string& prefix,
                const std::vector<std::string>& valid) {
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!dst.contains(it.key()))
      throw Error("unknown config key '" + path + "'; valid keys: " + key_list(valid));
    if (free_form(path) || !dst[it.key()].is_object() || !it.value().is_object()) {
      dst[it.key()] = it.value();
    } else {
      merge_into(dst[it.key()], it.value(), path, valid);
    }
  }
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"bands",     "rectify",       "sphm",     "harmonic",      "suppression", "ladder",
          "superposition", "soliton", "soundness", "bidirectional", "lattice"};
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  return ExperimentConfig{experiment, default_params(experiment)};
}

std::vector<std::string> ExperimentConfig::valid_keys() const {
  std::vector<std::string> keys;
  flatten(params, "", keys);
  return keys;
}

void ExperimentConfig::merge(const json& user) {
  if (!user.is_object()) throw Error("config root must be a JSON object");
  json u = user;
  if (u.contains("experiment")) {
    const std::string e = u.at("experiment").get<std::string>();
    if (e != experiment)
      throw Error("config is for experiment '" + e + "' but '" + experiment + "' was requested");
    u.erase("experiment");
  }
  merge_into(params, u, "", valid_keys());
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error("override '" + assignment + "' is not of the form KEY=VALUE");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &params;
  std::string path;
  size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    path += (path.empty() ? "" : ".") + part;
    const bool last = dot == std::string::npos;
    if (!node->is_object() || !node->contains(part)) {
      if (node->is_object() && path != part && free_form(path)) {
        (*node)[part] = json::object();
      } else {
        throw Error("unknown config key '" + key + "'; valid keys: " + key_list(valid_keys()));
      }
    }
    node = &(*node)[part];
    if (last) break;
    start = dot + 1;
  }
  *node = value;
}

double ExperimentConfig::alpha(double beta) const {
  return detail::num(params, "scaling.c_a") * std::pow(beta, detail::num(params, "scaling.kappa0"));
}

double ExperimentConfig::rho(double beta) const {
  return detail::num(params, "scaling.c_r") * std::pow(beta, detail::num(params, "scaling.kappa1"));
}

void ExperimentConfig::check_time_window() const {
  if (!params.contains("scaling")) return;
  const double tau_star = detail::num(params, "tau_star");
  const double alpha0 = detail::num(params, "scaling.alpha0");
  for (double b : detail::numbers(params, "scaling.beta_sweep")) {
    if (!(b > 0.0)) throw Error("beta_sweep entries must be positive");
    const double a = alpha(b), r = rho(b);
    if (a > 0.0 && tau_star / r > alpha0 / a * (1.0 + 1e-12))
      throw Error("time-window constraint tau_star/rho <= alpha0/alpha violated at beta = " +
                  std::to_string(b) + " (tau_star/rho = " + std::to_string(tau_star / r) +
                  ", alpha0/alpha = " + std::to_string(alpha0 / a) + ")");
  }
}

rvec Table::column(const std::string& n) const {
  const auto it = std::find(header.begin(), header.end(), n);
  if (it == header.end()) throw Error("table '" + name + "' has no column '" + n + "'");
  const size_t c = static_cast<size_t>(it - header.begin());
  rvec v;
  for (const auto& r : rows) v.push_back(r.at(c));
  return v;
}

Table& ScalingReport::table(const std::string& n) {
  for (auto& t : tables)
    if (t.name == n) return t;
  throw Error("report has no table '" + n + "'");
}

const Table& ScalingReport::table(const std::string& n) const {
  for (const auto& t : tables)
    if (t.name == n) return t;
  throw Error("report has no table '" + n + "'");
}

bool slope_passes(const SlopeCheck& c) {
  if (!c.fit.defined || !std::isfinite(c.fit.slope)) return false;
  if (c.mode == "equal") return std::abs(c.fit.slope - c.target) <= c.tol;
  if (c.mode == "at_least") return c.fit.slope >= c.target;
  if (c.mode == "flat") return std::abs(c.fit.slope) <= c.tol;
  throw Error("unknown slope mode '" + c.mode + "'");
}

void ScalingReport::fit_slopes() {
  for (auto& s : slopes) {
    const Table& t = table(s.table);
    const rvec x = t.column(s.x), y = t.column(s.y);
    rvec xs, ys;
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
        xs.push_back(x[i]);
        ys.push_back(y[i]);
      }
    s.fit = xs.size() >= 2 ? fit_loglog(xs, ys) : SlopeFit{};
    s.pass = slope_passes(s);
  }
}

bool ScalingReport::pass() const {
  if (partial || !error.empty()) return false;
  for (const auto& s : slopes)
    if (!s.pass) return false;
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&]() {
      for (int i = next++; i < n; i = next++) {
        {
          std::lock_guard<std::mutex> lk(m);
          if (first) return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(m);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NLSREGIME_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw Error(std::string("NLSREGIME_JOBS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

ScalingReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const std::string& e = cfg.experiment;
  if (e == "bands") return run_bands(cfg, opt);
  if (e == "rectify") return run_rectify(cfg, opt);
  if (e == "sphm") return run_sphm(cfg, opt);
  if (e == "harmonic") return run_harmonic(cfg, opt);
  if (e == "suppression") return run_fm_suppression(cfg, opt);
  if (e == "ladder") return run_ladder(cfg, opt);
  if (e == "superposition") return run_superposition(cfg, opt);
  if (e == "soliton") return run_soliton_balance(cfg, opt);
  if (e == "soundness") return run_enls_soundness(cfg, opt);
  if (e == "bidirectional") return run_bidirectional(cfg, opt);
  if (e == "lattice") return run_lattice(cfg, opt);
  throw Error("unknown experiment '" + e + "'");
}

namespace detail {

const json& at_path(const json& j, const std::string& path) {
  const json* node = &j;
  size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw Error("missing config key '" + path + "'");
    node = &node->at(part);
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

double num(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_number()) throw Error("config key '" + path + "' must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_number_integer()) throw Error("config key '" + path + "' must be an integer");
  return v.get<int>();
}

bool flag(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_boolean()) throw Error("config key '" + path + "' must be true or false");
  return v.get<bool>();
}

rvec numbers(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_array()) throw Error("config key '" + path + "' must be an array of numbers");
  rvec out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error("config key '" + path + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

DispersionModel model_at(const json& j, const std::string& path) { return model_from_json(at_path(j, path)); }

void say(const RunOptions& opt, const std::string& msg) {
  if (opt.verbose && opt.log) opt.log(msg);
}

void add_slope(ScalingReport& r, const std::string& table, const std::string& x, const std::string& y,
               const std::string& mode, double target, double tol) {
  SlopeCheck c;
  c.table = table;
  c.x = x;
  c.y = y;
  c.mode = mode;
  c.target = target;
  c.tol = tol;
  r.slopes.push_back(c);
}

}  // namespace detail

}  // namespace nlsr
