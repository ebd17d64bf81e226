#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nlsregime/harness.hpp"
#include "nlsregime/report.hpp"

namespace nlsr::cli {

using nlohmann::json;

std::vector<std::string> subcommands() {
  return {"bands", "rectify", "integrals", "enls", "lattice", "ladder", "suppression", "superposition", "soliton"};
}

std::vector<std::string> expand_subcommand(const std::string& sub) {
  if (sub == "integrals") return {"sphm", "harmonic"};
  if (sub == "enls") return {"soundness", "bidirectional"};
  return {sub};
}

std::string line_column(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

namespace {

json load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("config " + path + ": parse error at " + line_column(text, e.byte) + ": " + e.what());
  }
}

// Grouped subcommands take a config keyed by experiment name and overrides prefixed with it.
std::vector<ExperimentConfig> build_configs(const std::string& sub, const json& user,
                                            const std::vector<std::string>& sets) {
  const auto names = expand_subcommand(sub);
  std::vector<ExperimentConfig> cfgs;
  const bool grouped = names.size() > 1;
  if (grouped && !user.is_null()) {
    if (!user.is_object()) throw Error(sub + ": config must be an object keyed by experiment");
    for (const auto& [k, v] : user.items())
      if (std::find(names.begin(), names.end(), k) == names.end())
        throw Error(sub + ": unknown config section '" + k + "'; valid sections: sphm/harmonic or soundness/bidirectional");
  }
  for (const auto& name : names) {
    ExperimentConfig c = ExperimentConfig::defaults(name);
    if (!user.is_null()) {
      if (!grouped) c.merge(user);
      else if (user.contains(name)) c.merge(user.at(name));
    }
    cfgs.push_back(std::move(c));
  }
  for (const auto& s : sets) {
    if (!grouped) {
      cfgs[0].apply_override(s);
      continue;
    }
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || (eq != std::string::npos && dot > eq))
      throw Error("override '" + s + "' must start with an experiment name for '" + sub + "'");
    const std::string head = s.substr(0, dot);
    auto it = std::find(names.begin(), names.end(), head);
    if (it == names.end()) throw Error("override '" + s + "': unknown experiment '" + head + "'");
    cfgs[it - names.begin()].apply_override(s.substr(dot + 1));
  }
  return cfgs;
}

std::string describe(const std::string& s) {
  static const std::map<std::string, std::string> d{
      {"bands", "band table, Taylor jet and genericity at k_star"},
      {"rectify", "rectifying coordinate residuals and inverse-offset slopes"},
      {"integrals", "stationary-phase and time-harmonic expansion orders"},
      {"enls", "envelope solver soundness and bidirectional coupling"},
      {"lattice", "lattice NLS against the continuum NLS"},
      {"ladder", "NLS / ENLS3 / ENLS4 accuracy ladder against the modal reference"},
      {"suppression", "non-FM over FM response ratio against rho"},
      {"superposition", "two-doublet superposition residual"},
      {"soliton", "soliton balance with and without the nonlinearity"}};
  return d.at(s);
}

void print_report(const ScalingReport& r, std::ostream& out) {
  for (const auto& s : r.slopes) {
    out << r.experiment << " slope " << s.y << " vs " << s.x << ": ";
    if (s.fit.defined)
      out << s.fit.slope << " +- " << s.fit.halfwidth;
    else
      out << "undefined";
    out << " (" << s.mode << " " << s.target << ", tol " << s.tol << ") " << (s.pass ? "PASS" : "FAIL") << '\n';
  }
  for (const auto& v : r.verdicts)
    out << r.experiment << " verdict " << v.name << ": " << (v.pass ? "PASS" : "FAIL")
        << (v.detail.empty() ? "" : " " + v.detail) << '\n';
  if (r.partial) out << r.experiment << " partial report: " << r.error << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope-model hierarchy and approximation-order experiments", "nlsregime"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1, 1);
  std::string config_path, out_dir = "out";
  std::vector<std::string> sets;
  int jobs = 0;
  bool verbose = false;
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : subcommands()) {
    auto* sc = app.add_subcommand(s, describe(s));
    sc->add_option("--config", config_path, "JSON config file");
    sc->add_option("--out", out_dir, "output directory")->capture_default_str();
    sc->add_option("--set", sets, "KEY=VALUE override, dotted keys, value parsed as JSON");
    sc->add_option("--jobs", jobs, "worker threads (default NLSREGIME_JOBS or 1)");
    sc->add_flag("--verbose", verbose, "progress messages on stderr");
    subs[s] = sc;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  std::string sub;
  for (const auto& [name, sc] : subs)
    if (sc->parsed()) sub = name;

  try {
    const json user = config_path.empty() ? json() : load_config(config_path);
    auto cfgs = build_configs(sub, user, sets);
    for (auto& c : cfgs) c.check_time_window();
    RunOptions opt;
    opt.jobs = resolve_jobs(jobs);
    opt.verbose = verbose;
    opt.log = [&err](const std::string& m) { err << m << '\n'; };
    std::vector<ScalingReport> reports;
    bool partial = false;
    for (const auto& c : cfgs) {
      reports.push_back(run_experiment(c, opt));
      print_report(reports.back(), out);
      partial = partial || reports.back().partial;
    }
    const auto paths = emit_report(reports, out_dir);
    for (const auto& p : paths) out << "wrote " << p.string() << '\n';
    if (partial) return 1;
    for (const auto& r : reports)
      if (!r.pass()) return 2;
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nlsr::cli
