#include "nlsregime/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#ifndef NLSR_VERSION
#define NLSR_VERSION "0.1.0"
#endif

namespace nlsr {

using nlohmann::json;

std::string version_string() { return NLSR_VERSION; }

void write_table_csv(const Table& t, std::ostream& os) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  for (size_t i = 0; i < t.header.size(); ++i) buf << (i ? "," : "") << t.header[i];
  buf << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) buf << (i ? "," : "") << row[i];
    buf << '\n';
  }
  os << buf.str();
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const ScalingReport& r) {
  json e;
  e["experiment"] = r.experiment;
  e["config"] = r.config;
  e["slopes"] = json::array();
  for (const auto& s : r.slopes) {
    e["slopes"].push_back({{"table", s.table},
                           {"x", s.x},
                           {"y", s.y},
                           {"mode", s.mode},
                           {"target", s.target},
                           {"tol", s.tol},
                           {"slope", s.fit.defined ? finite_or_null(s.fit.slope) : json(nullptr)},
                           {"halfwidth", s.fit.defined ? finite_or_null(s.fit.halfwidth) : json(nullptr)},
                           {"points", s.fit.points},
                           {"defined", s.fit.defined},
                           {"pass", s.pass}});
  }
  e["verdicts"] = json::array();
  for (const auto& v : r.verdicts)
    e["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  e["tables"] = json::array();
  for (const auto& t : r.tables) e["tables"].push_back(t.name);
  if (!r.extra.empty()) e["extra"] = r.extra;
  e["partial"] = r.partial;
  if (!r.error.empty()) e["error"] = r.error;
  e["pass"] = r.pass();
  return e;
}

}  // namespace

json summary_json(const std::vector<ScalingReport>& reports) {
  json s;
  s["version"] = version_string();
  s["count"] = reports.size();
  s["experiments"] = json::array();
  bool all = true;
  for (const auto& r : reports) {
    s["experiments"].push_back(report_json(r));
    all = all && r.pass();
  }
  s["pass"] = all;
  return s;
}

std::vector<std::filesystem::path> emit_report(const std::vector<ScalingReport>& reports,
                                               const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto open = [](const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    return f;
  };
  const bool prefix = reports.size() > 1;
  for (const auto& r : reports) {
    for (const auto& t : r.tables) {
      const fs::path path = out_dir / ((prefix ? r.experiment + "_" : std::string()) + t.name + ".csv");
      std::ofstream f = open(path);
      write_table_csv(t, f);
      if (!f) throw Error("write failed for " + path.string());
      written.push_back(path);
    }
  }
  const fs::path path = out_dir / "summary.json";
  std::ofstream f = open(path);
  f << summary_json(reports).dump(2) << '\n';
  if (!f) throw Error("write failed for " + path.string());
  written.push_back(path);
  return written;
}

}  // namespace nlsr
