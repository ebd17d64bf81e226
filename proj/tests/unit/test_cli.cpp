#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = nlsr::cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

fs::path temp(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nlsregime_cli_" + name);
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

}  // namespace

TEST(Cli, SubcommandsExpand) {
  EXPECT_EQ(nlsr::cli::expand_subcommand("integrals"), (std::vector<std::string>{"sphm", "harmonic"}));
  EXPECT_EQ(nlsr::cli::expand_subcommand("enls"), (std::vector<std::string>{"soundness", "bidirectional"}));
  EXPECT_EQ(nlsr::cli::expand_subcommand("ladder"), std::vector<std::string>{"ladder"});
  EXPECT_EQ(nlsr::cli::subcommands().size(), 9u);
}

TEST(Cli, MissingConfigExitsOne) {
  const Result r = run({"ladder", "--config", "/definitely/not/here.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("cannot read config"), std::string::npos);
}

TEST(Cli, ParseErrorHasLineAndColumn) {
  const auto p = temp("bad.json");
  std::ofstream(p) << "{\n  \"n0\": 1,\n  \"k_star\": ]\n}\n";
  const Result r = run({"bands", "--config", p.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3, column 13"), std::string::npos) << r.err;
}

TEST(Cli, LineColumnHelper) {
  EXPECT_EQ(nlsr::cli::line_column("ab\ncd", 5), "line 2, column 2");
  EXPECT_EQ(nlsr::cli::line_column("x", 1), "line 1, column 1");
}

TEST(Cli, UnknownKeyExitsOne) {
  const Result r = run({"bands", "--set", "n_bands=3", "--out", temp("unk").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("valid keys"), std::string::npos);
}

TEST(Cli, UnknownSubcommandExitsOne) { EXPECT_EQ(run({"fly"}).code, 1); }

TEST(Cli, BandsWritesSummaryAndPasses) {
  const auto out = temp("bands");
  const Result r = run({"bands", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "bands.csv"));
  const json s = read_json(out / "summary.json");
  EXPECT_EQ(s["count"], 1);
  EXPECT_EQ(s["experiments"][0]["experiment"], "bands");
}

TEST(Cli, LadderConfigAndOverrideEcho) {
  const auto out = temp("ladder");
  const auto cfg = temp("classical.json");
  std::ofstream(cfg) << R"({"scaling": {"beta_sweep": [0.16, 0.11]}, "tau_star": 0.5})";
  const Result r = run({"ladder", "--config", cfg.string(), "--set", "scaling.beta_sweep=[0.16,0.14]", "--out",
                        out.string(), "--jobs", "2"});
  EXPECT_TRUE(r.code == 0 || r.code == 2) << r.err;
  EXPECT_TRUE(fs::exists(out / "ladder.csv"));
  const json s = read_json(out / "summary.json");
  EXPECT_EQ(s["experiments"][0]["config"]["scaling"]["beta_sweep"], json({0.16, 0.14}));
  EXPECT_EQ(s["experiments"][0]["config"]["tau_star"], 0.5);
  EXPECT_EQ(s["experiments"][0]["slopes"].size(), 3u);
  EXPECT_EQ(r.code == 0, s["pass"].get<bool>());
}

TEST(Cli, GroupedOverridesNeedExperimentPrefix) {
  const auto out = temp("grouped");
  EXPECT_EQ(run({"integrals", "--set", "theta_min=0.01", "--out", out.string()}).code, 1);
  const Result r = run({"integrals", "--set", "harmonic.n_rho=4", "--out", out.string()});
  EXPECT_EQ(r.code, 2);  // the N3 = 0 slope check fails on the bilinear benchmark
  const json s = read_json(out / "summary.json");
  EXPECT_EQ(s["count"], 2);
  EXPECT_EQ(s["experiments"][1]["config"]["n_rho"], 4);
  EXPECT_TRUE(fs::exists(out / "sphm_sphm.csv"));
}
