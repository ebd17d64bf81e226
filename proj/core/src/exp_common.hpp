#pragma once

// Helpers shared by the experiment runners.

#include <nlohmann/json.hpp>
#include <string>

#include "nlsregime/dispersion.hpp"
#include "nlsregime/harness.hpp"

namespace nlsr::detail {

// Value at a dotted path; throws Error naming the key when missing.
const nlohmann::json& at_path(const nlohmann::json& j, const std::string& path);
double num(const nlohmann::json& j, const std::string& path);
int integer(const nlohmann::json& j, const std::string& path);
bool flag(const nlohmann::json& j, const std::string& path);
rvec numbers(const nlohmann::json& j, const std::string& path);

DispersionModel model_at(const nlohmann::json& j, const std::string& path = "model");

void say(const RunOptions& opt, const std::string& msg);

// Adds a slope check to the report.
void add_slope(ScalingReport& r, const std::string& table, const std::string& x,
               const std::string& y, const std::string& mode, double target, double tol);

}  // namespace nlsr::detail
