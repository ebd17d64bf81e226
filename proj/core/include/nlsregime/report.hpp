#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nlsregime/harness.hpp"

namespace nlsr {

std::string version_string();

// Table as CSV with 17 significant digits and '.' decimal separator.
void write_table_csv(const Table& t, std::ostream& os);

nlohmann::json summary_json(const std::vector<ScalingReport>& reports);

// Writes <name>.csv per table (prefixed by the experiment when several reports share a
// directory) and summary.json. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const std::vector<ScalingReport>& reports,
                                               const std::filesystem::path& out_dir);

}  // namespace nlsr
