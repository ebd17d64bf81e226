#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsr::cli {

// Experiments a subcommand expands to: "integrals" -> sphm, harmonic; "enls" -> soundness,
// bidirectional; every other subcommand maps to the experiment of the same name.
std::vector<std::string> expand_subcommand(const std::string& sub);
std::vector<std::string> subcommands();

// 0 when every verdict passes, 2 when any verdict fails, 1 on error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "line L, column C" for a byte offset into text (1-based, as reported by the JSON parser).
std::string line_column(const std::string& text, std::size_t byte);

}  // namespace nlsr::cli
