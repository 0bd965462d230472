#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcint/cantor.hpp"

namespace mcint::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kBudget = 3 };

/// Runs one command line (without the program name). Reports go to `out`,
/// error payloads {"kind", "message"} to `err`.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Point-set spec: "nodes:q:k<=N", "gaps:q:k<=N", "list:p1,p2,..." or
/// "csv:path" (the x column of a dump).
std::vector<Rational> parse_points(const std::string& spec);

}  // namespace mcint::cli
