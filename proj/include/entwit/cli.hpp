#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "entwit/product_optimizer.hpp"

namespace entwit::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kInputError = 2 };

/// One line of a reproduction table.
struct ReproRow {
  std::string name;
  std::string expected;
  std::string computed;
  std::string tolerance;
  bool pass = false;
};

/// Runs the named worked example ("3.3", "3.4" or "3.5").
std::vector<ReproRow> reproduce(const std::string& example, const OptimizerConfig& cfg);

/// Product dimension cap for densifying weighted-shift states.
inline constexpr long kDenseSequenceCap = 1024;

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entwit::cli
