#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "interbank/errors.hpp"
#include "interbank/validate.hpp"

namespace interbank::cli {

// Exit statuses. Usage errors come from argument parsing; the rest map the
// library's error categories.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kParameter = 4,
  kNumerical = 5,
  kSimulation = 6,
  kUnsupported = 7,
  kIo = 8,
};

int exit_code(ErrorCategory category);

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

nlohmann::json to_json(const MarketParams& p);
nlohmann::json to_json(const BestResponseResult& r);
nlohmann::json to_json(const ModeComparison& m);

}  // namespace interbank::cli
