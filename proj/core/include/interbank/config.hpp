#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "interbank/model.hpp"

namespace interbank {

// Flat key=value configuration. Keys are the MarketParams field names plus the
// experiment lists g_values, a_values and n_list (comma separated). Lines
// starting with '#' and blank lines are ignored; unknown keys are errors.
struct ConfigFile {
  MarketParams params;
  std::vector<double> g_values;
  std::vector<double> a_values;
  std::vector<int> n_list;
};

ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::filesystem::path& path);

/// Writes the config back in the same format; shortest round-trip decimal representation.
std::string format_config(const ConfigFile& cfg);

}  // namespace interbank
