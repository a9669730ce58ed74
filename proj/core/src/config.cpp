#include "interbank/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "interbank/errors.hpp"

namespace interbank {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view key, int line) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line) + ": '" + std::string(key) +
                      "' expects a number, got '" + std::string(text) + "'");
  }
  return value;
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view text, Parse parse) {
  std::vector<T> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

ConfigFile parse_config(std::string_view text) {
  ConfigFile cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }

    if (double* field = param_field(cfg.params, key)) {
      *field = parse_double(value, key, line_no);
    } else if (key == "g_values" || key == "a_values") {
      auto list = parse_list<double>(value, [&](std::string_view s) {
        return parse_double(s, key, line_no);
      });
      (key == "g_values" ? cfg.g_values : cfg.a_values) = std::move(list);
    } else if (key == "n_list") {
      cfg.n_list = parse_list<int>(value, [&](std::string_view s) {
        const double v = parse_double(s, key, line_no);
        if (v < 1.0 || v != static_cast<double>(static_cast<int>(v))) {
          throw ConfigError("line " + std::to_string(line_no) + ": n_list entries must be positive integers");
        }
        return static_cast<int>(v);
      });
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ConfigFile& cfg) {
  std::ostringstream os;
  for (const auto& name : param_names()) {
    os << name << " = " << shortest(param_value(cfg.params, name)) << '\n';
  }
  auto join = [&](const char* key, const auto& values) {
    if (values.empty()) return;
    os << key << " = ";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os << ',';
      os << shortest(static_cast<double>(values[i]));
    }
    os << '\n';
  };
  join("g_values", cfg.g_values);
  join("a_values", cfg.a_values);
  join("n_list", cfg.n_list);
  return os.str();
}

}  // namespace interbank
