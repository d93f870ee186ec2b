#include "idl/config_file.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace idl {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    raw = raw.substr(0, raw.find('#')); // comments run to end of line
    const std::string line = trim(raw);
    pos = end + 1;
    ++line_no;
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(std::move(key), std::move(value)).second)
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key");
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_key_values(text.str());
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v))
    throw ValidationError(key + ": '" + value + "' is not a finite number");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
    throw ValidationError(key + ": '" + value + "' is not an integer");
  return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  if (trim(value).empty())
    return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(parse_double(key, trim(std::string_view(value).substr(
                                         start, comma == std::string::npos ? std::string::npos : comma - start))));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

} // namespace idl
