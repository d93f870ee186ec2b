#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace idl {

/// Parses `key = value` lines. '#' starts a comment that runs to the end of
/// the line; blank lines are skipped and a repeated key is an error.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

double parse_double(const std::string& key, const std::string& value);
long long parse_integer(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);

} // namespace idl
