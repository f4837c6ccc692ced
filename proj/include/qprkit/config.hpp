#pragma once

#include <map>
#include <string>
#include <vector>

namespace qprkit {

/// Flat key=value settings. Blank lines and lines starting with '#' are
/// ignored; whitespace around keys and values is trimmed.
using ConfigMap = std::map<std::string, std::string>;

/// Throws ConfigError naming the offending line.
ConfigMap parse_config(const std::string& text);
ConfigMap load_config_file(const std::string& path);

/// Entries of `over` replace those of `base`.
ConfigMap merge_config(ConfigMap base, const ConfigMap& over);

// Typed lookups. Missing keys give the fallback; malformed values throw
// ConfigError.
std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback);
int get_int(const ConfigMap& c, const std::string& key, int fallback);
double get_double(const ConfigMap& c, const std::string& key, double fallback);
/// Comma-separated list.
std::vector<std::string> get_list(const ConfigMap& c, const std::string& key,
                                  const std::vector<std::string>& fallback);
std::vector<double> get_double_list(const ConfigMap& c, const std::string& key,
                                    const std::vector<double>& fallback);

/// Comma-separated numbers; "a:b:step" expands to an inclusive range.
std::vector<double> parse_double_list(const std::string& text);

}  // namespace qprkit
