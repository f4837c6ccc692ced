#include "qprkit/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qprkit/errors.hpp"

namespace qprkit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return d;
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

ConfigMap merge_config(ConfigMap base, const ConfigMap& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

int get_int(const ConfigMap& c, const std::string& key, int fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const double d = to_double(key, it->second);
  if (d != std::floor(d) || std::abs(d) > 2e9) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + it->second + "'");
  }
  return static_cast<int>(d);
}

double get_double(const ConfigMap& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : to_double(key, it->second);
}

std::vector<std::string> get_list(const ConfigMap& c, const std::string& key,
                                  const std::vector<std::string>& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : split(it->second, ',');
}

std::vector<double> get_double_list(const ConfigMap& c, const std::string& key,
                                    const std::vector<double>& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : parse_double_list(it->second);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 3) {
      const double a = to_double("range", parts[0]);
      const double b = to_double("range", parts[1]);
      const double step = to_double("range", parts[2]);
      if (!(step > 0.0) || b < a) throw ConfigError("config: bad range '" + item + "'");
      const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
      for (int i = 0; i < count; ++i) out.push_back(a + i * step);
    } else if (parts.size() == 1) {
      out.push_back(to_double("list", parts[0]));
    } else {
      throw ConfigError("config: bad list item '" + item + "'");
    }
  }
  return out;
}

}  // namespace qprkit
