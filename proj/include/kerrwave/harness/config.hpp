#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

// Flat key/value view of a TOML-like file: `key = value` lines, `[section]`
// headers prefixing later keys with "section.", `#` comments, lists written
// as `a, b, c` or `[a, b, c]`, strings optionally quoted.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse(std::istream& in) {
    ConfigFile c;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw StructuralError("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw StructuralError("config line " + std::to_string(lineno) + ": empty key");
      if (!section.empty()) key = section + "." + key;
      c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw StructuralError("cannot read config file " + path);
    return parse(f);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : unquote(it->second);
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(it->second, key);
  }

  int get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    if (v != static_cast<int>(v)) throw StructuralError("config key " + key + " must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_list(it->second, key);
  }

  static std::vector<double> parse_list(std::string s, const std::string& key = "list") {
    s = trim(s);
    if (!s.empty() && s.front() == '[') s = s.substr(1, s.size() - (s.back() == ']' ? 2 : 1));
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(to_double(item, key));
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;

  static std::string trim(const std::string& s) {
    const auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
    const auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char ch) { return std::isspace(ch); }).base();
    return b < e ? std::string(b, e) : std::string();
  }
  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
      return s.substr(1, s.size() - 2);
    return s;
  }
  static double to_double(const std::string& s, const std::string& key) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw StructuralError("config key " + key + ": not a number: " + s);
  }
};

}  // namespace kerrwave
