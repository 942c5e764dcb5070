#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aperiodic {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A TOML-style key-value file: [section] tables, key = value lines, where a
// value is a quoted string, a number, a boolean, or an array of numbers.
// Keys are flattened to "section.key".
class Config {
 public:
  struct Value {
    enum class Kind { string, number, boolean, array } kind = Kind::string;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> arr;
    int line = 0;
  };

  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip_comment(line);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated table header");
        section = trim(s.substr(1, s.size() - 2));
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty table name");
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(s.substr(0, eq));
      std::string val = trim(s.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      std::string full = section.empty() ? key : section + "." + key;
      if (cfg.values_.count(full))
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
      cfg.values_[full] = parse_value(val, lineno);
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::string) throw ConfigError("key '" + key + "' must be a string");
    return v.str;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    return has(key) ? get_string(key) : dflt;
  }

  double get_number(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::number) throw ConfigError("key '" + key + "' must be a number");
    return v.num;
  }
  double get_number(const std::string& key, double dflt) const {
    return has(key) ? get_number(key) : dflt;
  }

  std::int64_t get_int(const std::string& key) const {
    double d = get_number(key);
    auto i = static_cast<std::int64_t>(d);
    if (static_cast<double>(i) != d) throw ConfigError("key '" + key + "' must be an integer");
    return i;
  }
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  bool get_bool(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::boolean) throw ConfigError("key '" + key + "' must be a boolean");
    return v.boolean;
  }
  bool get_bool(const std::string& key, bool dflt) const {
    return has(key) ? get_bool(key) : dflt;
  }

  std::vector<double> get_array(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::array) throw ConfigError("key '" + key + "' must be an array");
    return v.arr;
  }
  std::vector<double> get_array(const std::string& key, std::vector<double> dflt) const {
    return has(key) ? get_array(key) : dflt;
  }

  const std::map<std::string, Value>& values() const { return values_; }

  // Schema check: every present key must be in `allowed`.
  void reject_unknown_keys(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
      bool ok = false;
      for (const auto& a : allowed)
        if (a == key) {
          ok = true;
          break;
        }
      if (!ok)
        throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(value.line) + ")");
    }
  }

 private:
  const Value& require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }

  static std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_str = !in_str;
      if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
  }

  static Value parse_value(const std::string& raw, int lineno) {
    Value v;
    v.line = lineno;
    if (raw.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value");
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated string");
      v.kind = Value::Kind::string;
      v.str = raw.substr(1, raw.size() - 2);
      return v;
    }
    if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::boolean;
      v.boolean = raw == "true";
      return v;
    }
    if (raw.front() == '[') {
      if (raw.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated array");
      v.kind = Value::Kind::array;
      std::string body = raw.substr(1, raw.size() - 2);
      std::istringstream in(body);
      std::string item;
      while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        v.arr.push_back(parse_number(item, lineno));
      }
      return v;
    }
    v.kind = Value::Kind::number;
    v.num = parse_number(raw, lineno);
    return v;
  }

  static double parse_number(const std::string& s, int lineno) {
    size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": '" + s + "' is not a number");
    }
    if (pos != s.size())
      throw ConfigError("line " + std::to_string(lineno) + ": trailing characters in number '" + s + "'");
    return d;
  }

  std::map<std::string, Value> values_;
};

}  // namespace aperiodic
