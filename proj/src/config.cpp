#include "sqh/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sqh/csvio.hpp"
#include "sqh/errors.hpp"

namespace sqh {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + raw + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("config: key '" + key + "' is not an integer: '" + raw + "'");
  }
  return v;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": malformed line (expected key = value): '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (val.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for key '" +
                        key + "'");
    }
    if (cfg.kv_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    }
    cfg.kv_[key] = val;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw ConfigError("config: missing required key '" + key + "' (" + origin_ + ")");
  }
  consumed_[key] = true;
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
  return has(key) ? raw(key) : dflt;
}

double Config::get_double(const std::string& key) const {
  return parse_double(key, raw(key));
}

double Config::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

long long Config::get_int(const std::string& key) const {
  return parse_int(key, raw(key));
}

long long Config::get_int(const std::string& key, long long dflt) const {
  return has(key) ? get_int(key) : dflt;
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string v = raw(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config: key '" + key + "' has an empty list element");
    }
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<long long> Config::get_int_list(const std::string& key) const {
  const std::string v = raw(key);
  std::vector<long long> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config: key '" + key + "' has an empty list element");
    }
    out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
  return out;
}

void Config::check_all_consumed() const {
  std::string unknown;
  for (const auto& [key, val] : kv_) {
    if (!consumed_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += "'" + key + "'";
    }
  }
  if (!unknown.empty()) {
    throw ConfigError("config: unknown key(s) " + unknown + " (" + origin_ + ")");
  }
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [key, val] : kv_) {  // std::map iterates in sorted key order
    out += key;
    out += " = ";
    out += val;
    out += "\n";
  }
  return out;
}

unsigned long long Config::hash() const { return fnv1a64(canonical_text()); }

}  // namespace sqh
