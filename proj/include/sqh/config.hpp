#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sqh {

// Flat key = value configuration with '#' comments. Parsing is strict:
// duplicate keys, malformed lines, and (at validation time) unknown or
// missing keys raise ConfigError naming the offender.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  const std::string& raw(const std::string& key) const;  // throws if missing

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;

  // Every key must be consumed by one of the getters above or listed here;
  // called by the runner after reading a task's inputs.
  void check_all_consumed() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  const std::string& origin() const { return origin_; }

  // Canonical serialization (sorted keys) and its FNV-1a 64-bit hash.
  std::string canonical_text() const;
  unsigned long long hash() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::map<std::string, bool> consumed_;
  std::string origin_;
};

}  // namespace sqh
