#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace srlab {

// One value of a flat `key = value` config: a number, a string or an array of those.
struct ConfigValue {
  enum class Kind { Number, String, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;  // string contents, or the raw number token
  std::vector<ConfigValue> items;
  int line = 0;
};

// `key = value` lines; '#' comments; strings quoted with "" (bare words are
// strings too); arrays in [a, b, ...] on one line.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_numbers(const std::string& key, const std::vector<double>& fallback = {}) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback = {}) const;

  // keys never read by a getter
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, ConfigValue>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  const ConfigValue& at(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  std::map<std::string, ConfigValue> values_;
  mutable std::set<std::string> used_;
  std::string source_;
};

}  // namespace srlab
