#include "srlab/config.hpp"

#include "srlab/types.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srlab {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line;
  std::string source;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
  }
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size() || s[i] == '#';
  }
};

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

ConfigValue parse_scalar(Cursor& c) {
  ConfigValue v;
  v.line = c.line;
  c.skip_ws();
  if (c.i >= c.s.size()) c.fail("missing value");
  if (c.s[c.i] == '"') {
    ++c.i;
    std::string out;
    while (c.i < c.s.size() && c.s[c.i] != '"') {
      if (c.s[c.i] == '\\' && c.i + 1 < c.s.size()) ++c.i;
      out += c.s[c.i++];
    }
    if (c.i >= c.s.size()) c.fail("unterminated string");
    ++c.i;
    v.kind = ConfigValue::Kind::String;
    v.text = out;
    return v;
  }
  std::size_t start = c.i;
  while (c.i < c.s.size() && c.s[c.i] != ',' && c.s[c.i] != ']' && c.s[c.i] != '#') ++c.i;
  std::string tok = c.s.substr(start, c.i - start);
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
  if (tok.empty()) c.fail("missing value");
  v.text = tok;
  if (parse_number(tok, v.number)) {
    v.kind = ConfigValue::Kind::Number;
  } else {
    if (tok.find_first_of("[\"=") != std::string::npos) c.fail("malformed value '" + tok + "'");
    v.kind = ConfigValue::Kind::String;
  }
  return v;
}

ConfigValue parse_value(Cursor& c) {
  c.skip_ws();
  if (c.i < c.s.size() && c.s[c.i] == '[') {
    ConfigValue arr;
    arr.kind = ConfigValue::Kind::Array;
    arr.line = c.line;
    ++c.i;
    c.skip_ws();
    if (c.i < c.s.size() && c.s[c.i] == ']') {
      ++c.i;
      return arr;
    }
    while (true) {
      arr.items.push_back(parse_scalar(c));
      c.skip_ws();
      if (c.i >= c.s.size()) c.fail("unterminated array");
      if (c.s[c.i] == ']') {
        ++c.i;
        break;
      }
      if (c.s[c.i] != ',') c.fail("expected ',' or ']' in array");
      ++c.i;
    }
    return arr;
  }
  return parse_scalar(c);
}

const char* kind_name(ConfigValue::Kind k) {
  switch (k) {
    case ConfigValue::Kind::Number: return "number";
    case ConfigValue::Kind::String: return "string";
    case ConfigValue::Kind::Array: return "array";
  }
  return "?";
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    Cursor c{line, 0, lineno, source};
    if (c.done()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) c.fail("expected `key = value`");
    std::string key = line.substr(0, eq);
    auto trim = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      std::size_t b = 0;
      while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
      s.erase(0, b);
    };
    trim(key);
    if (key.empty()) c.fail("empty key");
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
        c.fail("invalid key '" + key + "'");
    if (cfg.values_.count(key)) c.fail("duplicate key '" + key + "'");
    c.i = eq + 1;
    ConfigValue v = parse_value(c);
    if (!c.done()) c.fail("trailing characters after value of '" + key + "'");
    cfg.values_.emplace(key, std::move(v));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

void Config::fail(const std::string& key, const std::string& what) const {
  auto it = values_.find(key);
  const std::string where = it != values_.end() ? source_ + ":" + std::to_string(it->second.line) : source_;
  throw ConfigError(where + ": key '" + key + "': " + what);
}

const ConfigValue& Config::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(key, "missing");
  used_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind == ConfigValue::Kind::Array) fail(key, "expected a string, got an array");
  return v.text;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_number(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::Number) fail(key, std::string("expected a number, got a ") + kind_name(v.kind));
  return v.number;
}

double Config::get_number(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const double x = get_number(key);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) fail(key, "expected an integer");
  return static_cast<std::int64_t>(x);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = at(key);
  if (v.kind != ConfigValue::Kind::Number) fail(key, "expected a non-negative integer");
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc() || p != v.text.data() + v.text.size()) fail(key, "expected a non-negative integer");
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(key, "expected true or false");
}

std::vector<double> Config::get_numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = at(key);
  if (v.kind == ConfigValue::Kind::Number) return {v.number};
  if (v.kind != ConfigValue::Kind::Array) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& it : v.items) {
    if (it.kind != ConfigValue::Kind::Number) fail(key, "expected an array of numbers");
    out.push_back(it.number);
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = at(key);
  if (v.kind == ConfigValue::Kind::String) return {v.text};
  if (v.kind != ConfigValue::Kind::Array) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& it : v.items) {
    if (it.kind != ConfigValue::Kind::String) fail(key, "expected an array of strings");
    out.push_back(it.text);
  }
  return out;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace srlab
