#include "varalpha/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "varalpha/csv.hpp"

namespace varalpha {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
      return false;
  return true;
}

double parse_double(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      "): '" + v + "' is not a number");
  return d;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_string(ss.str(), path);
}

Config Config::from_string(std::string text, std::string name) {
  Config cfg;
  cfg.name_ = std::move(name);
  cfg.hash_ = fnv1a64(text);

  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments ('#' or ';'), then whitespace
    const std::size_t cpos = line.find_first_of("#;");
    if (cpos != std::string::npos) line.erase(cpos);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section))
        throw ConfigError("config: line " + std::to_string(lineno) +
                          ": bad section name '" + section + "'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(key))
      throw ConfigError("config: line " + std::to_string(lineno) +
                        ": bad key name '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    for (const auto& e : cfg.entries_)
      if (e.key == full)
        throw ConfigError("config: line " + std::to_string(lineno) +
                          ": duplicate key '" + full + "' (first at line " +
                          std::to_string(e.line) + ")");
    cfg.entries_.push_back({full, value, lineno, false});
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

Config::Entry& Config::lookup(const std::string& key) {
  for (auto& e : entries_)
    if (e.key == key) {
      e.consumed = true;
      return e;
    }
  throw ConfigError("config: missing required key '" + key + "' in " + name_);
}

bool Config::has(const std::string& key) const {
  const Entry* e = find(key);
  if (e) e->consumed = true;  // probing counts as intent
  return e != nullptr;
}

double Config::get_double(const std::string& key) {
  Entry& e = lookup(key);
  return parse_double(e.value, key, e.line);
}

double Config::get_double(const std::string& key, double fallback) {
  if (!find(key)) return fallback;
  return get_double(key);
}

std::int64_t Config::get_int(const std::string& key) {
  Entry& e = lookup(key);
  const double d = parse_double(e.value, key, e.line);
  const std::int64_t v = static_cast<std::int64_t>(d);
  if (static_cast<double>(v) != d)
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(e.line) +
                      "): expected an integer, got '" + e.value + "'");
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
  if (!find(key)) return fallback;
  return get_int(key);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  if (!find(key)) return fallback;
  Entry& e = lookup(key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(e.line) +
                      "): expected an unsigned integer, got '" + e.value + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  if (!find(key)) return fallback;
  Entry& e = lookup(key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' (line " + std::to_string(e.line) +
                    "): expected a boolean, got '" + e.value + "'");
}

std::string Config::get_string(const std::string& key) { return lookup(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  if (!find(key)) return fallback;
  return get_string(key);
}

std::vector<double> Config::get_doubles(const std::string& key) {
  Entry& e = lookup(key);
  std::vector<double> out;
  std::string item;
  std::istringstream is(e.value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config: key '" + key + "' (line " + std::to_string(e.line) +
                        "): empty list element");
    out.push_back(parse_double(item, key, e.line));
  }
  if (out.empty())
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(e.line) +
                      "): empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.key == key) {
      e.value = value;
      e.consumed = false;
      return;
    }
  entries_.push_back({key, value, 0, false});
}

void Config::require_consumed() const {
  for (const auto& e : entries_)
    if (!e.consumed)
      throw ConfigError("config: unknown key '" + e.key + "' (line " +
                        std::to_string(e.line) + ") in " + name_);
}

}  // namespace varalpha
