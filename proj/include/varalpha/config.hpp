#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace varalpha {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict key/value configuration with [section] headers:
//
//   experiment = regime        # top-level key
//   [field]
//   kind = two_level
//   alpha_in = 0.3
//   breakpoints = 0, 1.5, 4    # comma lists for vector values
//
// Keys are addressed as "section.key" ("key" for the top section). Every key
// read is marked consumed; require_consumed() rejects anything left over,
// naming the key and its line, so typos never pass silently. Duplicate keys
// are rejected at parse time.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(std::string text, std::string name = "<inline>");

  bool has(const std::string& key) const;

  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::vector<double> get_doubles(const std::string& key);

  // Inject or replace a value (CLI overrides); the entry starts unconsumed.
  void set(const std::string& key, const std::string& value);

  void require_consumed() const;

  std::uint64_t content_hash() const { return hash_; }
  const std::string& source_name() const { return name_; }

 private:
  struct Entry {
    std::string key;  // fully qualified
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  const Entry* find(const std::string& key) const;
  Entry& lookup(const std::string& key);  // throws ConfigError when missing

  std::vector<Entry> entries_;
  std::string name_;
  std::uint64_t hash_ = 0;
};

}  // namespace varalpha
