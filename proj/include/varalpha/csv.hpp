#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace varalpha {

inline const char* tool_version() {
#ifdef VARALPHA_VERSION
  return VARALPHA_VERSION;
#else
  return "0.0.0";
#endif
}

// FNV-1a over raw bytes: the stable config fingerprint embedded in outputs.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// CSV sink with '#'-prefixed metadata lines and fixed %.17g number
// formatting, so identical inputs produce byte-identical files (no
// timestamps on purpose).
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void metadata(std::string_view key, std::string_view value);
  void metadata(std::string_view key, std::uint64_t value_hex);  // as 016x
  void header(const std::vector<std::string>& columns);

  void begin_row();
  void field(double v);
  void field(std::int64_t v);
  void field(std::uint64_t v);
  void field(std::string_view v);
  void end_row();

  void raw_line(std::string_view line);

 private:
  std::ofstream os_;
  bool row_open_ = false;
  bool first_in_row_ = true;
  void sep();
};

std::string format_double(double v);  // %.17g, shared formatting rule

}  // namespace varalpha
