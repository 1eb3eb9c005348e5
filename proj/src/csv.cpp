#include "varalpha/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace varalpha {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : os_(path, std::ios::binary) {
  if (!os_) throw std::runtime_error("csv: cannot open " + path);
}

void CsvWriter::metadata(std::string_view key, std::string_view value) {
  os_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::metadata(std::string_view key, std::uint64_t value_hex) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value_hex));
  os_ << "# " << key << "=" << buf << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os_ << ",";
    os_ << columns[i];
  }
  os_ << "\n";
}

void CsvWriter::begin_row() {
  row_open_ = true;
  first_in_row_ = true;
}

void CsvWriter::sep() {
  if (!first_in_row_) os_ << ",";
  first_in_row_ = false;
}

void CsvWriter::field(double v) {
  sep();
  os_ << format_double(v);
}

void CsvWriter::field(std::int64_t v) {
  sep();
  os_ << v;
}

void CsvWriter::field(std::uint64_t v) {
  sep();
  os_ << v;
}

void CsvWriter::field(std::string_view v) {
  sep();
  os_ << v;
}

void CsvWriter::end_row() {
  os_ << "\n";
  row_open_ = false;
}

void CsvWriter::raw_line(std::string_view line) { os_ << line << "\n"; }

}  // namespace varalpha
