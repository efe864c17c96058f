#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace isingevo {

inline constexpr int kCsvSchemaVersion = 1;

/// Text form of one CSV cell. Doubles use the shortest representation that
/// round-trips.
inline std::string csv_cell(const std::string& s) { return s; }
inline std::string csv_cell(std::string_view s) { return std::string(s); }
inline std::string csv_cell(const char* s) { return s; }
template <class T>
std::string csv_cell(const T& v) {
  return fmt::format("{}", v);
}

/// Comma-separated output with a leading `#schema=v1` line and a header row.
/// Cells must not contain commas or newlines.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  template <class... Ts>
  void row(const Ts&... cells) {
    write_row({csv_cell(cells)...});
  }
  void write_row(const std::vector<std::string>& cells);
  void flush() { out_.flush(); }

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::ofstream out_;
};

struct CsvTable {
  int schema_version = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws if absent.
  std::size_t column(std::string_view name) const;
};

/// Parses a file written by CsvWriter. Throws std::runtime_error on a missing
/// or mismatching schema line or ragged rows.
CsvTable read_csv(const std::filesystem::path& path, int expected_version = kCsvSchemaVersion);

}  // namespace isingevo
