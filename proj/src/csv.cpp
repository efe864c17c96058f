#include "isingevo/csv.hpp"

#include <sstream>
#include <stdexcept>

namespace isingevo {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), width_(columns.size()), out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  if (columns.empty()) throw std::invalid_argument("CSV needs at least one column");
  out_ << "#schema=v" << kCsvSchemaVersion << '\n';
  write_row(columns);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw std::invalid_argument(fmt::format("{}: row has {} cells, header has {}",
                                            path_.string(), cells.size(), width_));
  }
  for (const auto& cell : cells) {
    if (cell.find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument(fmt::format("CSV cell '{}' contains a separator", cell));
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error(fmt::format("write to {} failed", path_.string()));
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range(fmt::format("CSV has no column '{}'", name));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, int expected_version) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line) || line.rfind("#schema=v", 0) != 0) {
    throw std::runtime_error(fmt::format("{}: missing schema line", path.string()));
  }
  CsvTable table;
  try {
    table.schema_version = std::stoi(line.substr(9));
  } catch (const std::exception&) {
    throw std::runtime_error(fmt::format("{}: malformed schema line '{}'", path.string(), line));
  }
  if (table.schema_version != expected_version) {
    throw std::runtime_error(fmt::format("{}: schema v{} but v{} expected", path.string(),
                                         table.schema_version, expected_version));
  }
  if (!std::getline(in, line)) throw std::runtime_error(fmt::format("{}: no header", path.string()));
  table.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.columns.size()) {
      throw std::runtime_error(fmt::format("{}: ragged row '{}'", path.string(), line));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace isingevo
