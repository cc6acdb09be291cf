#include "pbsrdd/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/core/error.hpp"

namespace pbsrdd::cli {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return k;
  throw ModelError("csv: no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::values(std::string_view name) const {
  const std::size_t k = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(as_double(r[k]));
  return out;
}

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double as_double(const CsvCell& cell) {
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return static_cast<double>(*u);
  return std::get<double>(cell);
}

std::string format_cell(const CsvCell& cell) {
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  return format_number(std::get<double>(cell));
}

std::string provenance_line(std::string_view hash) {
  return "# pbsrdd " + std::string(kVersion) + " config_hash=" + std::string(hash);
}

std::string to_csv(const CsvTable& table, std::string_view provenance) {
  std::string out(provenance);
  out += '\n';
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    if (k) out += ',';
    out += table.columns[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_cell(row[k]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table, std::string_view provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write '" + path + "'");
  out << to_csv(table, provenance);
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cells;
    for (std::size_t a = 0;;) {
      std::size_t b = line.find(',', a);
      cells.push_back(line.substr(a, b == std::string_view::npos ? std::string_view::npos : b - a));
      if (b == std::string_view::npos) break;
      a = b + 1;
    }
    if (header) {
      for (auto c : cells) table.columns.emplace_back(c);
      header = false;
      continue;
    }
    if (cells.size() != table.columns.size()) throw ModelError("csv: row width differs from the header");
    std::vector<CsvCell> row;
    for (auto c : cells) {
      const char* end = c.data() + c.size();
      std::uint64_t u = 0;
      auto ri = std::from_chars(c.data(), end, u);
      if (ri.ec == std::errc() && ri.ptr == end) {
        row.emplace_back(u);
        continue;
      }
      double v = 0.0;
      auto rd = std::from_chars(c.data(), end, v);
      if (rd.ec != std::errc() || rd.ptr != end) throw ModelError("csv: '" + std::string(c) + "' is not a number");
      row.emplace_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (header) throw ModelError("csv: no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace pbsrdd::cli
