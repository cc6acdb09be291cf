#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pbsrdd::cli {

/// A numeric table. Files start with a '# ...' provenance comment, then the
/// header row; numbers use the shortest decimal form that reads back exactly.
/// Integers (seeds, counts) are kept exact; everything else is a double.
using CsvCell = std::variant<double, std::uint64_t>;

double as_double(const CsvCell& cell);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  std::size_t column(std::string_view name) const;  // throws ModelError when absent
  std::vector<double> values(std::string_view name) const;
};

std::string format_number(double v);
std::string format_cell(const CsvCell& cell);

/// "# pbsrdd <version> config_hash=<hex>"
std::string provenance_line(std::string_view hash);

std::string to_csv(const CsvTable& table, std::string_view provenance);
void write_csv(const std::string& path, const CsvTable& table, std::string_view provenance);

/// Comment lines are skipped; every data cell must be a number.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

}  // namespace pbsrdd::cli
