#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lrexp {

enum class ColumnType { Integer, Real, Text };

struct Column {
  std::string name;
  ColumnType type;
  bool operator==(const Column&) const = default;
};

using Cell = std::variant<std::int64_t, double, std::string>;

// A typed, row-ordered table. Every cell's alternative matches its column type.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  void add_row(std::vector<Cell> row);

  std::size_t column_index(std::string_view name) const;
  double real(std::size_t row, std::string_view column) const;
  std::int64_t integer(std::size_t row, std::string_view column) const;
  const std::string& text(std::size_t row, std::string_view column) const;

  bool operator==(const Table&) const = default;

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Shortest text that is exact at 17 significant digits; "nan", "inf", "-inf"
// for non-finite values.
std::string format_real(double value);
double parse_real(std::string_view text);

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);
std::string quote_csv_field(std::string_view field);

void write_table_csv(std::ostream& out, const Table& table);
// Reads a table written by write_table_csv. The header must match `schema`.
Table read_table_csv(std::istream& in, const std::vector<Column>& schema);

}  // namespace lrexp
