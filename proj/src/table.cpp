#include "lrexp/table.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "lrexp/error.hpp"

namespace lrexp {

namespace {

bool matches(const Cell& cell, ColumnType type) {
  switch (type) {
    case ColumnType::Integer: return std::holds_alternative<std::int64_t>(cell);
    case ColumnType::Real: return std::holds_alternative<double>(cell);
    case ColumnType::Text: return std::holds_alternative<std::string>(cell);
  }
  return false;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out)
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  for (std::size_t a = 0; a < columns_.size(); ++a)
    for (std::size_t b = a + 1; b < columns_.size(); ++b)
      if (columns_[a].name == columns_[b].name) fail(ErrorCode::InvalidArgument, "duplicate column " + columns_[a].name);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    fail(ErrorCode::LengthMismatch, "row has " + std::to_string(row.size()) + " cells, table has " +
                                        std::to_string(columns_.size()) + " columns");
  for (std::size_t j = 0; j < row.size(); ++j)
    if (!matches(row[j], columns_[j].type))
      fail(ErrorCode::InvalidArgument, "cell type does not match column " + columns_[j].name);
  rows_.push_back(std::move(row));
}

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].name == name) return j;
  fail(ErrorCode::InvalidArgument, "no column named " + std::string(name));
}

double Table::real(std::size_t row, std::string_view column) const {
  return std::get<double>(rows_.at(row)[column_index(column)]);
}

std::int64_t Table::integer(std::size_t row, std::string_view column) const {
  return std::get<std::int64_t>(rows_.at(row)[column_index(column)]);
}

const std::string& Table::text(std::size_t row, std::string_view column) const {
  return std::get<std::string>(rows_.at(row)[column_index(column)]);
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  const std::string low = lower(text);
  if (low == "nan") return std::nan("");
  if (low == "inf" || low == "+inf") return INFINITY;
  if (low == "-inf") return -INFINITY;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  if (quoted) fail(ErrorCode::ParseError, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_table_csv(std::ostream& out, const Table& table) {
  const auto& cols = table.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << quote_csv_field(cols[j].name);
  out << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              out << format_real(v);
            else if constexpr (std::is_same_v<T, std::string>)
              out << quote_csv_field(v);
            else
              out << v;
          },
          row[j]);
    }
    out << '\n';
  }
}

Table read_table_csv(std::istream& in, const std::vector<Column>& schema) {
  Table table(schema);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::EmptyInput, "table has no header");
  strip_cr(line);
  const auto header = split_csv_line(line);
  if (header.size() != schema.size()) fail(ErrorCode::ParseError, "table header has the wrong number of columns");
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (header[j] != schema[j].name)
      fail(ErrorCode::ParseError, "expected column '" + schema[j].name + "', found '" + header[j] + "'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != schema.size())
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(schema.size()) +
                                      " fields, found " + std::to_string(fields.size()));
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      try {
        switch (schema[j].type) {
          case ColumnType::Integer: {
            std::int64_t v = 0;
            const auto& f = fields[j];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
              fail(ErrorCode::ParseError, "not an integer: '" + f + "'");
            row.emplace_back(v);
            break;
          }
          case ColumnType::Real: row.emplace_back(parse_real(fields[j])); break;
          case ColumnType::Text: row.emplace_back(fields[j]); break;
        }
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace lrexp
