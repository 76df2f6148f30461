#include "lrexp/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>

namespace lrexp {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : days[m - 1];
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  fail(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
}

// Reads an unsigned decimal of 1..max_digits digits terminated by `stop`
// (or the end when stop == '\0').
int read_number(std::string_view text, std::size_t& pos, std::size_t max_digits, char stop) {
  const std::size_t start = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  if (pos == start || pos - start > max_digits) bad_timestamp(text);
  int value = 0;
  std::from_chars(text.data() + start, text.data() + pos, value);
  if (stop == '\0') {
    if (pos != text.size()) bad_timestamp(text);
  } else {
    if (pos >= text.size() || text[pos] != stop) bad_timestamp(text);
    ++pos;
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

IngestOptions kaggle_ingest_options() {
  IngestOptions o;
  o.person_column = "Id";
  o.timestamp_column = "Time";
  o.bpm_column = "Value";
  o.format = TimestampFormat::UsTwelveHour;
  return o;
}

std::pair<Date, int> parse_timestamp(std::string_view text, TimestampFormat format) {
  text = trim(text);
  Date d;
  int hh = 0, mm = 0, ss = 0;
  std::size_t pos = 0;
  if (format == TimestampFormat::Iso) {
    if (text.size() != 19) bad_timestamp(text);
    d.year = read_number(text, pos, 4, '-');
    d.month = read_number(text, pos, 2, '-');
    d.day = read_number(text, pos, 2, 'T');
    hh = read_number(text, pos, 2, ':');
    mm = read_number(text, pos, 2, ':');
    ss = read_number(text, pos, 2, '\0');
    if (hh > 23) bad_timestamp(text);
  } else {
    d.month = read_number(text, pos, 2, '/');
    d.day = read_number(text, pos, 2, '/');
    d.year = read_number(text, pos, 4, ' ');
    hh = read_number(text, pos, 2, ':');
    mm = read_number(text, pos, 2, ':');
    ss = read_number(text, pos, 2, ' ');
    const std::string_view meridiem = text.substr(pos);
    if (hh < 1 || hh > 12) bad_timestamp(text);
    if (meridiem == "AM")
      hh = hh == 12 ? 0 : hh;
    else if (meridiem == "PM")
      hh = hh == 12 ? 12 : hh + 12;
    else
      bad_timestamp(text);
  }
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month) || mm > 59 || ss > 59)
    bad_timestamp(text);
  return {d, hh * 3600 + mm * 60 + ss};
}

std::vector<HeartRateRecord> read_records(std::istream& in, const IngestOptions& options) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::EmptyInput, "no header row");
  const auto header = split_csv_line(trim(line));
  auto find = [&](const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (trim(header[j]) == name) return j;
    fail(ErrorCode::ParseError, "line 1: missing column '" + name + "'");
  };
  const std::size_t person = find(options.person_column);
  const std::size_t stamp = find(options.timestamp_column);
  const std::size_t bpm = find(options.bpm_column);

  std::vector<HeartRateRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    try {
      const auto fields = split_csv_line(content);
      if (fields.size() != header.size())
        fail(ErrorCode::ParseError, "expected " + std::to_string(header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
      HeartRateRecord r;
      r.person_id = std::string(trim(fields[person]));
      if (r.person_id.empty()) fail(ErrorCode::ParseError, "empty person id");
      std::tie(r.date, r.seconds) = parse_timestamp(fields[stamp], options.format);
      r.bpm = parse_real(fields[bpm]);
      if (!std::isfinite(r.bpm) || r.bpm <= 0.0) fail(ErrorCode::ParseError, "bpm must be finite and positive");
      records.push_back(std::move(r));
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (records.empty()) fail(ErrorCode::EmptyInput, "no heart-rate records");
  return records;
}

PersonDayMatrix bin_records(std::span<const HeartRateRecord> records) {
  if (records.empty()) fail(ErrorCode::EmptyInput, "no heart-rate records");
  std::map<PersonDay, std::map<Index, std::vector<double>>> cells;
  for (const auto& r : records) {
    if (r.seconds < 0 || r.seconds >= 86400) fail(ErrorCode::InvalidArgument, "seconds of day out of range");
    cells[PersonDay{r.person_id, r.date}][r.seconds / kSegmentSeconds].push_back(r.bpm);
  }

  PersonDayMatrix out;
  const Index p = static_cast<Index>(cells.size());
  Matrix values = Matrix::Zero(kSegmentsPerDay, p);
  Mask mask = Mask::Constant(kSegmentsPerDay, p, false);
  Index j = 0;
  for (auto& [label, segments] : cells) {
    for (auto& [segment, bpms] : segments) {
      std::sort(bpms.begin(), bpms.end());
      const std::size_t m = bpms.size();
      values(segment, j) = m % 2 == 1 ? bpms[m / 2] : (bpms[m / 2 - 1] + bpms[m / 2]) / 2.0;
      mask(segment, j) = true;
    }
    out.labels.push_back(label);
    ++j;
  }
  out.matrix = MaskedMatrix(std::move(values), std::move(mask));
  return out;
}

FilteredPersonDays filter_and_normalize(const PersonDayMatrix& pdm, double max_missing_fraction) {
  if (static_cast<std::size_t>(pdm.matrix.cols()) != pdm.labels.size())
    fail(ErrorCode::DimensionMismatch, "one label per column is required");
  ColumnSelection sel = drop_sparse_columns(pdm.matrix, max_missing_fraction);
  FilteredPersonDays out;
  out.data = normalize(sel.matrix);
  for (Index j : sel.kept) out.labels.push_back(pdm.labels[static_cast<std::size_t>(j)]);
  out.kept = std::move(sel.kept);
  return out;
}

const std::vector<Column> kLabelColumns{
    {"column", ColumnType::Integer}, {"person_id", ColumnType::Text}, {"date", ColumnType::Text}};

Table labels_table(const std::vector<PersonDay>& labels) {
  Table table(kLabelColumns);
  for (std::size_t j = 0; j < labels.size(); ++j)
    table.add_row({static_cast<std::int64_t>(j), labels[j].person_id, labels[j].date.iso()});
  return table;
}

std::vector<PersonDay> labels_from_table(const Table& table) {
  std::vector<PersonDay> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string& date = table.text(i, "date");
    const auto [d, secs] = parse_timestamp(date + "T00:00:00", TimestampFormat::Iso);
    out.push_back(PersonDay{table.text(i, "person_id"), d});
  }
  return out;
}

}  // namespace lrexp
