#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrexp/masked_matrix.hpp"
#include "lrexp/table.hpp"

namespace lrexp {

inline constexpr Index kSegmentsPerDay = 288;
inline constexpr int kSegmentSeconds = 300;

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;
  auto operator<=>(const Date&) const = default;
  std::string iso() const;  // YYYY-MM-DD
};

struct HeartRateRecord {
  std::string person_id;
  Date date;
  int seconds = 0;  // since local midnight, [0, 86400)
  double bpm = 0.0;
};

struct PersonDay {
  std::string person_id;
  Date date;
  auto operator<=>(const PersonDay&) const = default;
};

struct PersonDayMatrix {
  MaskedMatrix matrix;  // 288 segments x person-days
  std::vector<PersonDay> labels;
};

enum class TimestampFormat {
  Iso,          // 2016-04-12T07:21:05
  UsTwelveHour  // 4/12/2016 7:21:05 AM
};

struct IngestOptions {
  std::string person_column = "person_id";
  std::string timestamp_column = "timestamp";
  std::string bpm_column = "bpm";
  TimestampFormat format = TimestampFormat::Iso;
};

// Column names and timestamp layout of the Fitbit heartrate_seconds export.
IngestOptions kaggle_ingest_options();

// Parses "date seconds-of-day"; throws ParseError.
std::pair<Date, int> parse_timestamp(std::string_view text, TimestampFormat format);

// Reads long-format records with a header row. ParseError messages carry the
// 1-based line number; EmptyInput when there are no data rows.
std::vector<HeartRateRecord> read_records(std::istream& in, const IngestOptions& options = {});

// Median bpm per (person, date, five-minute segment). Columns are the observed
// person-days ordered by (person_id, date).
PersonDayMatrix bin_records(std::span<const HeartRateRecord> records);

struct FilteredPersonDays {
  NormalizedMatrix data;
  std::vector<PersonDay> labels;
  std::vector<Index> kept;  // indices into the unfiltered columns
};

FilteredPersonDays filter_and_normalize(const PersonDayMatrix& pdm, double max_missing_fraction);

extern const std::vector<Column> kLabelColumns;
Table labels_table(const std::vector<PersonDay>& labels);
std::vector<PersonDay> labels_from_table(const Table& table);

}  // namespace lrexp
