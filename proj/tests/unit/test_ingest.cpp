#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "lrexp/ingest.hpp"
#include "lrexp/io.hpp"
#include "oracles.hpp"

using namespace lrexp;

namespace {

HeartRateRecord rec(const std::string& person, const std::string& stamp, double bpm) {
  HeartRateRecord r;
  r.person_id = person;
  std::tie(r.date, r.seconds) = parse_timestamp(stamp, TimestampFormat::Iso);
  r.bpm = bpm;
  return r;
}

std::string fixture(const std::string& name) { return std::string(LREXP_FIXTURE_DIR) + "/" + name; }

std::vector<HeartRateRecord> fixture_records() {
  std::ifstream in(fixture("heart_rate_records.csv"));
  return read_records(in);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Timestamp, Iso) {
  const auto [d, s] = parse_timestamp("2016-04-12T07:21:05", TimestampFormat::Iso);
  EXPECT_EQ(d, (Date{2016, 4, 12}));
  EXPECT_EQ(s, 7 * 3600 + 21 * 60 + 5);
  EXPECT_EQ(d.iso(), "2016-04-12");
  EXPECT_THROW(parse_timestamp("2016-02-30T00:00:00", TimestampFormat::Iso), Error);
  EXPECT_THROW(parse_timestamp("2016-04-12 07:21:05", TimestampFormat::Iso), Error);
  EXPECT_THROW(parse_timestamp("2016-04-12T24:00:00", TimestampFormat::Iso), Error);
  EXPECT_NO_THROW(parse_timestamp("2016-02-29T23:59:59", TimestampFormat::Iso));
}

TEST(Timestamp, UsTwelveHour) {
  EXPECT_EQ(parse_timestamp("4/12/2016 12:01:05 AM", TimestampFormat::UsTwelveHour).second, 65);
  EXPECT_EQ(parse_timestamp("4/12/2016 12:00:00 PM", TimestampFormat::UsTwelveHour).second, 43200);
  EXPECT_EQ(parse_timestamp("4/12/2016 11:59:59 PM", TimestampFormat::UsTwelveHour).second, 86399);
  EXPECT_EQ(parse_timestamp("4/12/2016 1:15:00 PM", TimestampFormat::UsTwelveHour).second, 13 * 3600 + 900);
  EXPECT_THROW(parse_timestamp("4/12/2016 13:00:00 PM", TimestampFormat::UsTwelveHour), Error);
}

TEST(Bin, SingleRecord) {
  const std::vector<HeartRateRecord> r{rec("a", "2016-04-12T00:02:30", 72)};
  const PersonDayMatrix m = bin_records(r);
  ASSERT_EQ(m.matrix.rows(), 288);
  ASSERT_EQ(m.matrix.cols(), 1);
  EXPECT_EQ(m.matrix.value(0, 0), 72.0);
  EXPECT_EQ(m.matrix.observed_count(), 1);
}

TEST(Bin, Medians) {
  const std::vector<HeartRateRecord> odd{rec("a", "2016-04-12T10:00:00", 90), rec("a", "2016-04-12T10:01:00", 70),
                                         rec("a", "2016-04-12T10:04:59", 80)};
  EXPECT_EQ(bin_records(odd).matrix.value(120, 0), 80.0);
  const std::vector<HeartRateRecord> even{rec("a", "2016-04-12T10:00:00", 80), rec("a", "2016-04-12T10:02:00", 70)};
  EXPECT_EQ(bin_records(even).matrix.value(120, 0), 75.0);
}

TEST(Bin, MedianOracleAllSizes) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> bpm(50, 120);
  for (int size = 1; size <= 7; ++size) {
    std::vector<HeartRateRecord> records;
    std::vector<double> values;
    for (int i = 0; i < size; ++i) {
      HeartRateRecord r = rec("a", "2016-04-12T13:20:00", bpm(gen));
      r.seconds += i * 40;
      values.push_back(r.bpm);
      records.push_back(r);
    }
    EXPECT_EQ(bin_records(records).matrix.value(160, 0), oracle::sorted_median(values)) << size;
  }
}

TEST(Bin, ColumnsOrderedAndCalendarDays) {
  const std::vector<HeartRateRecord> r{rec("b", "2016-04-13T00:00:00", 60), rec("a", "2016-04-13T23:59:59", 61),
                                       rec("a", "2016-04-12T12:00:00", 62)};
  const PersonDayMatrix m = bin_records(r);
  ASSERT_EQ(m.labels.size(), 3u);
  EXPECT_EQ(m.labels[0], (PersonDay{"a", Date{2016, 4, 12}}));
  EXPECT_EQ(m.labels[1], (PersonDay{"a", Date{2016, 4, 13}}));
  EXPECT_EQ(m.labels[2], (PersonDay{"b", Date{2016, 4, 13}}));
  EXPECT_EQ(m.matrix.value(287, 1), 61.0);
  EXPECT_EQ(m.matrix.value(0, 2), 60.0);
  EXPECT_THROW(bin_records(std::vector<HeartRateRecord>{}), Error);
}

TEST(Bin, PermutationInvariantAndCountsBounded) {
  auto records = fixture_records();
  const PersonDayMatrix a = bin_records(records);
  std::mt19937_64 gen(1);
  std::shuffle(records.begin(), records.end(), gen);
  const PersonDayMatrix b = bin_records(records);
  EXPECT_EQ(a.matrix.mask(), b.matrix.mask());
  for (Index i = 0; i < a.matrix.rows(); ++i)
    for (Index j = 0; j < a.matrix.cols(); ++j)
      if (a.matrix.observed(i, j)) EXPECT_EQ(a.matrix.value(i, j), b.matrix.value(i, j));
  EXPECT_LE(static_cast<std::size_t>(a.matrix.observed_count()), records.size());
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Ingest, FixtureMatchesExpectedMatrix) {
  const PersonDayMatrix m = bin_records(fixture_records());
  const MaskedMatrix expected = read_matrix_csv(std::filesystem::path(fixture("heart_rate_expected.csv")));
  ASSERT_EQ(m.matrix.rows(), 288);
  ASSERT_EQ(m.matrix.cols(), 12);
  EXPECT_EQ(m.matrix.mask(), expected.mask());
  for (Index i = 0; i < 288; ++i)
    for (Index j = 0; j < 12; ++j)
      if (expected.observed(i, j)) EXPECT_EQ(m.matrix.value(i, j), expected.value(i, j)) << i << "," << j;
  const auto labels = labels_from_table(read_table(fixture("heart_rate_labels.csv"), kLabelColumns));
  EXPECT_EQ(m.labels, labels);
}

TEST(Ingest, FilterAtSeventyPercent) {
  const PersonDayMatrix m = bin_records(fixture_records());
  const FilteredPersonDays f = filter_and_normalize(m, 0.7);
  // Dropped: p01/2016-04-14 (col 2), p02/2016-04-15 (col 7), p03/2016-04-13 (col 9).
  EXPECT_EQ(f.kept, (std::vector<Index>{0, 1, 3, 4, 5, 6, 8, 10, 11}));
  ASSERT_EQ(f.labels.size(), 9u);
  EXPECT_EQ(f.labels[3], (PersonDay{"p02", Date{2016, 4, 12}}));
  const GlobalStats s = global_stats(f.data.matrix);
  EXPECT_NEAR(s.mean, 0.0, 1e-12);
  EXPECT_NEAR(s.std, 1.0, 1e-12);
}

TEST(Ingest, FullyObservedKeepsAll) {
  PersonDayMatrix m;
  m.matrix = MaskedMatrix::fully_observed(Matrix::Random(288, 3));
  m.labels = {{"a", {2016, 1, 1}}, {"a", {2016, 1, 2}}, {"b", {2016, 1, 1}}};
  EXPECT_EQ(filter_and_normalize(m, 0.7).kept.size(), 3u);
}

TEST(Ingest, ReadErrorsCarryLineNumbers) {
  std::istringstream bad("person_id,timestamp,bpm\na,2016-04-12T00:00:00,70\na,2016-04-12T00:00:00,-5\n");
  try {
    read_records(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream stamp("person_id,timestamp,bpm\na,yesterday,70\n");
  EXPECT_EQ(code_of([&] { read_records(stamp); }), ErrorCode::ParseError);
  std::istringstream header_only("person_id,timestamp,bpm\n");
  EXPECT_EQ(code_of([&] { read_records(header_only); }), ErrorCode::EmptyInput);
  std::istringstream nothing("");
  EXPECT_EQ(code_of([&] { read_records(nothing); }), ErrorCode::EmptyInput);
  std::istringstream missing("who,timestamp,bpm\na,2016-04-12T00:00:00,70\n");
  EXPECT_EQ(code_of([&] { read_records(missing); }), ErrorCode::ParseError);
}

TEST(Ingest, KaggleLayout) {
  std::ifstream in(fixture("heart_rate_kaggle.csv"));
  const auto records = read_records(in, kaggle_ingest_options());
  ASSERT_EQ(records.size(), 5u);
  const PersonDayMatrix m = bin_records(records);
  ASSERT_EQ(m.matrix.cols(), 2);
  EXPECT_EQ(m.matrix.value(0, 0), 99.0);
  EXPECT_EQ(m.matrix.value(144, 0), 80.0);
  EXPECT_EQ(m.matrix.value(287, 0), 70.0);
  EXPECT_EQ(m.labels[1].date, (Date{2016, 4, 13}));
}

TEST(Ingest, LabelsRoundTrip) {
  const std::vector<PersonDay> labels{{"x,y", {2016, 4, 12}}, {"z", {2017, 1, 2}}};
  std::stringstream ss;
  write_table_csv(ss, labels_table(labels));
  EXPECT_EQ(labels_from_table(read_table_csv(ss, kLabelColumns)), labels);
}
