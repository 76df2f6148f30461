#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "lrexp/io.hpp"

using namespace lrexp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

MaskedMatrix sample_matrix() {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  Matrix v(4, 5);
  Mask m(4, 5);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 5; ++j) {
      v(i, j) = z(gen) * 1e3;
      m(i, j) = (i + 2 * j) % 3 != 0;
    }
  return MaskedMatrix(v, m);
}

}  // namespace

TEST(RealFormat, RoundTripsExactly) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(parse_real(format_real(x)), x);
  }
  EXPECT_TRUE(std::isnan(parse_real("NaN")));
  EXPECT_EQ(parse_real("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_real("1.5x"), Error);
  EXPECT_THROW(parse_real(""), Error);
}

TEST(Csv, QuotedFields) {
  const auto fields = split_csv_line(R"(a,"b,c","d ""q""",)");
  ASSERT_EQ(fields.size(), 4u);
  EXPECT_EQ(fields[1], "b,c");
  EXPECT_EQ(fields[2], "d \"q\"");
  EXPECT_EQ(fields[3], "");
  EXPECT_EQ(split_csv_line(quote_csv_field("x,\"y\""))[0], "x,\"y\"");
}

TEST(MatrixCsv, RoundTripKeepsMaskAndValues) {
  const MaskedMatrix x = sample_matrix();
  for (bool header : {false, true}) {
    std::stringstream ss;
    write_matrix_csv(ss, x, header);
    const MaskedMatrix y = read_matrix_csv(ss, header);
    EXPECT_EQ(y.mask(), x.mask());
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j)
        if (x.observed(i, j)) EXPECT_EQ(y.value(i, j), x.value(i, j));
  }
}

TEST(MatrixCsv, MissingMarkers) {
  std::istringstream in("1,,3\nnan,5,NaN\n");
  const MaskedMatrix x = read_matrix_csv(in);
  EXPECT_EQ(x.observed_count(), 3);
  EXPECT_FALSE(x.observed(0, 1));
  EXPECT_FALSE(x.observed(1, 0));
  EXPECT_FALSE(x.observed(1, 2));
  EXPECT_EQ(x.value(1, 1), 5.0);
}

TEST(MatrixCsv, Errors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_EQ(code_of([&] { read_matrix_csv(ragged); }), ErrorCode::ParseError);
  std::istringstream word("1,two\n");
  EXPECT_EQ(code_of([&] { read_matrix_csv(word); }), ErrorCode::ParseError);
  std::istringstream infinite("1,inf\n");
  EXPECT_EQ(code_of([&] { read_matrix_csv(infinite); }), ErrorCode::ParseError);
  std::istringstream empty("");
  EXPECT_EQ(code_of([&] { read_matrix_csv(empty); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { read_matrix_csv(std::filesystem::path("/nonexistent/x.csv")); }), ErrorCode::Io);
}

TEST(ModelJson, RoundTripIsExact) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  SavedModel saved;
  saved.model = FactorModel::zeros(6, 4, 2);
  for (Index i = 0; i < 6; ++i) {
    saved.model.r(i) = z(gen);
    for (Index l = 0; l < 2; ++l) saved.model.u(i, l) = z(gen);
  }
  for (Index j = 0; j < 4; ++j) {
    saved.model.c(j) = z(gen);
    for (Index l = 0; l < 2; ++l) saved.model.v(j, l) = z(gen) / 3.0;
  }
  saved.tau = Tau(0.1);
  saved.info.mean = 71.25;
  saved.info.std = 12.0 / 7.0;
  saved.info.row_means = Vector::LinSpaced(6, -1, 1);
  saved.info.col_means = Vector::LinSpaced(4, 0.1, 0.7);

  const SavedModel back = model_from_json(Json::parse(model_to_json(saved).dump()));
  EXPECT_EQ(back.model.r, saved.model.r);
  EXPECT_EQ(back.model.c, saved.model.c);
  EXPECT_EQ(back.model.u, saved.model.u);
  EXPECT_EQ(back.model.v, saved.model.v);
  EXPECT_EQ(back.tau.value(), 0.1);
  EXPECT_EQ(back.info.mean, saved.info.mean);
  EXPECT_EQ(back.info.std, saved.info.std);
  EXPECT_EQ(back.info.row_means, saved.info.row_means);
  EXPECT_EQ(back.info.col_means, saved.info.col_means);
}

TEST(ModelJson, LayoutIsRowMajor) {
  SavedModel saved;
  saved.model = FactorModel::zeros(2, 1, 2);
  saved.model.u << 1, 2, 3, 4;
  const Json doc = model_to_json(saved);
  EXPECT_EQ(doc["u"].get<std::vector<double>>(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(doc["k"].get<int>(), 2);
}

TEST(ModelJson, RejectsMalformed) {
  Json doc = model_to_json(SavedModel{FactorModel::zeros(2, 2, 1), Tau(0.5), {}});
  doc["u"] = std::vector<double>{1.0};
  EXPECT_THROW(model_from_json(doc), Error);
  Json no_tau = model_to_json(SavedModel{FactorModel::zeros(2, 2, 1), Tau(0.5), {}});
  no_tau.erase("tau");
  EXPECT_THROW(model_from_json(no_tau), Error);
}

TEST(Table, RoundTripAndSchemaCheck) {
  Table t({{"name", ColumnType::Text}, {"n", ColumnType::Integer}, {"x", ColumnType::Real}});
  t.add_row({std::string("a,b"), std::int64_t{3}, 0.1});
  t.add_row({std::string("c"), std::int64_t{-4}, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_THROW(t.add_row({std::string("c"), 1.0, 2.0}), Error);
  EXPECT_THROW(t.add_row({std::string("c")}), Error);

  std::stringstream ss;
  write_table_csv(ss, t);
  const std::string text = ss.str();
  std::istringstream in(text);
  const Table back = read_table_csv(in, {{"name", ColumnType::Text}, {"n", ColumnType::Integer}, {"x", ColumnType::Real}});
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.text(0, "name"), "a,b");
  EXPECT_EQ(back.integer(1, "n"), -4);
  EXPECT_EQ(back.real(0, "x"), 0.1);
  EXPECT_TRUE(std::isnan(back.real(1, "x")));

  std::istringstream wrong(text);
  EXPECT_THROW(read_table_csv(wrong, {{"other", ColumnType::Text}}), Error);
}
