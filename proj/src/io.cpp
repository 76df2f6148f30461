#include "lrexp/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace lrexp {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

bool is_missing(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  if (field.empty()) return true;
  if (field.size() != 3) return false;
  return (field[0] | 0x20) == 'n' && (field[1] | 0x20) == 'a' && (field[2] | 0x20) == 'n';
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json row_major_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Vector vector_from(const Json& a, Index n, const char* name) {
  if (!a.is_array() || static_cast<Index>(a.size()) != n)
    fail(ErrorCode::LengthMismatch, std::string("model field '") + name + "' has the wrong length");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Matrix matrix_from(const Json& a, Index rows, Index cols, const char* name) {
  const Vector flat = vector_from(a, rows * cols, name);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = flat(i * cols + j);
  return m;
}

}  // namespace

MaskedMatrix read_matrix_csv(std::istream& in, bool header) {
  std::string line;
  std::size_t line_no = 0;
  if (header) {
    if (!std::getline(in, line)) fail(ErrorCode::EmptyInput, "matrix CSV is empty");
    ++line_no;
  }
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> observed;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (!rows.empty() && fields.size() != rows.front().size())
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(rows.front().size()) + " fields, found " +
                                      std::to_string(fields.size()));
    std::vector<double> values(fields.size(), 0.0);
    std::vector<bool> seen(fields.size(), false);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (is_missing(fields[j])) continue;
      try {
        values[j] = parse_real(fields[j]);
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!std::isfinite(values[j]))
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": infinite value");
      seen[j] = true;
    }
    rows.push_back(std::move(values));
    observed.push_back(std::move(seen));
  }
  if (rows.empty()) fail(ErrorCode::EmptyInput, "matrix CSV has no rows");

  const Index n = static_cast<Index>(rows.size()), p = static_cast<Index>(rows.front().size());
  Matrix values(n, p);
  Mask mask(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) {
      values(i, j) = rows[i][j];
      mask(i, j) = observed[i][j];
    }
  return MaskedMatrix(std::move(values), std::move(mask));
}

void write_matrix_csv(std::ostream& out, const MaskedMatrix& x, bool header) {
  if (header) {
    for (Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << 'c' << j;
    out << '\n';
  }
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << (x.observed(i, j) ? format_real(x.value(i, j)) : "nan");
    }
    out << '\n';
  }
}

MaskedMatrix read_matrix_csv(const std::filesystem::path& path, bool header) {
  auto in = open_in(path);
  return read_matrix_csv(in, header);
}

void write_matrix_csv(const std::filesystem::path& path, const MaskedMatrix& x, bool header) {
  auto out = open_out(path);
  write_matrix_csv(out, x, header);
  check_written(out, path);
}

Json model_to_json(const SavedModel& saved) {
  const FactorModel& m = saved.model;
  m.check_shape();
  Json doc;
  doc["n"] = m.rows();
  doc["p"] = m.cols();
  doc["k"] = m.rank();
  doc["tau"] = saved.tau.value();
  doc["r"] = vector_json(m.r);
  doc["c"] = vector_json(m.c);
  doc["u"] = row_major_json(m.u);
  doc["v"] = row_major_json(m.v);
  doc["normalization"] = {{"mean", saved.info.mean},
                          {"std", saved.info.std},
                          {"row_means", vector_json(saved.info.row_means)},
                          {"col_means", vector_json(saved.info.col_means)}};
  return doc;
}

SavedModel model_from_json(const Json& doc) {
  try {
    const Index n = doc.at("n").get<Index>(), p = doc.at("p").get<Index>(), k = doc.at("k").get<Index>();
    if (n < 1 || p < 1 || k < 1) fail(ErrorCode::InvalidArgument, "model dimensions must be positive");
    SavedModel out;
    out.tau = Tau(doc.at("tau").get<double>());
    out.model.r = vector_from(doc.at("r"), n, "r");
    out.model.c = vector_from(doc.at("c"), p, "c");
    out.model.u = matrix_from(doc.at("u"), n, k, "u");
    out.model.v = matrix_from(doc.at("v"), p, k, "v");
    if (doc.contains("normalization")) {
      const Json& norm = doc.at("normalization");
      out.info.mean = norm.at("mean").get<double>();
      out.info.std = norm.at("std").get<double>();
      out.info.row_means = vector_from(norm.at("row_means"), n, "row_means");
      out.info.col_means = vector_from(norm.at("col_means"), p, "col_means");
    } else {
      out.info.row_means = Vector::Zero(n);
      out.info.col_means = Vector::Zero(p);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const SavedModel& saved) { write_json(path, model_to_json(saved)); }

SavedModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

Json report_to_json(const FitReport& report) {
  Json doc;
  doc["final_loss"] = report.final_loss;
  doc["iterations"] = report.iterations;
  doc["function_evals"] = report.function_evals;
  doc["elapsed_seconds"] = report.elapsed_seconds;
  doc["status"] = std::string(to_string(report.status));
  doc["best_restart"] = report.best_restart;
  doc["restart_losses"] = report.restart_losses;
  doc["warnings"] = report.warnings;
  return doc;
}

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  check_written(out, path);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  write_table_csv(out, table);
  check_written(out, path);
}

Table read_table(const std::filesystem::path& path, const std::vector<Column>& schema) {
  auto in = open_in(path);
  return read_table_csv(in, schema);
}

}  // namespace lrexp
