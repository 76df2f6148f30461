#include "lrexp/masked_matrix.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lrexp {

MaskedMatrix::MaskedMatrix(Matrix values, Mask mask) : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    fail(ErrorCode::DimensionMismatch, "values are " + std::to_string(values_.rows()) + "x" +
                                           std::to_string(values_.cols()) + " but mask is " +
                                           std::to_string(mask_.rows()) + "x" + std::to_string(mask_.cols()));
  }
  observed_ = mask_.count();
}

MaskedMatrix MaskedMatrix::from_nan(const Matrix& values) {
  Mask mask = values.unaryExpr([](double v) { return !std::isnan(v); });
  return MaskedMatrix(values, std::move(mask));
}

MaskedMatrix MaskedMatrix::fully_observed(Matrix values) {
  Mask mask = Mask::Constant(values.rows(), values.cols(), true);
  return MaskedMatrix(std::move(values), std::move(mask));
}

MaskedMatrix MaskedMatrix::with_values(Matrix values) const { return MaskedMatrix(std::move(values), mask_); }

Matrix MaskedMatrix::to_nan_matrix() const {
  return mask_.select(values_, Matrix::Constant(rows(), cols(), std::numeric_limits<double>::quiet_NaN()));
}

std::vector<double> MaskedMatrix::observed_in_row(Index i) const {
  std::vector<double> out;
  for (Index j = 0; j < cols(); ++j)
    if (mask_(i, j)) out.push_back(values_(i, j));
  return out;
}

std::vector<double> MaskedMatrix::observed_in_col(Index j) const {
  std::vector<double> out;
  for (Index i = 0; i < rows(); ++i)
    if (mask_(i, j)) out.push_back(values_(i, j));
  return out;
}

std::vector<double> MaskedMatrix::observed_values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(observed_));
  for (Index j = 0; j < cols(); ++j)
    for (Index i = 0; i < rows(); ++i)
      if (mask_(i, j)) out.push_back(values_(i, j));
  return out;
}

GlobalStats global_stats(const MaskedMatrix& x, StdDivisor divisor) {
  const Index n = x.observed_count();
  if (n < 2) fail(ErrorCode::DegenerateMatrix, "need at least two observed entries, got " + std::to_string(n));

  double sum = 0.0;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.observed(i, j)) sum += x.value(i, j);
  const double mean = sum / static_cast<double>(n);

  double ss = 0.0;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.observed(i, j)) {
        const double d = x.value(i, j) - mean;
        ss += d * d;
      }
  const double dof = divisor == StdDivisor::Population ? static_cast<double>(n) : static_cast<double>(n - 1);
  const double sd = std::sqrt(ss / dof);
  if (!(sd > 0.0)) fail(ErrorCode::DegenerateMatrix, "observed values have zero variance");
  return {mean, sd};
}

Vector observed_row_means(const MaskedMatrix& x) {
  Vector means = Vector::Zero(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    Index count = 0;
    for (Index j = 0; j < x.cols(); ++j)
      if (x.observed(i, j)) {
        sum += x.value(i, j);
        ++count;
      }
    if (count > 0) means(i) = sum / static_cast<double>(count);
  }
  return means;
}

Vector observed_col_means(const MaskedMatrix& x) {
  Vector means = Vector::Zero(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < x.rows(); ++i)
      if (x.observed(i, j)) {
        sum += x.value(i, j);
        ++count;
      }
    if (count > 0) means(j) = sum / static_cast<double>(count);
  }
  return means;
}

NormalizedMatrix normalize(const MaskedMatrix& x, StdDivisor divisor) {
  const GlobalStats stats = global_stats(x, divisor);
  Matrix values = Matrix::Zero(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.observed(i, j)) values(i, j) = (x.value(i, j) - stats.mean) / stats.std;

  NormalizedMatrix out{x.with_values(std::move(values)), {}};
  out.info.mean = stats.mean;
  out.info.std = stats.std;
  out.info.row_means = observed_row_means(out.matrix);
  out.info.col_means = observed_col_means(out.matrix);
  return out;
}

MaskedMatrix denormalize(const MaskedMatrix& xn, const NormalizationInfo& info) {
  Matrix values = Matrix::Zero(xn.rows(), xn.cols());
  for (Index j = 0; j < xn.cols(); ++j)
    for (Index i = 0; i < xn.rows(); ++i)
      if (xn.observed(i, j)) values(i, j) = xn.value(i, j) * info.std + info.mean;
  return xn.with_values(std::move(values));
}

ColumnSelection drop_sparse_columns(const MaskedMatrix& x, double max_missing_fraction) {
  if (!(max_missing_fraction > 0.0 && max_missing_fraction < 1.0))
    fail(ErrorCode::InvalidArgument, "max_missing_fraction must lie in (0, 1)");

  ColumnSelection out;
  const double rows = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    const Index missing = x.rows() - x.mask().col(j).count();
    if (static_cast<double>(missing) / rows <= max_missing_fraction) out.kept.push_back(j);
  }
  if (out.kept.empty()) fail(ErrorCode::EmptyResult, "no column has a missing fraction within the threshold");

  const Index kept = static_cast<Index>(out.kept.size());
  Matrix values(x.rows(), kept);
  Mask mask(x.rows(), kept);
  for (Index c = 0; c < kept; ++c) {
    values.col(c) = x.values().col(out.kept[static_cast<std::size_t>(c)]);
    mask.col(c) = x.mask().col(out.kept[static_cast<std::size_t>(c)]);
  }
  out.matrix = MaskedMatrix(std::move(values), std::move(mask));
  return out;
}

double mean_abs_difference(const Matrix& a, const Matrix& b, const Mask& mask) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == mask.rows() && a.cols() == mask.cols(),
          ErrorCode::DimensionMismatch, "mean_abs_difference operands differ in shape");
  double sum = 0.0;
  Index count = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (mask(i, j)) {
        sum += std::abs(a(i, j) - b(i, j));
        ++count;
      }
  if (count == 0) fail(ErrorCode::EmptyMask, "no observed cells to compare");
  return sum / static_cast<double>(count);
}

}  // namespace lrexp
