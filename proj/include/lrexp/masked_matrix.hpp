#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "lrexp/error.hpp"

namespace lrexp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Dense n x p matrix plus an observation mask. Values stored at unobserved
// cells are never read by any routine in this library.
class MaskedMatrix {
 public:
  MaskedMatrix() = default;
  MaskedMatrix(Matrix values, Mask mask);

  // NaN cells become unobserved.
  static MaskedMatrix from_nan(const Matrix& values);
  static MaskedMatrix fully_observed(Matrix values);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  const Mask& mask() const noexcept { return mask_; }
  bool observed(Index i, Index j) const { return mask_(i, j); }
  double value(Index i, Index j) const { return values_(i, j); }
  Index observed_count() const noexcept { return observed_; }

  // Same mask, new values.
  MaskedMatrix with_values(Matrix values) const;
  // Copy with NaN written at every unobserved cell.
  Matrix to_nan_matrix() const;

  std::vector<double> observed_in_row(Index i) const;
  std::vector<double> observed_in_col(Index j) const;
  std::vector<double> observed_values() const;

 private:
  Matrix values_;
  Mask mask_;
  Index observed_ = 0;
};

enum class StdDivisor { Population, Sample };

struct GlobalStats {
  double mean = 0.0;
  double std = 1.0;
};

struct NormalizationInfo {
  double mean = 0.0;
  double std = 1.0;
  // Means of the normalized matrix over observed cells; 0 for empty rows/columns.
  Vector row_means;
  Vector col_means;
};

struct NormalizedMatrix {
  MaskedMatrix matrix;
  NormalizationInfo info;
};

struct ColumnSelection {
  MaskedMatrix matrix;
  std::vector<Index> kept;  // new column position -> original column index
};

// Mean and standard deviation over observed cells. Throws DegenerateMatrix
// with fewer than two observed cells or zero spread.
GlobalStats global_stats(const MaskedMatrix& x, StdDivisor divisor = StdDivisor::Population);

// Per-row and per-column means over observed cells (0 where nothing is observed).
Vector observed_row_means(const MaskedMatrix& x);
Vector observed_col_means(const MaskedMatrix& x);

NormalizedMatrix normalize(const MaskedMatrix& x, StdDivisor divisor = StdDivisor::Population);
MaskedMatrix denormalize(const MaskedMatrix& xn, const NormalizationInfo& info);

// Keeps the columns whose missing fraction is <= max_missing_fraction.
ColumnSelection drop_sparse_columns(const MaskedMatrix& x, double max_missing_fraction);

// Mean of |a - b| over the cells observed in `mask`.
double mean_abs_difference(const Matrix& a, const Matrix& b, const Mask& mask);

}  // namespace lrexp
