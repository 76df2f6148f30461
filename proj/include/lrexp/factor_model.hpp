#pragma once

#include <span>
#include <vector>

#include "lrexp/expectile.hpp"
#include "lrexp/masked_matrix.hpp"

namespace lrexp {

// Additive-plus-multiplicative representation X ~ R 1' + 1 C' + U V'.
struct FactorModel {
  Vector r;  // n additive row effects
  Vector c;  // p additive column effects
  Matrix u;  // n x k multiplicative row effects
  Matrix v;  // p x k multiplicative column effects

  static FactorModel zeros(Index n, Index p, Index k);

  Index rows() const noexcept { return r.size(); }
  Index cols() const noexcept { return c.size(); }
  Index rank() const noexcept { return u.cols(); }
  Index parameter_count() const noexcept { return rows() + cols() + (rows() + cols()) * rank(); }

  // Throws DimensionMismatch unless r/c/u/v agree with each other (and with x when given).
  void check_shape() const;
  void check_shape(const MaskedMatrix& x) const;
};

inline Index parameter_count(Index n, Index p, Index k) noexcept { return n + p + (n + p) * k; }

struct LossValue {
  double loss = 0.0;
  Vector gradient;  // flattened in the same order as flatten()
};

Matrix fitted_matrix(const FactorModel& model);

// Masked expectile loss N^-1 sum M W(E) E^2 with E = X - fitted, and its gradient
// blocks -2/N (MWE) 1, -2/N (MWE)' 1, -2/N (MWE) V, -2/N (MWE)' U.
LossValue loss_and_gradient(const FactorModel& model, const MaskedMatrix& x, Tau tau);
double loss_value(const FactorModel& model, const MaskedMatrix& x, Tau tau);

// Layout: R, C, U row-major, V row-major.
Vector flatten(const FactorModel& model);
FactorModel unflatten(std::span<const double> params, Index n, Index p, Index k);
inline FactorModel unflatten(const Vector& params, Index n, Index p, Index k) {
  return unflatten(std::span<const double>(params.data(), static_cast<std::size_t>(params.size())), n, p, k);
}

// Loss and gradient on flattened parameters, reusing its work buffers between
// calls. One instance per thread.
class ExpectileObjective {
 public:
  ExpectileObjective(const MaskedMatrix& x, Tau tau, Index rank);

  double operator()(const Vector& params, Vector& gradient);
  Index dimension() const noexcept { return parameter_count(x_.rows(), x_.cols(), rank_); }

 private:
  const MaskedMatrix& x_;
  Tau tau_;
  Index rank_;
  double inv_n_;
  Matrix u_, v_, residual_, weighted_, grad_u_, grad_v_;
  Vector r_, c_;
};

struct CanonicalizeResult {
  FactorModel model;
  // U columns whose norm was below 1e-14 and were therefore left unscaled.
  std::vector<Index> zero_columns;
  bool ok() const noexcept { return zero_columns.empty(); }
};

inline constexpr double kZeroColumnNorm = 1e-14;

// Moves V column means into R, gives U unit-norm columns (scale moved into V),
// and moves mean(C) into R. The fitted matrix is unchanged.
CanonicalizeResult canonicalize(const FactorModel& model);

// Rank-one sign convention: negate U and V when U[pivot_row] < 0.
FactorModel orient_rank1(const FactorModel& model, Index pivot_row);

// Segment 72 of a 288-segment day is 06:00.
inline constexpr Index kDefaultOrientPivot = 72;

}  // namespace lrexp
