#include "lrexp/factor_model.hpp"

#include <cmath>
#include <string>

namespace lrexp {

namespace {

std::string shape_of(const FactorModel& m) {
  return "r=" + std::to_string(m.r.size()) + " c=" + std::to_string(m.c.size()) + " u=" +
         std::to_string(m.u.rows()) + "x" + std::to_string(m.u.cols()) + " v=" + std::to_string(m.v.rows()) +
         "x" + std::to_string(m.v.cols());
}

// Fills `weighted` with M * W(E) * E and returns sum(M W E^2).
double weighted_residuals(const MaskedMatrix& x, const Matrix& fitted, Tau tau, Matrix& weighted) {
  const Matrix& values = x.values();
  const Mask& mask = x.mask();
  weighted.resize(x.rows(), x.cols());
  double total = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (!mask(i, j)) {
        weighted(i, j) = 0.0;
        continue;
      }
      const double e = values(i, j) - fitted(i, j);
      const double we = weight(e, tau) * e;
      weighted(i, j) = we;
      total += we * e;
    }
  }
  return total;
}

void write_row_major(const Matrix& m, double* out) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index l = 0; l < m.cols(); ++l) *out++ = m(i, l);
}

void read_row_major(const double* in, Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index l = 0; l < m.cols(); ++l) m(i, l) = *in++;
}

void fill_fitted(const Vector& r, const Vector& c, const Matrix& u, const Matrix& v, Matrix& out) {
  out.noalias() = u * v.transpose();
  out.colwise() += r;
  out.rowwise() += c.transpose();
}

}  // namespace

FactorModel FactorModel::zeros(Index n, Index p, Index k) {
  return {Vector::Zero(n), Vector::Zero(p), Matrix::Zero(n, k), Matrix::Zero(p, k)};
}

void FactorModel::check_shape() const {
  if (u.rows() != r.size() || v.rows() != c.size() || u.cols() != v.cols())
    fail(ErrorCode::DimensionMismatch, "inconsistent factor model: " + shape_of(*this));
}

void FactorModel::check_shape(const MaskedMatrix& x) const {
  check_shape();
  if (r.size() != x.rows() || c.size() != x.cols())
    fail(ErrorCode::DimensionMismatch, "model (" + shape_of(*this) + ") does not match a " +
                                           std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " matrix");
}

Matrix fitted_matrix(const FactorModel& model) {
  model.check_shape();
  Matrix out;
  fill_fitted(model.r, model.c, model.u, model.v, out);
  return out;
}

LossValue loss_and_gradient(const FactorModel& model, const MaskedMatrix& x, Tau tau) {
  model.check_shape(x);
  if (x.observed_count() == 0) fail(ErrorCode::EmptyMask, "loss needs at least one observed cell");

  Matrix fitted;
  fill_fitted(model.r, model.c, model.u, model.v, fitted);
  Matrix weighted;
  const double scale = 1.0 / static_cast<double>(x.observed_count());
  LossValue out;
  out.loss = weighted_residuals(x, fitted, tau, weighted) * scale;

  const Index n = x.rows(), p = x.cols(), k = model.rank();
  out.gradient.resize(parameter_count(n, p, k));
  const double g = -2.0 * scale;
  out.gradient.segment(0, n) = g * weighted.rowwise().sum();
  out.gradient.segment(n, p) = g * weighted.colwise().sum().transpose();
  const Matrix grad_u = g * (weighted * model.v);
  const Matrix grad_v = g * (weighted.transpose() * model.u);
  write_row_major(grad_u, out.gradient.data() + n + p);
  write_row_major(grad_v, out.gradient.data() + n + p + n * k);
  return out;
}

double loss_value(const FactorModel& model, const MaskedMatrix& x, Tau tau) {
  model.check_shape(x);
  if (x.observed_count() == 0) fail(ErrorCode::EmptyMask, "loss needs at least one observed cell");
  Matrix fitted;
  fill_fitted(model.r, model.c, model.u, model.v, fitted);
  Matrix weighted;
  return weighted_residuals(x, fitted, tau, weighted) / static_cast<double>(x.observed_count());
}

Vector flatten(const FactorModel& model) {
  model.check_shape();
  const Index n = model.rows(), p = model.cols(), k = model.rank();
  Vector out(parameter_count(n, p, k));
  out.segment(0, n) = model.r;
  out.segment(n, p) = model.c;
  write_row_major(model.u, out.data() + n + p);
  write_row_major(model.v, out.data() + n + p + n * k);
  return out;
}

FactorModel unflatten(std::span<const double> params, Index n, Index p, Index k) {
  if (n < 1 || p < 1 || k < 1) fail(ErrorCode::InvalidArgument, "dimensions must be positive");
  const Index expected = parameter_count(n, p, k);
  if (static_cast<Index>(params.size()) != expected)
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(expected) + " parameters, got " +
                                        std::to_string(params.size()));
  FactorModel m = FactorModel::zeros(n, p, k);
  const double* data = params.data();
  m.r = Eigen::Map<const Vector>(data, n);
  m.c = Eigen::Map<const Vector>(data + n, p);
  read_row_major(data + n + p, m.u);
  read_row_major(data + n + p + n * k, m.v);
  return m;
}

ExpectileObjective::ExpectileObjective(const MaskedMatrix& x, Tau tau, Index rank)
    : x_(x), tau_(tau), rank_(rank) {
  if (rank < 1) fail(ErrorCode::InvalidArgument, "rank must be at least 1");
  if (x.observed_count() == 0) fail(ErrorCode::EmptyMask, "loss needs at least one observed cell");
  inv_n_ = 1.0 / static_cast<double>(x.observed_count());
  r_.resize(x.rows());
  c_.resize(x.cols());
  u_.resize(x.rows(), rank);
  v_.resize(x.cols(), rank);
}

double ExpectileObjective::operator()(const Vector& params, Vector& gradient) {
  const Index n = x_.rows(), p = x_.cols(), k = rank_;
  if (params.size() != dimension())
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(dimension()) + " parameters, got " +
                                        std::to_string(params.size()));
  const double* data = params.data();
  r_ = Eigen::Map<const Vector>(data, n);
  c_ = Eigen::Map<const Vector>(data + n, p);
  read_row_major(data + n + p, u_);
  read_row_major(data + n + p + n * k, v_);

  fill_fitted(r_, c_, u_, v_, residual_);
  const double loss = weighted_residuals(x_, residual_, tau_, weighted_) * inv_n_;

  const double g = -2.0 * inv_n_;
  gradient.resize(params.size());
  gradient.segment(0, n).noalias() = g * weighted_.rowwise().sum();
  gradient.segment(n, p).noalias() = g * weighted_.colwise().sum().transpose();
  grad_u_.noalias() = g * (weighted_ * v_);
  grad_v_.noalias() = g * (weighted_.transpose() * u_);
  write_row_major(grad_u_, gradient.data() + n + p);
  write_row_major(grad_v_, gradient.data() + n + p + n * k);
  return loss;
}

CanonicalizeResult canonicalize(const FactorModel& model) {
  model.check_shape();
  CanonicalizeResult out{model, {}};
  FactorModel& m = out.model;
  const double p = static_cast<double>(m.cols());

  for (Index l = 0; l < m.rank(); ++l) {
    const double mean_v = m.v.col(l).sum() / p;
    m.r += m.u.col(l) * mean_v;
    m.v.col(l).array() -= mean_v;
  }
  // Column norms are captured before U is rescaled so that U V' is preserved.
  for (Index l = 0; l < m.rank(); ++l) {
    const double norm = m.u.col(l).norm();
    if (norm < kZeroColumnNorm) {
      out.zero_columns.push_back(l);
      continue;
    }
    m.u.col(l) /= norm;
    m.v.col(l) *= norm;
  }
  const double mean_c = m.c.sum() / p;
  m.c.array() -= mean_c;
  m.r.array() += mean_c;
  return out;
}

FactorModel orient_rank1(const FactorModel& model, Index pivot_row) {
  model.check_shape();
  if (model.rank() != 1) fail(ErrorCode::RankNotOne, "orientation is defined for rank 1 only, got rank " +
                                                         std::to_string(model.rank()));
  if (pivot_row < 0 || pivot_row >= model.rows())
    fail(ErrorCode::InvalidArgument, "pivot row " + std::to_string(pivot_row) + " out of range");
  FactorModel out = model;
  if (out.u(pivot_row, 0) < 0.0) {
    out.u = -out.u;
    out.v = -out.v;
  }
  return out;
}

}  // namespace lrexp
