#include "lrexp/expectile.hpp"

#include <cmath>
#include <string>

namespace lrexp {

Tau::Tau(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0))
    fail(ErrorCode::InvalidArgument, "tau must lie strictly inside (0, 1), got " + std::to_string(value));
}

double scalar_expectile(std::span<const double> sample, Tau tau, const ExpectileOptions& opts) {
  if (sample.empty()) fail(ErrorCode::EmptySample, "expectile of an empty sample");
  if (!(opts.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");

  double sum = 0.0;
  bool constant = true;
  for (double x : sample) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "sample contains a non-finite value");
    sum += x;
    constant = constant && x == sample.front();
  }
  if (constant) return sample.front();
  double mu = sum / static_cast<double>(sample.size());
  if (tau.value() == 0.5) return mu;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    double num = 0.0;
    double den = 0.0;
    for (double x : sample) {
      const double w = weight(x - mu, tau);
      num += w * x;
      den += w;
    }
    const double next = num / den;
    const bool done = std::abs(next - mu) <= opts.tol * (1.0 + std::abs(mu));
    mu = next;
    if (done) return mu;
  }
  fail(ErrorCode::NonConvergence,
       "expectile iteration did not settle within " + std::to_string(opts.max_iters) + " iterations");
}

Matrix marginal_expectile_curves(const MaskedMatrix& x, std::span<const Tau> taus, const ExpectileOptions& opts) {
  Matrix out(x.rows(), static_cast<Index>(taus.size()));
  for (Index i = 0; i < x.rows(); ++i) {
    const std::vector<double> row = x.observed_in_row(i);
    if (row.empty()) fail(ErrorCode::EmptyRow, "row " + std::to_string(i) + " has no observed entries");
    for (std::size_t t = 0; t < taus.size(); ++t)
      out(i, static_cast<Index>(t)) = scalar_expectile(row, taus[t], opts);
  }
  return out;
}

std::vector<Tau> make_taus(std::span<const double> values) {
  std::vector<Tau> taus;
  taus.reserve(values.size());
  for (double v : values) taus.emplace_back(v);
  return taus;
}

}  // namespace lrexp
