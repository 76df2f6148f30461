#pragma once

#include <span>
#include <vector>

#include "lrexp/masked_matrix.hpp"

namespace lrexp {

// Expectile level, strictly inside (0, 1).
class Tau {
 public:
  explicit Tau(double value);
  double value() const noexcept { return value_; }
  friend bool operator==(Tau, Tau) = default;

 private:
  double value_;
};

// Asymmetric weight: tau for residual >= 0, 1 - tau otherwise.
inline double weight(double residual, Tau tau) noexcept {
  return residual >= 0.0 ? tau.value() : 1.0 - tau.value();
}

// Asymmetric least-squares criterion weight(u) * u^2.
inline double asymmetric_square(double u, Tau tau) noexcept { return weight(u, tau) * u * u; }

struct ExpectileOptions {
  double tol = 1e-10;
  int max_iters = 1000;
};

// Solves tau * sum_{x >= mu}(x - mu) = (1 - tau) * sum_{x < mu}(mu - x) with the
// iteratively reweighted mean mu <- sum(w x) / sum(w), started at the sample mean.
double scalar_expectile(std::span<const double> sample, Tau tau, const ExpectileOptions& opts = {});

// Row-wise expectiles of the observed entries: result(i, t) = expectile(row i, taus[t]).
Matrix marginal_expectile_curves(const MaskedMatrix& x, std::span<const Tau> taus,
                                 const ExpectileOptions& opts = {});

std::vector<Tau> make_taus(std::span<const double> values);

}  // namespace lrexp
