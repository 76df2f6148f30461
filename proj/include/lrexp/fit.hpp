#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrexp/expectile.hpp"
#include "lrexp/factor_model.hpp"
#include "lrexp/optimizer.hpp"

namespace lrexp {

struct FitConfig {
  Tau tau{0.5};
  Index rank = 1;
  OptimizeOptions opts;
  int n_restarts = 1;
  std::uint64_t seed = 0;
  std::optional<Index> orient_pivot;
  // Overrides all initialization (and forces a single restart).
  std::optional<FactorModel> warm_start;
  // Restarts run on up to this many threads; results do not depend on it.
  int threads = 1;
};

struct FitReport {
  FactorModel model;  // canonicalized, and oriented when requested
  double final_loss = 0.0;
  int iterations = 0;
  int function_evals = 0;
  double elapsed_seconds = 0.0;  // optimizer wall time of the selected restart
  OptimizeStatus status = OptimizeStatus::MaxIters;
  std::vector<double> restart_losses;
  int best_restart = 0;
  std::vector<std::string> warnings;
};

// R = row_means, C = col_means, U and V i.i.d. standard normal from the
// restart's stream of `seed`.
FactorModel initial_model(const Vector& row_means, const Vector& col_means, Index rank, std::uint64_t seed,
                          int restart);

// Fits the expectile factor model to an already-normalized matrix.
FitReport fit(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means, const FitConfig& config);

// Fits tau = 0.5 first (with config.n_restarts), then every other tau warm
// started from that solution with a single restart. Reports follow `taus`.
std::vector<FitReport> tau_sweep(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means,
                                 const FitConfig& base, const std::vector<Tau>& taus);

}  // namespace lrexp
