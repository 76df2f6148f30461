#include "lrexp/fit.hpp"

#include <cmath>
#include <string>

#include "lrexp/parallel.hpp"
#include "lrexp/rng.hpp"

namespace lrexp {

namespace {

struct Attempt {
  FactorModel model;
  double loss = 0.0;
  OptimizeResult opt;
  std::vector<Index> zero_columns;
};

void check_inputs(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means, const FitConfig& config) {
  if (config.rank < 1) fail(ErrorCode::InvalidArgument, "rank must be at least 1");
  if (config.n_restarts < 1) fail(ErrorCode::InvalidArgument, "n_restarts must be at least 1");
  if (x.observed_count() == 0) fail(ErrorCode::EmptyMask, "nothing observed to fit");
  if (row_means.size() != x.rows() || col_means.size() != x.cols())
    fail(ErrorCode::DimensionMismatch, "row/column means do not match the data dimensions");
  if (config.warm_start) {
    config.warm_start->check_shape(x);
    if (config.warm_start->rank() != config.rank)
      fail(ErrorCode::DimensionMismatch, "warm start has rank " + std::to_string(config.warm_start->rank()) +
                                             " but the fit asks for rank " + std::to_string(config.rank));
  }
  config.opts.validate();
}

void note_normalization(const MaskedMatrix& x, std::vector<std::string>& warnings) {
  if (x.observed_count() < 2) return;
  GlobalStats stats;
  try {
    stats = global_stats(x);
  } catch (const Error&) {
    warnings.emplace_back("input has zero variance; it cannot be normalized");
    return;
  }
  if (std::abs(stats.mean) > 1e-6 || std::abs(stats.std - 1.0) > 1e-6) {
    warnings.emplace_back("input does not look normalized (mean " + std::to_string(stats.mean) + ", std " +
                          std::to_string(stats.std) + ")");
  }
}

}  // namespace

FactorModel initial_model(const Vector& row_means, const Vector& col_means, Index rank, std::uint64_t seed,
                          int restart) {
  const Index n = row_means.size(), p = col_means.size();
  FactorModel m = FactorModel::zeros(n, p, rank);
  m.r = row_means;
  m.c = col_means;
  NormalSampler normal(Xoshiro256(seed, streams::kInitBase + static_cast<std::uint64_t>(restart)));
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < rank; ++l) m.u(i, l) = normal();
  for (Index j = 0; j < p; ++j)
    for (Index l = 0; l < rank; ++l) m.v(j, l) = normal();
  return m;
}

FitReport fit(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means, const FitConfig& config) {
  check_inputs(x, row_means, col_means, config);

  FitReport report;
  note_normalization(x, report.warnings);
  const bool orient = config.orient_pivot.has_value() && config.rank == 1;
  if (config.orient_pivot && !orient) report.warnings.emplace_back("orientation pivot ignored for rank > 1");

  const int restarts = config.warm_start ? 1 : config.n_restarts;
  std::vector<Attempt> attempts(static_cast<std::size_t>(restarts));
  parallel_for(attempts.size(), config.threads, [&](std::size_t r) {
    const FactorModel start = config.warm_start ? *config.warm_start
                                                : initial_model(row_means, col_means, config.rank, config.seed,
                                                                static_cast<int>(r));
    ExpectileObjective objective(x, config.tau, config.rank);
    Attempt& a = attempts[r];
    a.opt = minimize([&objective](const Vector& p, Vector& g) { return objective(p, g); }, flatten(start),
                     config.opts);
    CanonicalizeResult canon = canonicalize(unflatten(a.opt.x_final, x.rows(), x.cols(), config.rank));
    a.zero_columns = std::move(canon.zero_columns);
    a.model = orient ? orient_rank1(canon.model, *config.orient_pivot) : std::move(canon.model);
    a.loss = loss_value(a.model, x, config.tau);
  });

  std::size_t best = 0;
  for (std::size_t r = 0; r < attempts.size(); ++r) {
    report.restart_losses.push_back(attempts[r].loss);
    if (attempts[r].loss < attempts[best].loss) best = r;
  }
  Attempt& chosen = attempts[best];
  report.model = std::move(chosen.model);
  report.final_loss = chosen.loss;
  report.iterations = chosen.opt.iterations;
  report.function_evals = chosen.opt.function_evals;
  report.elapsed_seconds = chosen.opt.elapsed_seconds;
  report.status = chosen.opt.status;
  report.best_restart = static_cast<int>(best);
  for (Index col : chosen.zero_columns)
    report.warnings.emplace_back("U column " + std::to_string(col) + " is numerically zero and was left unscaled");
  return report;
}

std::vector<FitReport> tau_sweep(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means,
                                 const FitConfig& base, const std::vector<Tau>& taus) {
  if (taus.empty()) fail(ErrorCode::InvalidArgument, "tau sweep needs at least one tau");

  FitConfig anchor_config = base;
  anchor_config.tau = Tau(0.5);
  const FitReport anchor = fit(x, row_means, col_means, anchor_config);

  std::vector<FitReport> reports;
  reports.reserve(taus.size());
  for (const Tau tau : taus) {
    if (tau.value() == 0.5) {
      reports.push_back(anchor);
      continue;
    }
    FitConfig config = base;
    config.tau = tau;
    config.n_restarts = 1;
    config.warm_start = anchor.model;
    reports.push_back(fit(x, row_means, col_means, config));
  }
  return reports;
}

}  // namespace lrexp
