#include "lrexp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "lrexp/parallel.hpp"
#include "lrexp/rng.hpp"

namespace lrexp {

double icc(const GroupedSeries& data) {
  const std::size_t n = data.values.size();
  if (data.group_ids.size() != n) fail(ErrorCode::LengthMismatch, "values and group_ids differ in length");
  if (n == 0) fail(ErrorCode::EmptySample, "icc needs at least one value");
  for (double y : data.values)
    if (!std::isfinite(y)) fail(ErrorCode::InvalidArgument, "icc values must be finite");

  double mean = 0.0;
  for (double y : data.values) mean += y;
  mean /= static_cast<double>(n);

  struct Group {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::int64_t, Group> groups;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Group& g = groups[data.group_ids[i]];
    g.sum += data.values[i];
    ++g.count;
    total += (data.values[i] - mean) * (data.values[i] - mean);
  }
  if (groups.size() < 2) fail(ErrorCode::InvalidArgument, "icc needs at least two groups");
  if (!(total > 0.0)) fail(ErrorCode::DegenerateVariance, "values have zero variance");

  double between = 0.0;
  for (const auto& [id, g] : groups) {
    const double d = g.sum / static_cast<double>(g.count) - mean;
    between += static_cast<double>(g.count) * d * d;
  }
  return std::clamp(between / total, 0.0, 1.0);
}

std::vector<std::int64_t> group_ids_from_labels(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::int64_t> ids;
  std::vector<std::int64_t> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<std::int64_t>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

std::vector<double> upper_triangle(const Matrix& m) {
  std::vector<double> out;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace

std::vector<double> PairStudyResult::pair_loss_diffs() const { return upper_triangle(loss_diff); }
std::vector<double> PairStudyResult::pair_mads() const { return upper_triangle(mad); }

PairStudyResult init_resilience(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means,
                                const FitConfig& config, int n_trials) {
  if (n_trials < 2) fail(ErrorCode::InvalidArgument, "init_resilience needs at least two trials");
  if (config.warm_start) fail(ErrorCode::InvalidArgument, "init_resilience draws its own initializations");

  std::vector<FitReport> reports(static_cast<std::size_t>(n_trials));
  parallel_for(reports.size(), config.threads, [&](std::size_t t) {
    FitConfig trial = config;
    trial.n_restarts = 1;
    trial.threads = 1;
    trial.seed = derive_seed(config.seed, t);
    reports[t] = fit(x, row_means, col_means, trial);
  });

  const Index t = n_trials;
  std::vector<Matrix> fits;
  fits.reserve(reports.size());
  for (const auto& r : reports) fits.push_back(fitted_matrix(r.model));

  PairStudyResult out;
  out.loss_diff = Matrix::Zero(t, t);
  out.mad = Matrix::Zero(t, t);
  for (const auto& r : reports) out.losses.push_back(r.final_loss);
  for (Index i = 0; i < t; ++i) {
    for (Index j = i + 1; j < t; ++j) {
      const double d = std::abs(out.losses[i] - out.losses[j]);
      const double m = mean_abs_difference(fits[i], fits[j], x.mask());
      out.loss_diff(i, j) = out.loss_diff(j, i) = d;
      out.mad(i, j) = out.mad(j, i) = m;
    }
  }
  return out;
}

namespace {

void check_study(const StudyOptions& study) {
  if (study.algorithms.empty()) fail(ErrorCode::InvalidArgument, "no algorithms selected");
  study.opts.validate();
}

// One restart from a fixed start, without orientation.
FitReport run_from(const NormalizedMatrix& data, const FactorModel& start, Tau tau, Algorithm algorithm,
                   const OptimizeOptions& opts) {
  FitConfig config;
  config.tau = tau;
  config.rank = start.rank();
  config.opts = opts;
  config.opts.algorithm = algorithm;
  config.warm_start = start;
  return fit(data.matrix, data.info.row_means, data.info.col_means, config);
}

}  // namespace

AlgorithmComparison compare_algorithms(const SimulationSpec& spec, int n_datasets, int n_inits, Tau tau, Index rank,
                                       const StudyOptions& study) {
  if (n_datasets < 1 || n_inits < 1) fail(ErrorCode::InvalidArgument, "n_datasets and n_inits must be positive");
  if (rank < 1) fail(ErrorCode::InvalidArgument, "rank must be at least 1");
  check_study(study);
  spec.validate();

  AlgorithmComparison out;
  out.datasets.resize(static_cast<std::size_t>(n_datasets));
  parallel_for(out.datasets.size(), study.threads, [&](std::size_t d) {
    SimulationSpec ds = spec;
    ds.seed = derive_seed(spec.seed, d);
    const NormalizedMatrix data = normalize(generate(ds).x);

    DatasetComparison& cmp = out.datasets[d];
    cmp.dataset = static_cast<int>(d);
    cmp.seed = ds.seed;
    for (Algorithm a : study.algorithms) cmp.runs.push_back(AlgorithmRun{a, INFINITY, 0.0, 0.0});
    for (int i = 0; i < n_inits; ++i) {
      const FactorModel start = initial_model(data.info.row_means, data.info.col_means, rank, ds.seed, i);
      for (auto& run : cmp.runs) {
        const FitReport r = run_from(data, start, tau, run.algorithm, study.opts);
        run.min_loss = std::min(run.min_loss, r.final_loss);
        run.total_seconds += r.elapsed_seconds;
        run.mean_iterations += r.iterations;
      }
    }
    std::size_t best_loss = 0, best_time = 0;
    double worst_loss = cmp.runs[0].min_loss;
    for (std::size_t a = 0; a < cmp.runs.size(); ++a) {
      cmp.runs[a].mean_iterations /= n_inits;
      if (cmp.runs[a].min_loss < cmp.runs[best_loss].min_loss) best_loss = a;
      if (cmp.runs[a].total_seconds < cmp.runs[best_time].total_seconds) best_time = a;
      worst_loss = std::max(worst_loss, cmp.runs[a].min_loss);
    }
    cmp.loss_winner = cmp.runs[best_loss].algorithm;
    cmp.time_winner = cmp.runs[best_time].algorithm;
    cmp.loss_spread = worst_loss - cmp.runs[best_loss].min_loss;
  });

  for (std::size_t a = 0; a < study.algorithms.size(); ++a) {
    AlgorithmTally tally;
    tally.algorithm = study.algorithms[a];
    for (const auto& cmp : out.datasets) {
      const AlgorithmRun& run = cmp.runs[a];
      if (cmp.loss_winner == run.algorithm) ++tally.min_loss_wins;
      if (cmp.time_winner == run.algorithm) ++tally.min_time_wins;
      double best = run.min_loss;
      for (const auto& other : cmp.runs) best = std::min(best, other.min_loss);
      tally.mean_loss_gap += run.min_loss - best;
      tally.mean_seconds += run.total_seconds;
    }
    tally.mean_loss_gap /= n_datasets;
    tally.mean_seconds /= n_datasets;
    out.summary.push_back(tally);
  }
  for (const auto& cmp : out.datasets) out.max_loss_spread = std::max(out.max_loss_spread, cmp.loss_spread);
  return out;
}

RankSweepResult rank_sweep(const SimulationSpec& spec, const std::vector<Tau>& taus, const std::vector<Index>& ranks,
                           int n_trials, const StudyOptions& study) {
  if (ranks.empty()) fail(ErrorCode::InvalidArgument, "rank sweep needs at least one rank");
  if (taus.empty()) fail(ErrorCode::InvalidArgument, "rank sweep needs at least one tau");
  if (n_trials < 1) fail(ErrorCode::InvalidArgument, "n_trials must be positive");
  for (Index k : ranks)
    if (k < 1) fail(ErrorCode::InvalidArgument, "ranks must be at least 1");
  check_study(study);
  spec.validate();

  const std::size_t per_trial = taus.size() * ranks.size() * study.algorithms.size();
  std::vector<RankSweepTrial> records(per_trial * static_cast<std::size_t>(n_trials));
  parallel_for(static_cast<std::size_t>(n_trials), study.threads, [&](std::size_t t) {
    SimulationSpec ds = spec;
    ds.seed = derive_seed(spec.seed, t);
    const NormalizedMatrix data = normalize(generate(ds).x);
    std::size_t slot = t * per_trial;
    for (const Tau tau : taus) {
      for (Index k : ranks) {
        const FactorModel start = initial_model(data.info.row_means, data.info.col_means, k, ds.seed, 0);
        for (Algorithm a : study.algorithms) {
          const FitReport r = run_from(data, start, tau, a, study.opts);
          records[slot++] = RankSweepTrial{static_cast<int>(t), tau.value(), k,           a,
                                           r.final_loss,        r.iterations, r.function_evals, r.elapsed_seconds,
                                           r.status};
        }
      }
    }
  });

  RankSweepResult out;
  out.trials = std::move(records);
  std::size_t combo = 0;
  for (const Tau tau : taus) {
    for (Index k : ranks) {
      for (Algorithm a : study.algorithms) {
        RankSweepRow row{tau.value(), k, a, 0.0, 0.0, 0.0, n_trials};
        for (int t = 0; t < n_trials; ++t) {
          const RankSweepTrial& rec = out.trials[static_cast<std::size_t>(t) * per_trial + combo];
          row.mean_loss += rec.final_loss;
          row.mean_iterations += rec.iterations;
          row.mean_seconds += rec.seconds;
        }
        row.mean_loss /= n_trials;
        row.mean_iterations /= n_trials;
        row.mean_seconds /= n_trials;
        out.rows.push_back(row);
        ++combo;
      }
    }
  }
  return out;
}

DenormalizedParams denormalize_params(const FactorModel& model, const NormalizationInfo& info) {
  model.check_shape();
  return DenormalizedParams{model.r * info.std, model.u * info.std, model.c, model.v};
}

double rmse_from_loss(double loss, double std) { return std::sqrt(2.0 * loss * std * std); }

BandCurves band_curves(const FactorModel& model, const NormalizationInfo& info) {
  model.check_shape();
  if (model.rank() != 1) fail(ErrorCode::RankNotOne, "band curves need a rank-1 model");
  const DenormalizedParams dn = denormalize_params(model, info);
  const Index p = dn.v.rows();
  const double mean = dn.v.col(0).sum() / static_cast<double>(p);
  double ss = 0.0;
  for (Index j = 0; j < p; ++j) ss += (dn.v(j, 0) - mean) * (dn.v(j, 0) - mean);

  BandCurves out;
  out.v_std = std::sqrt(ss / static_cast<double>(p));
  const Vector half = out.v_std * dn.u.col(0);
  out.center = dn.r;
  out.upper = dn.r + half;
  out.lower = dn.r - half;
  return out;
}

const std::vector<Column> kPairColumns{{"trial_a", ColumnType::Integer},
                                       {"trial_b", ColumnType::Integer},
                                       {"loss_a", ColumnType::Real},
                                       {"loss_b", ColumnType::Real},
                                       {"loss_diff", ColumnType::Real},
                                       {"mad", ColumnType::Real}};

const std::vector<Column> kComparisonDatasetColumns{{"dataset", ColumnType::Integer},
                                                    {"seed", ColumnType::Text},
                                                    {"algorithm", ColumnType::Text},
                                                    {"min_loss", ColumnType::Real},
                                                    {"mean_iterations", ColumnType::Real},
                                                    {"total_seconds", ColumnType::Real},
                                                    {"loss_winner", ColumnType::Integer},
                                                    {"time_winner", ColumnType::Integer}};

const std::vector<Column> kComparisonSummaryColumns{{"algorithm", ColumnType::Text},
                                                    {"min_loss_wins", ColumnType::Integer},
                                                    {"min_time_wins", ColumnType::Integer},
                                                    {"mean_loss_gap", ColumnType::Real},
                                                    {"mean_seconds", ColumnType::Real}};

const std::vector<Column> kRankSweepColumns{{"tau", ColumnType::Real},          {"rank", ColumnType::Integer},
                                            {"algorithm", ColumnType::Text},    {"mean_loss", ColumnType::Real},
                                            {"mean_iterations", ColumnType::Real}, {"mean_seconds", ColumnType::Real},
                                            {"trials", ColumnType::Integer}};

const std::vector<Column> kRankSweepTrialColumns{{"trial", ColumnType::Integer},   {"tau", ColumnType::Real},
                                                 {"rank", ColumnType::Integer},    {"algorithm", ColumnType::Text},
                                                 {"final_loss", ColumnType::Real}, {"iterations", ColumnType::Integer},
                                                 {"function_evals", ColumnType::Integer},
                                                 {"seconds", ColumnType::Real},    {"status", ColumnType::Text}};

const std::vector<Column> kBandCurveColumns{{"segment", ColumnType::Integer},
                                            {"series", ColumnType::Text},
                                            {"value", ColumnType::Real}};

namespace {

std::string name(Algorithm a) { return std::string(to_string(a)); }

}  // namespace

Table pair_table(const PairStudyResult& result) {
  Table table(kPairColumns);
  const Index t = result.loss_diff.rows();
  for (Index i = 0; i < t; ++i)
    for (Index j = i + 1; j < t; ++j)
      table.add_row({std::int64_t{i}, std::int64_t{j}, result.losses[i], result.losses[j], result.loss_diff(i, j),
                     result.mad(i, j)});
  return table;
}

Table comparison_datasets_table(const AlgorithmComparison& result) {
  Table table(kComparisonDatasetColumns);
  for (const auto& cmp : result.datasets)
    for (const auto& run : cmp.runs)
      table.add_row({std::int64_t{cmp.dataset}, std::to_string(cmp.seed), name(run.algorithm), run.min_loss,
                     run.mean_iterations, run.total_seconds, std::int64_t{cmp.loss_winner == run.algorithm},
                     std::int64_t{cmp.time_winner == run.algorithm}});
  return table;
}

Table comparison_summary_table(const AlgorithmComparison& result) {
  Table table(kComparisonSummaryColumns);
  for (const auto& tally : result.summary)
    table.add_row({name(tally.algorithm), std::int64_t{tally.min_loss_wins}, std::int64_t{tally.min_time_wins},
                   tally.mean_loss_gap, tally.mean_seconds});
  return table;
}

Table rank_sweep_table(const RankSweepResult& result) {
  Table table(kRankSweepColumns);
  for (const auto& row : result.rows)
    table.add_row({row.tau, std::int64_t{row.rank}, name(row.algorithm), row.mean_loss, row.mean_iterations,
                   row.mean_seconds, std::int64_t{row.trials}});
  return table;
}

Table rank_sweep_trials_table(const RankSweepResult& result) {
  Table table(kRankSweepTrialColumns);
  for (const auto& rec : result.trials)
    table.add_row({std::int64_t{rec.trial}, rec.tau, std::int64_t{rec.rank}, name(rec.algorithm), rec.final_loss,
                   std::int64_t{rec.iterations}, std::int64_t{rec.function_evals}, rec.seconds,
                   std::string(to_string(rec.status))});
  return table;
}

Table band_curves_table(const BandCurves& curves) {
  Table table(kBandCurveColumns);
  const std::pair<const char*, const Vector*> series[] = {
      {"lower", &curves.lower}, {"center", &curves.center}, {"upper", &curves.upper}};
  for (const auto& [label, values] : series)
    for (Index i = 0; i < values->size(); ++i) table.add_row({std::int64_t{i}, std::string(label), (*values)(i)});
  return table;
}

}  // namespace lrexp
