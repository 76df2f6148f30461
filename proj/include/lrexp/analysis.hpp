#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrexp/fit.hpp"
#include "lrexp/simulate.hpp"
#include "lrexp/table.hpp"

namespace lrexp {

struct GroupedSeries {
  std::vector<double> values;
  std::vector<std::int64_t> group_ids;
};

// Between-group share of the total variance, Var(E[Y|G]) / Var(Y), with
// population variances (so group means are weighted by group size).
double icc(const GroupedSeries& data);

// Maps labels to dense ids in order of first appearance.
std::vector<std::int64_t> group_ids_from_labels(const std::vector<std::string>& labels);

struct PairStudyResult {
  Matrix loss_diff;  // |loss_i - loss_j|
  Matrix mad;        // mean |fit_i - fit_j| over observed cells
  std::vector<double> losses;

  // Upper-triangle entries, row by row.
  std::vector<double> pair_loss_diffs() const;
  std::vector<double> pair_mads() const;
};

// n_trials single-restart fits of `config` with seeds derive_seed(config.seed, t).
PairStudyResult init_resilience(const MaskedMatrix& x, const Vector& row_means, const Vector& col_means,
                                const FitConfig& config, int n_trials);

struct StudyOptions {
  OptimizeOptions opts;  // the algorithm field is overridden per run
  std::vector<Algorithm> algorithms{Algorithm::BFGS, Algorithm::LBFGS, Algorithm::CG};
  int threads = 1;
};

struct AlgorithmRun {
  Algorithm algorithm = Algorithm::LBFGS;
  double min_loss = 0.0;
  double total_seconds = 0.0;  // optimizer wall time summed over the initializations
  double mean_iterations = 0.0;
};

struct DatasetComparison {
  int dataset = 0;
  std::uint64_t seed = 0;
  std::vector<AlgorithmRun> runs;  // in StudyOptions::algorithms order
  Algorithm loss_winner = Algorithm::LBFGS;
  Algorithm time_winner = Algorithm::LBFGS;
  double loss_spread = 0.0;  // max - min of the runs' min_loss
};

struct AlgorithmTally {
  Algorithm algorithm = Algorithm::LBFGS;
  int min_loss_wins = 0;
  int min_time_wins = 0;
  double mean_loss_gap = 0.0;  // mean over datasets of min_loss - best min_loss
  double mean_seconds = 0.0;
};

struct AlgorithmComparison {
  std::vector<DatasetComparison> datasets;
  std::vector<AlgorithmTally> summary;
  double max_loss_spread = 0.0;
};

// Dataset d is generated with seed derive_seed(spec.seed, d); every algorithm
// starts from the same n_inits initial models of that dataset.
AlgorithmComparison compare_algorithms(const SimulationSpec& spec, int n_datasets, int n_inits, Tau tau, Index rank,
                                       const StudyOptions& study);

struct RankSweepTrial {
  int trial = 0;
  double tau = 0.5;
  Index rank = 1;
  Algorithm algorithm = Algorithm::LBFGS;
  double final_loss = 0.0;
  int iterations = 0;
  int function_evals = 0;
  double seconds = 0.0;
  OptimizeStatus status = OptimizeStatus::MaxIters;
};

struct RankSweepRow {
  double tau = 0.5;
  Index rank = 1;
  Algorithm algorithm = Algorithm::LBFGS;
  double mean_loss = 0.0;
  double mean_iterations = 0.0;
  double mean_seconds = 0.0;
  int trials = 0;
};

struct RankSweepResult {
  std::vector<RankSweepRow> rows;  // ordered by tau, rank, algorithm as given
  std::vector<RankSweepTrial> trials;
};

// Trial t fits dataset derive_seed(spec.seed, t) once per (tau, rank,
// algorithm), always from the same initialization for a given rank.
RankSweepResult rank_sweep(const SimulationSpec& spec, const std::vector<Tau>& taus, const std::vector<Index>& ranks,
                           int n_trials, const StudyOptions& study);

struct DenormalizedParams {
  Vector r;  // original scale
  Matrix u;  // original scale
  Vector c;  // normalized scale
  Matrix v;  // normalized scale
};

DenormalizedParams denormalize_params(const FactorModel& model, const NormalizationInfo& info);

double rmse_from_loss(double loss, double std);

struct BandCurves {
  Vector lower;
  Vector center;
  Vector upper;
  double v_std = 0.0;
};

// center = R std, upper/lower = center +/- v_std U std, v_std the population
// standard deviation of the single V column.
BandCurves band_curves(const FactorModel& model, const NormalizationInfo& info);

// Machine-readable forms of the study results.
Table pair_table(const PairStudyResult& result);
Table comparison_datasets_table(const AlgorithmComparison& result);
Table comparison_summary_table(const AlgorithmComparison& result);
Table rank_sweep_table(const RankSweepResult& result);
Table rank_sweep_trials_table(const RankSweepResult& result);
// Tidy (x, series, value) layout.
Table band_curves_table(const BandCurves& curves);

extern const std::vector<Column> kPairColumns;
extern const std::vector<Column> kComparisonDatasetColumns;
extern const std::vector<Column> kComparisonSummaryColumns;
extern const std::vector<Column> kRankSweepColumns;
extern const std::vector<Column> kRankSweepTrialColumns;
extern const std::vector<Column> kBandCurveColumns;

}  // namespace lrexp
