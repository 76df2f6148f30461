#include "lrexp/simulate.hpp"

#include <cmath>

#include "lrexp/rng.hpp"

namespace lrexp {

namespace {

Matrix draw_normal(Index rows, Index cols, double sd, std::uint64_t seed, std::uint64_t stream) {
  NormalSampler normal(Xoshiro256(seed, stream));
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = sd * normal();
  return out;
}

}  // namespace

void SimulationSpec::validate() const {
  if (rows < 1 || cols < 1) fail(ErrorCode::InvalidArgument, "simulation dimensions must be positive");
  if (true_rank < 1) fail(ErrorCode::InvalidArgument, "true_rank must be at least 1");
  if (!(r_sd > 0.0 && c_sd > 0.0 && u_sd > 0.0 && v_sd > 0.0))
    fail(ErrorCode::InvalidArgument, "component standard deviations must be positive");
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be non-negative");
  if (!(na_portion >= 0.0 && na_portion < 1.0)) fail(ErrorCode::InvalidArgument, "na_portion must lie in [0, 1)");
}

Matrix SimulatedData::mean_matrix() const {
  Matrix mu = true_u * true_v.transpose();
  mu.colwise() += true_r;
  mu.rowwise() += true_c.transpose();
  return mu;
}

SimulatedData generate(const SimulationSpec& spec) {
  spec.validate();
  SimulatedData out;
  out.true_r = draw_normal(spec.rows, 1, spec.r_sd, spec.seed, streams::kRowEffects).col(0);
  out.true_c = draw_normal(spec.cols, 1, spec.c_sd, spec.seed, streams::kColEffects).col(0);
  out.true_u = draw_normal(spec.rows, spec.true_rank, spec.u_sd, spec.seed, streams::kRowFactors);
  out.true_v = draw_normal(spec.cols, spec.true_rank, spec.v_sd, spec.seed, streams::kColFactors);

  Matrix values = out.mean_matrix();
  if (spec.sigma > 0.0) values += draw_normal(spec.rows, spec.cols, spec.sigma, spec.seed, streams::kNoise);

  Xoshiro256 coin(spec.seed, streams::kMissing);
  Mask mask(spec.rows, spec.cols);
  for (Index i = 0; i < spec.rows; ++i)
    for (Index j = 0; j < spec.cols; ++j) mask(i, j) = !(coin.uniform() < spec.na_portion);

  out.x = MaskedMatrix(std::move(values), std::move(mask));
  return out;
}

double normalized_noise_std(const SimulatedData& data) {
  const GlobalStats stats = global_stats(data.x);
  const Matrix mu = data.mean_matrix();
  const MaskedMatrix noise = data.x.with_values((data.x.values() - mu) / stats.std);
  // Population spread of the scaled noise over observed cells.
  const double n = static_cast<double>(noise.observed_count());
  double sum = 0.0;
  for (double e : noise.observed_values()) sum += e;
  const double mean = sum / n;
  double ss = 0.0;
  for (double e : noise.observed_values()) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / n);
}

}  // namespace lrexp
