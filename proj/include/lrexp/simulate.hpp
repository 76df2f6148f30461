#pragma once

#include <cstdint>

#include "lrexp/masked_matrix.hpp"

namespace lrexp {

struct SimulationSpec {
  Index rows = 200;
  Index cols = 200;
  double r_sd = 1.0;
  double c_sd = 1.0;
  double u_sd = 1.0;
  double v_sd = 1.0;
  double sigma = 0.3;
  double na_portion = 0.3;
  Index true_rank = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedData {
  MaskedMatrix x;
  Vector true_r;
  Vector true_c;
  Matrix true_u;  // rows x true_rank
  Matrix true_v;  // cols x true_rank

  // true_r 1' + 1 true_c' + true_u true_v'
  Matrix mean_matrix() const;
};

// Draws every component from its own xoshiro256** stream (see rng.hpp), fills
// matrices row-major, and marks each cell missing independently with
// probability na_portion.
SimulatedData generate(const SimulationSpec& spec);

// Standard deviation of the true noise at observed cells after the global
// normalization of `data.x`: std((X - mu_X) / std(X)). Half its square is the
// loss a correctly specified tau = 0.5 fit should approach.
double normalized_noise_std(const SimulatedData& data);

}  // namespace lrexp
