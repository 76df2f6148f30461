#include <gtest/gtest.h>

#include "lrexp/rng.hpp"
#include "lrexp/simulate.hpp"
#include "oracles.hpp"

using namespace lrexp;

TEST(Rng, StreamsDifferAndRepeat) {
  Xoshiro256 a(5, 1), b(5, 1), c(5, 2), d(6, 1);
  const auto a0 = a();
  EXPECT_EQ(a0, b());
  EXPECT_NE(a0, c());
  EXPECT_NE(a0, d());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(1, 3), derive_seed(1, 3));
}

TEST(Rng, UniformAndNormalMoments) {
  Xoshiro256 u(42, 7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);

  NormalSampler normal(Xoshiro256(42, 8));
  std::vector<double> z(n);
  for (double& v : z) v = normal();
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(oracle::population_std(z), 1.0, 0.01);
}

TEST(Simulate, DeterministicAndComponentwise) {
  SimulationSpec spec;
  spec.rows = 30;
  spec.cols = 20;
  spec.seed = 9;
  const SimulatedData a = generate(spec);
  const SimulatedData b = generate(spec);
  EXPECT_EQ(a.x.values(), b.x.values());
  EXPECT_EQ(a.x.mask(), b.x.mask());

  SimulationSpec noisier = spec;
  noisier.sigma = 1.0;
  const SimulatedData c = generate(noisier);
  EXPECT_EQ(a.true_r, c.true_r);
  EXPECT_EQ(a.true_u, c.true_u);
  EXPECT_EQ(a.x.mask(), c.x.mask());
  EXPECT_NE(a.x.values(), c.x.values());
}

TEST(Simulate, NoiselessFullyObserved) {
  SimulationSpec spec;
  spec.rows = 10;
  spec.cols = 12;
  spec.sigma = 0.0;
  spec.na_portion = 0.0;
  const SimulatedData d = generate(spec);
  EXPECT_EQ(d.x.observed_count(), 120);
  EXPECT_EQ(d.x.values(), d.mean_matrix());
}

TEST(Simulate, DefaultConfiguration) {
  SimulationSpec spec;
  spec.seed = 1;
  const SimulatedData d = generate(spec);
  const double missing = 1.0 - static_cast<double>(d.x.observed_count()) / (200.0 * 200.0);
  EXPECT_NEAR(missing, 0.30, 0.01);
  EXPECT_NEAR(normalized_noise_std(d), 0.143, 0.01);
  EXPECT_EQ(d.true_u.cols(), 2);
}

TEST(Simulate, Validation) {
  SimulationSpec spec;
  spec.na_portion = 1.0;
  EXPECT_THROW(generate(spec), Error);
  spec = SimulationSpec{};
  spec.true_rank = 0;
  EXPECT_THROW(generate(spec), Error);
  spec = SimulationSpec{};
  spec.sigma = -1.0;
  EXPECT_THROW(generate(spec), Error);
}
