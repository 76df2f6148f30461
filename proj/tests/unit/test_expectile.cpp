#include <gtest/gtest.h>

#include <random>

#include "lrexp/expectile.hpp"
#include "oracles.hpp"

using namespace lrexp;

TEST(Tau, RejectsBoundary) {
  EXPECT_THROW(Tau(0.0), Error);
  EXPECT_THROW(Tau(1.0), Error);
  EXPECT_THROW(Tau(std::nan("")), Error);
  EXPECT_EQ(Tau(0.25).value(), 0.25);
}

TEST(Expectile, WeightConvention) {
  const Tau t(0.2);
  EXPECT_EQ(weight(0.0, t), 0.2);
  EXPECT_EQ(weight(1.0, t), 0.2);
  EXPECT_EQ(weight(-1.0, t), 0.8);
  EXPECT_DOUBLE_EQ(asymmetric_square(-2.0, t), 0.8 * 4.0);
}

TEST(Expectile, HalfIsTheMean) {
  const std::vector<double> s{1, 2, 3, 4, 10};
  EXPECT_NEAR(scalar_expectile(s, Tau(0.5)), 4.0, 1e-12);
}

TEST(Expectile, ConstantSample) {
  const std::vector<double> s(5, 3.5);
  EXPECT_EQ(scalar_expectile(s, Tau(0.1)), 3.5);
  EXPECT_EQ(scalar_expectile(s, Tau(0.9)), 3.5);
}

TEST(Expectile, TwoPointClosedForm) {
  // For {0, 1}: tau (1 - mu) = (1 - tau) mu  =>  mu = tau.
  const std::vector<double> s{0.0, 1.0};
  for (double t : {0.1, 0.3, 0.7, 0.95}) EXPECT_NEAR(scalar_expectile(s, Tau(t)), t, 1e-9);
}

TEST(Expectile, MatchesBisectionOracleAndIsMonotone) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_int_distribution<int> size(1, 60);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(size(gen));
    for (double& v : s) v = normal(gen) + (trial % 3 == 0 ? std::exp(normal(gen)) : 0.0);
    double prev = -INFINITY;
    for (double t : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
      const double mu = scalar_expectile(s, Tau(t));
      EXPECT_NEAR(mu, oracle::expectile_grid_bisection(s, t), 1e-6);
      EXPECT_GE(mu, prev - 1e-12);
      prev = mu;
    }
  }
}

TEST(Expectile, Errors) {
  const std::vector<double> empty;
  EXPECT_THROW(scalar_expectile(empty, Tau(0.3)), Error);
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(scalar_expectile(bad, Tau(0.3)), Error);
  const std::vector<double> s{0.0, 1.0, 5.0};
  try {
    scalar_expectile(s, Tau(0.01), ExpectileOptions{1e-300, 2});
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
  }
}

TEST(Expectile, MarginalCurves) {
  Matrix v(2, 3);
  v << 1, 2, 3, 4, 5, 6;
  Mask m = Mask::Constant(2, 3, true);
  m(1, 2) = false;
  const auto taus = make_taus(std::vector<double>{0.2, 0.5});
  const Matrix c = marginal_expectile_curves(MaskedMatrix(v, m), taus);
  ASSERT_EQ(c.rows(), 2);
  ASSERT_EQ(c.cols(), 2);
  EXPECT_NEAR(c(0, 1), 2.0, 1e-12);
  EXPECT_NEAR(c(1, 1), 4.5, 1e-12);
  EXPECT_NEAR(c(0, 0), oracle::expectile_grid_bisection({1, 2, 3}, 0.2), 1e-8);

  Mask empty_row = Mask::Constant(2, 3, true);
  empty_row(1, 0) = empty_row(1, 1) = empty_row(1, 2) = false;
  try {
    marginal_expectile_curves(MaskedMatrix(v, empty_row), taus);
    FAIL() << "expected EmptyRow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRow);
  }
}
