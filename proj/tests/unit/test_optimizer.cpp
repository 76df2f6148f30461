#include <gtest/gtest.h>

#include <random>

#include "lrexp/optimizer.hpp"

using namespace lrexp;

namespace {

Objective shifted_quadratic(const Vector& c) {
  return [c](const Vector& x, Vector& g) {
    g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
}

Objective spd_quadratic(const Matrix& a, const Vector& b) {
  return [a, b](const Vector& x, Vector& g) {
    g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
}

double rosenbrock(const Vector& x, Vector& g) {
  const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
  g.resize(2);
  g(0) = -2.0 * a - 400.0 * x(0) * b;
  g(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

Matrix random_spd(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = normal(gen);
  return m * m.transpose() + Matrix::Identity(n, n);
}

OptimizeOptions with(Algorithm a) {
  OptimizeOptions o;
  o.algorithm = a;
  return o;
}

}  // namespace

TEST(Optimizer, ParseAlgorithm) {
  EXPECT_EQ(parse_algorithm("L-BFGS"), Algorithm::LBFGS);
  EXPECT_EQ(parse_algorithm("bfgs"), Algorithm::BFGS);
  EXPECT_EQ(parse_algorithm("CG"), Algorithm::CG);
  EXPECT_THROW(parse_algorithm("newton"), Error);
}

TEST(Optimizer, OptionValidation) {
  OptimizeOptions o;
  o.c1 = 0.95;
  EXPECT_THROW(o.validate(), Error);
  o = OptimizeOptions{};
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), Error);
  EXPECT_DOUBLE_EQ(with(Algorithm::CG).curvature(), 0.4);
  EXPECT_DOUBLE_EQ(with(Algorithm::BFGS).curvature(), 0.9);
}

TEST(Optimizer, QuadraticTermination) {
  const Index dim = 8;
  Vector c = Vector::LinSpaced(dim, -3.0, 4.0);
  for (Algorithm a : {Algorithm::BFGS, Algorithm::LBFGS}) {
    const OptimizeResult r = minimize(shifted_quadratic(c), Vector::Zero(dim), with(a));
    EXPECT_EQ(r.status, OptimizeStatus::GradToleranceMet) << to_string(a);
    EXPECT_LE(r.iterations, dim + 5);
    EXPECT_LE(r.grad_inf_norm, 1e-6);
    EXPECT_LE((r.x_final - c).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(Optimizer, IllConditionedQuadratic) {
  const Matrix a = random_spd(10, 1);
  const Vector b = Vector::Ones(10);
  const Vector solution = a.ldlt().solve(b);
  for (Algorithm alg : {Algorithm::BFGS, Algorithm::LBFGS, Algorithm::CG}) {
    const OptimizeResult r = minimize(spd_quadratic(a, b), Vector::Zero(10), with(alg));
    EXPECT_EQ(r.status, OptimizeStatus::GradToleranceMet) << to_string(alg);
    EXPECT_LE((r.x_final - solution).lpNorm<Eigen::Infinity>(), 1e-5) << to_string(alg);
  }
}

TEST(Optimizer, Rosenbrock) {
  Vector x0(2);
  x0 << -1.2, 1.0;
  for (Algorithm a : {Algorithm::BFGS, Algorithm::LBFGS, Algorithm::CG}) {
    OptimizeOptions o = with(a);
    o.grad_tol = 1e-9;
    o.max_iters = 5000;
    const OptimizeResult r = minimize(rosenbrock, x0, o);
    EXPECT_NEAR(r.x_final(0), 1.0, 1e-5) << to_string(a);
    EXPECT_NEAR(r.x_final(1), 1.0, 1e-5) << to_string(a);
    EXPECT_LT(r.final_loss, 1e-10) << to_string(a);
  }
}

TEST(Optimizer, AcceptedStepsAreStrongWolfeAndMonotone) {
  Vector x0(2);
  x0 << -1.2, 1.0;
  for (Algorithm a : {Algorithm::BFGS, Algorithm::LBFGS, Algorithm::CG}) {
    const OptimizeOptions o = with(a);
    int steps = 0;
    double last = INFINITY;
    const OptimizeResult r = minimize(rosenbrock, x0, o, [&](const StepRecord& s) {
      ++steps;
      EXPECT_TRUE(satisfies_strong_wolfe(s, o.c1, o.curvature())) << to_string(a) << " step " << s.iteration;
      EXPECT_LE(s.loss, s.prev_loss);
      EXPECT_LE(s.loss, last);
      last = s.loss;
    });
    EXPECT_EQ(steps, r.iterations);
    EXPECT_LE(r.final_loss, r.initial_loss);
  }
}

TEST(Optimizer, FullMemoryLbfgsMatchesBfgsDirections) {
  const Index dim = 6;
  const Matrix a = random_spd(dim, 2);
  const Vector b = Vector::LinSpaced(dim, 1.0, 2.0);
  auto directions = [&](Algorithm alg) {
    OptimizeOptions o = with(alg);
    o.lbfgs_memory = 20;
    o.scale_initial_hessian = false;
    o.grad_tol = 1e-10;
    std::vector<Vector> out;
    minimize(spd_quadratic(a, b), Vector::Zero(dim), o, [&](const StepRecord& s) { out.push_back(*s.direction); });
    return out;
  };
  const auto bfgs = directions(Algorithm::BFGS);
  const auto lbfgs = directions(Algorithm::LBFGS);
  ASSERT_FALSE(bfgs.empty());
  ASSERT_EQ(bfgs.size(), lbfgs.size());
  for (std::size_t i = 0; i < bfgs.size(); ++i)
    EXPECT_LE((bfgs[i] - lbfgs[i]).norm(), 1e-8 * (1.0 + bfgs[i].norm())) << "iteration " << i;
}

TEST(Optimizer, Deterministic) {
  Vector x0(2);
  x0 << -1.2, 1.0;
  for (Algorithm a : {Algorithm::BFGS, Algorithm::LBFGS, Algorithm::CG}) {
    std::vector<Vector> first, second;
    const OptimizeResult r1 =
        minimize(rosenbrock, x0, with(a), [&](const StepRecord& s) { first.push_back(*s.x); });
    const OptimizeResult r2 =
        minimize(rosenbrock, x0, with(a), [&](const StepRecord& s) { second.push_back(*s.x); });
    EXPECT_EQ(first, second);
    EXPECT_EQ(r1.x_final, r2.x_final);
    EXPECT_EQ(r1.function_evals, r2.function_evals);
  }
}

TEST(Optimizer, NonFiniteObjective) {
  auto bad = [](const Vector& x, Vector& g) {
    g = Vector::Ones(x.size());
    return x(0) < 0.5 ? std::nan("") : x(0);
  };
  try {
    minimize(bad, Vector::Zero(1), OptimizeOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteObjective);
  }
}

TEST(Optimizer, LineSearchFailureReturnsBestPoint) {
  // The reported gradient points the wrong way, so no step along -g decreases f.
  auto wrong = [](const Vector& x, Vector& g) {
    g = -2.0 * x;
    return x.squaredNorm();
  };
  Vector x0(2);
  x0 << 1.0, -2.0;
  const OptimizeResult r = minimize(wrong, x0, OptimizeOptions{});
  EXPECT_EQ(r.status, OptimizeStatus::LineSearchFailure);
  EXPECT_LE(r.final_loss, x0.squaredNorm());
}

TEST(Optimizer, MaxItersStatus) {
  Vector x0(2);
  x0 << -1.2, 1.0;
  OptimizeOptions o;
  o.max_iters = 3;
  const OptimizeResult r = minimize(rosenbrock, x0, o);
  EXPECT_EQ(r.status, OptimizeStatus::MaxIters);
  EXPECT_EQ(r.iterations, 3);
}

TEST(Optimizer, AlreadyOptimal) {
  const OptimizeResult r = minimize(shifted_quadratic(Vector::Ones(3)), Vector::Ones(3), OptimizeOptions{});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.status, OptimizeStatus::GradToleranceMet);
}

TEST(FiniteDifference, Basics) {
  const Vector g = finite_difference_gradient([](const Vector& x) { return x(0) * x(0); }, Vector::Constant(1, 3.0),
                                              1e-6);
  EXPECT_NEAR(g(0), 6.0, 1e-6);
  const Vector z = finite_difference_gradient([](const Vector&) { return 4.0; }, Vector::Ones(4), 1e-6);
  EXPECT_EQ(z, Vector::Zero(4));
  EXPECT_THROW(finite_difference_gradient([](const Vector&) { return 0.0; }, Vector::Ones(1), 0.0), Error);
}

TEST(LineSearch, ConvergesOnQuadratic) {
  // phi(t) = (t - 2)^2, phi(0) = 4, phi'(0) = -4.
  const auto phi = [](double t) { return std::pair{(t - 2.0) * (t - 2.0), 2.0 * (t - 2.0)}; };
  detail::LineSearchOptions o;
  const auto r = detail::more_thuente(phi, 4.0, -4.0, 1.0, o);
  EXPECT_EQ(r.status, detail::LineSearchStatus::Converged);
  EXPECT_LE(r.value, 4.0 + o.c1 * r.step * -4.0);
  EXPECT_LE(std::abs(r.slope), o.c2 * 4.0);
}
