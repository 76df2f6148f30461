#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "lrexp/masked_matrix.hpp"

namespace lrexp {

enum class Algorithm { BFGS, LBFGS, CG };
enum class OptimizeStatus { GradToleranceMet, MaxIters, LineSearchFailure };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(OptimizeStatus s) noexcept;
// Accepts "bfgs", "lbfgs"/"l-bfgs", "cg" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

struct OptimizeOptions {
  Algorithm algorithm = Algorithm::LBFGS;
  double grad_tol = 1e-6;  // on the infinity norm of the gradient
  int max_iters = 500;
  int lbfgs_memory = 10;
  double c1 = 1e-4;
  std::optional<double> c2;  // 0.9 for the quasi-Newton methods, 0.4 for CG when unset
  // Scale the initial inverse Hessian by s'y / y'y (every iteration for L-BFGS,
  // once before the first update for BFGS). With it off both start from I.
  bool scale_initial_hessian = true;
  int max_line_search_evals = 40;

  double curvature() const noexcept { return c2.value_or(algorithm == Algorithm::CG ? 0.4 : 0.9); }
  void validate() const;
};

// Returns the loss at x and writes the gradient into `grad`.
using Objective = std::function<double(const Vector& x, Vector& grad)>;
using ScalarFunction = std::function<double(const Vector& x)>;

struct OptimizeResult {
  Vector x_final;
  double final_loss = 0.0;
  double initial_loss = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  int function_evals = 0;
  double elapsed_seconds = 0.0;
  OptimizeStatus status = OptimizeStatus::MaxIters;
};

// One accepted step: x_new = x_prev + step * direction.
struct StepRecord {
  int iteration = 0;
  double step = 0.0;
  double prev_loss = 0.0;
  double loss = 0.0;
  double initial_slope = 0.0;  // grad(x_prev) . direction
  double final_slope = 0.0;    // grad(x_new) . direction
  const Vector* x = nullptr;
  const Vector* direction = nullptr;
};

using StepObserver = std::function<void(const StepRecord&)>;

// Strong Wolfe conditions for an accepted step.
bool satisfies_strong_wolfe(const StepRecord& step, double c1, double c2) noexcept;

OptimizeResult minimize(const Objective& objective, const Vector& x0, const OptimizeOptions& opts,
                        const StepObserver& observer = {});

// Central differences, one coordinate at a time.
Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x, double step);

namespace detail {

enum class LineSearchStatus { Converged, RoundingLimit, IntervalTooSmall, AtMaxStep, AtMinStep, TooManyEvals };

struct LineSearchResult {
  LineSearchStatus status = LineSearchStatus::Converged;
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  int evals = 0;
};

struct LineSearchOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  double xtol = 1e-14;
  double min_step = 1e-20;
  double max_step = 1e10;
  int max_evals = 40;
};

// phi(step) returns (value, slope) along the search direction.
using LineFunction = std::function<std::pair<double, double>(double)>;

// More-Thuente search for a step meeting the strong Wolfe conditions, given
// phi(0) = value0 and phi'(0) = slope0 < 0.
LineSearchResult more_thuente(const LineFunction& phi, double value0, double slope0, double initial_step,
                              const LineSearchOptions& opts);

}  // namespace detail

}  // namespace lrexp
