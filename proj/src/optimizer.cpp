#include "lrexp/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

namespace lrexp {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::BFGS: return "bfgs";
    case Algorithm::LBFGS: return "lbfgs";
    case Algorithm::CG: return "cg";
  }
  return "unknown";
}

std::string_view to_string(OptimizeStatus s) noexcept {
  switch (s) {
    case OptimizeStatus::GradToleranceMet: return "grad_tolerance_met";
    case OptimizeStatus::MaxIters: return "max_iters";
    case OptimizeStatus::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower;
  for (char ch : name)
    if (ch != '-' && ch != '_') lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "bfgs") return Algorithm::BFGS;
  if (lower == "lbfgs") return Algorithm::LBFGS;
  if (lower == "cg") return Algorithm::CG;
  fail(ErrorCode::InvalidArgument, "unknown algorithm '" + std::string(name) + "' (expected bfgs, lbfgs or cg)");
}

void OptimizeOptions::validate() const {
  const double c2v = curvature();
  if (!(c1 > 0.0 && c1 < c2v && c2v < 1.0))
    fail(ErrorCode::InvalidArgument, "Wolfe parameters must satisfy 0 < c1 < c2 < 1");
  if (max_iters < 1) fail(ErrorCode::InvalidArgument, "max_iters must be at least 1");
  if (!(grad_tol >= 0.0)) fail(ErrorCode::InvalidArgument, "grad_tol must be non-negative");
  if (lbfgs_memory < 1) fail(ErrorCode::InvalidArgument, "lbfgs_memory must be at least 1");
  if (max_line_search_evals < 1) fail(ErrorCode::InvalidArgument, "max_line_search_evals must be at least 1");
}

bool satisfies_strong_wolfe(const StepRecord& step, double c1, double c2) noexcept {
  const bool decrease = step.loss <= step.prev_loss + step.step * (c1 * step.initial_slope);
  const bool curvature = std::abs(step.final_slope) <= c2 * (-step.initial_slope);
  return decrease && curvature;
}

namespace {

double inf_norm(const Vector& g) { return g.size() == 0 ? 0.0 : g.lpNorm<Eigen::Infinity>(); }

// Ring buffer of the most recent (s, y) pairs for the two-loop recursion.
class LbfgsMemory {
 public:
  LbfgsMemory(int capacity, Index dim) : s_(capacity, Vector(dim)), y_(capacity, Vector(dim)), rho_(capacity) {}

  void clear() { size_ = 0; }

  void push(const Vector& s, const Vector& y, double sy) {
    const int slot = (head_ + size_) % capacity();
    if (size_ < capacity()) {
      ++size_;
    } else {
      head_ = (head_ + 1) % capacity();
    }
    s_[slot] = s;
    y_[slot] = y;
    rho_[slot] = 1.0 / sy;
  }

  void direction(const Vector& g, bool scale, Vector& d, std::vector<double>& alpha) const {
    d = g;
    alpha.assign(static_cast<std::size_t>(capacity()), 0.0);
    for (int i = size_ - 1; i >= 0; --i) {
      const int slot = (head_ + i) % capacity();
      const double a = rho_[slot] * s_[slot].dot(d);
      alpha[slot] = a;
      d -= a * y_[slot];
    }
    if (scale && size_ > 0) {
      const int newest = (head_ + size_ - 1) % capacity();
      d *= (s_[newest].dot(y_[newest])) / y_[newest].squaredNorm();
    }
    for (int i = 0; i < size_; ++i) {
      const int slot = (head_ + i) % capacity();
      const double b = rho_[slot] * y_[slot].dot(d);
      d += (alpha[slot] - b) * s_[slot];
    }
    d = -d;
  }

 private:
  int capacity() const { return static_cast<int>(rho_.size()); }

  std::vector<Vector> s_, y_;
  std::vector<double> rho_;
  int head_ = 0;
  int size_ = 0;
};

// Dense inverse-Hessian approximation.
class BfgsInverse {
 public:
  explicit BfgsInverse(Index dim) : h_(Matrix::Identity(dim, dim)), hy_(dim) {}

  void reset() {
    h_.setIdentity();
    updated_ = false;
  }

  void update(const Vector& s, const Vector& y, double sy, bool scale) {
    if (!updated_ && scale) h_ = Matrix::Identity(h_.rows(), h_.cols()) * (sy / y.squaredNorm());
    updated_ = true;
    const double rho = 1.0 / sy;
    hy_.noalias() = h_ * y;
    const double a = rho * (1.0 + rho * y.dot(hy_));
    // H <- H - rho (Hy s' + s y'H) + a s s'
    for (Index j = 0; j < h_.cols(); ++j) {
      h_.col(j) += (a * s(j) - rho * hy_(j)) * s - (rho * s(j)) * hy_;
    }
  }

  void direction(const Vector& g, Vector& d) const { d.noalias() = -(h_ * g); }

 private:
  Matrix h_;
  Vector hy_;
  bool updated_ = false;
};

void check_finite(double f, const Vector& g) {
  if (!std::isfinite(f)) fail(ErrorCode::NonFiniteObjective, "objective returned a non-finite value");
  if (!g.allFinite()) fail(ErrorCode::NonFiniteObjective, "objective returned a non-finite gradient");
}

}  // namespace

OptimizeResult minimize(const Objective& objective, const Vector& x0, const OptimizeOptions& opts,
                        const StepObserver& observer) {
  opts.validate();
  const auto started = std::chrono::steady_clock::now();
  const Index dim = x0.size();

  OptimizeResult result;
  Vector x = x0;
  Vector g(dim);
  double f = objective(x, g);
  if (g.size() != dim) fail(ErrorCode::LengthMismatch, "gradient length differs from the parameter length");
  check_finite(f, g);
  result.function_evals = 1;
  result.initial_loss = f;

  detail::LineSearchOptions ls;
  ls.c1 = opts.c1;
  ls.c2 = opts.curvature();
  ls.max_evals = opts.max_line_search_evals;

  std::optional<LbfgsMemory> memory;
  std::optional<BfgsInverse> inverse;
  if (opts.algorithm == Algorithm::LBFGS) memory.emplace(opts.lbfgs_memory, dim);
  if (opts.algorithm == Algorithm::BFGS) inverse.emplace(dim);

  Vector d(dim), x_trial(dim), g_trial(dim), g_prev(dim), d_prev(dim), s(dim), y(dim);
  Vector x_best, g_best;
  std::vector<double> alpha;
  // Pretend the previous step decreased f by |g|/2, which sets the first trial step to ~1/|g|.
  double f_prev = f + g.norm() / 2.0;
  bool have_history = false;

  auto reset_history = [&] {
    if (memory) memory->clear();
    if (inverse) inverse->reset();
    have_history = false;
  };

  result.status = OptimizeStatus::MaxIters;
  if (inf_norm(g) <= opts.grad_tol) {
    result.status = OptimizeStatus::GradToleranceMet;
  } else {
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      bool steepest = !have_history;
      if (steepest) {
        d = -g;
      } else if (memory) {
        memory->direction(g, opts.scale_initial_hessian, d, alpha);
      } else if (inverse) {
        inverse->direction(g, d);
      } else {
        // Polak-Ribiere with beta clipped at zero.
        const double beta = std::max(0.0, g.dot(g - g_prev) / g_prev.squaredNorm());
        d = -g + beta * d_prev;
      }

      detail::LineSearchResult search;
      double slope = 0.0;
      double f_best = f;
      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        slope = g.dot(d);
        if (!(slope < 0.0)) {
          reset_history();
          steepest = true;
          d = -g;
          slope = -g.squaredNorm();
        }
        double step0 = 1.0;
        if (opts.algorithm == Algorithm::CG || steepest) {
          step0 = std::min(1.0, 1.01 * 2.0 * (f - f_prev) / slope);
          if (!(step0 > 0.0) || !std::isfinite(step0)) step0 = 1.0;
        }

        auto phi = [&](double step) {
          x_trial = x + step * d;
          const double value = objective(x_trial, g_trial);
          ++result.function_evals;
          check_finite(value, g_trial);
          if (value < f_best) {
            f_best = value;
            x_best = x_trial;
            g_best = g_trial;
          }
          return std::pair{value, g_trial.dot(d)};
        };
        search = detail::more_thuente(phi, f, slope, step0, ls);
        accepted = search.status == detail::LineSearchStatus::Converged;
        if (!accepted && !steepest) {
          // Quasi-Newton / conjugate direction failed: retry once along -g.
          reset_history();
          steepest = true;
          d = -g;
        } else if (!accepted) {
          break;
        }
      }

      if (!accepted) {
        if (f_best < f) {
          x = x_best;
          g = g_best;
          f = f_best;
        }
        result.status = OptimizeStatus::LineSearchFailure;
        break;
      }

      // The accepted step is the last point evaluated.
      s = x_trial - x;
      y = g_trial - g;
      const double sy = s.dot(y);
      if (memory) {
        if (sy > 1e-16 * y.squaredNorm()) memory->push(s, y, sy);
      } else if (inverse) {
        if (sy > 0.0) inverse->update(s, y, sy, opts.scale_initial_hessian);
      } else {
        g_prev = g;
        d_prev = d;
      }
      have_history = true;

      const double f_old = f;
      f_prev = f;
      f = search.value;
      x.swap(x_trial);
      g.swap(g_trial);
      ++result.iterations;

      StepRecord record{result.iterations, search.step, f_old, f, slope, search.slope, &x, &d};
      assert(satisfies_strong_wolfe(record, opts.c1, opts.curvature()));
      if (observer) observer(record);

      if (inf_norm(g) <= opts.grad_tol) {
        result.status = OptimizeStatus::GradToleranceMet;
        break;
      }
    }
  }

  result.x_final = std::move(x);
  result.final_loss = f;
  result.grad_inf_norm = inf_norm(g);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x, double step) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  Vector grad(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    probe(i) = xi + step;
    const double plus = f(probe);
    probe(i) = xi - step;
    const double minus = f(probe);
    probe(i) = xi;
    if (!std::isfinite(plus) || !std::isfinite(minus))
      fail(ErrorCode::NonFiniteObjective, "objective is not finite near coordinate " + std::to_string(i));
    grad(i) = (plus - minus) / (2.0 * step);
  }
  return grad;
}

}  // namespace lrexp
