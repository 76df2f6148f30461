// More-Thuente line search (MINPACK-2 dcsrch / dcstep), producing steps that
// satisfy the strong Wolfe conditions.

#include <algorithm>
#include <cmath>

#include "lrexp/optimizer.hpp"

namespace lrexp::detail {

namespace {

constexpr double kExtrapLower = 1.1;
constexpr double kExtrapUpper = 4.0;

double cubic_gamma(double theta, double da, double db, double s) {
  const double t = theta / s;
  return s * std::sqrt(std::max(0.0, t * t - (da / s) * (db / s)));
}

// Safeguarded step of the interval [stx, sty] given a trial stp. Updates the
// interval endpoints in place and returns the next trial step.
struct Interval {
  double stx, fx, dx;
  double sty, fy, dy;
  bool bracketed;
};

double safeguarded_step(Interval& iv, double stp, double fp, double dp, double stpmin, double stpmax) {
  const double sgnd = dp * (iv.dx / std::abs(iv.dx));
  double stpf;

  if (fp > iv.fx) {
    // Higher function value: the minimum is bracketed.
    const double theta = 3.0 * (iv.fx - fp) / (stp - iv.stx) + iv.dx + dp;
    const double s = std::max({std::abs(theta), std::abs(iv.dx), std::abs(dp)});
    double gamma = cubic_gamma(theta, iv.dx, dp, s);
    if (stp < iv.stx) gamma = -gamma;
    const double p = (gamma - iv.dx) + theta;
    const double q = ((gamma - iv.dx) + gamma) + dp;
    const double stpc = iv.stx + (p / q) * (stp - iv.stx);
    const double stpq = iv.stx + ((iv.dx / ((iv.fx - fp) / (stp - iv.stx) + iv.dx)) / 2.0) * (stp - iv.stx);
    stpf = std::abs(stpc - iv.stx) < std::abs(stpq - iv.stx) ? stpc : stpc + (stpq - stpc) / 2.0;
    iv.bracketed = true;
  } else if (sgnd < 0.0) {
    // Derivatives of opposite sign: bracketed.
    const double theta = 3.0 * (iv.fx - fp) / (stp - iv.stx) + iv.dx + dp;
    const double s = std::max({std::abs(theta), std::abs(iv.dx), std::abs(dp)});
    double gamma = cubic_gamma(theta, iv.dx, dp, s);
    if (stp > iv.stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = ((gamma - dp) + gamma) + iv.dx;
    const double stpc = stp + (p / q) * (iv.stx - stp);
    const double stpq = stp + (dp / (dp - iv.dx)) * (iv.stx - stp);
    stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
    iv.bracketed = true;
  } else if (std::abs(dp) < std::abs(iv.dx)) {
    // Same sign, derivative magnitude decreasing.
    const double theta = 3.0 * (iv.fx - fp) / (stp - iv.stx) + iv.dx + dp;
    const double s = std::max({std::abs(theta), std::abs(iv.dx), std::abs(dp)});
    double gamma = cubic_gamma(theta, iv.dx, dp, s);
    if (stp > iv.stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = (gamma + (iv.dx - dp)) + gamma;
    const double r = p / q;
    double stpc;
    if (r < 0.0 && gamma != 0.0) {
      stpc = stp + r * (iv.stx - stp);
    } else {
      stpc = stp > iv.stx ? stpmax : stpmin;
    }
    const double stpq = stp + (dp / (dp - iv.dx)) * (iv.stx - stp);
    if (iv.bracketed) {
      stpf = std::abs(stpc - stp) < std::abs(stpq - stp) ? stpc : stpq;
      if (stp > iv.stx) {
        stpf = std::min(stp + 0.66 * (iv.sty - stp), stpf);
      } else {
        stpf = std::max(stp + 0.66 * (iv.sty - stp), stpf);
      }
    } else {
      stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
      stpf = std::clamp(stpf, stpmin, stpmax);
    }
  } else {
    // Same sign, derivative magnitude not decreasing.
    if (iv.bracketed) {
      const double theta = 3.0 * (fp - iv.fy) / (iv.sty - stp) + iv.dy + dp;
      const double s = std::max({std::abs(theta), std::abs(iv.dy), std::abs(dp)});
      double gamma = cubic_gamma(theta, iv.dy, dp, s);
      if (stp > iv.sty) gamma = -gamma;
      const double p = (gamma - dp) + theta;
      const double q = ((gamma - dp) + gamma) + iv.dy;
      stpf = stp + (p / q) * (iv.sty - stp);
    } else {
      stpf = stp > iv.stx ? stpmax : stpmin;
    }
  }

  if (fp > iv.fx) {
    iv.sty = stp;
    iv.fy = fp;
    iv.dy = dp;
  } else {
    if (sgnd < 0.0) {
      iv.sty = iv.stx;
      iv.fy = iv.fx;
      iv.dy = iv.dx;
    }
    iv.stx = stp;
    iv.fx = fp;
    iv.dx = dp;
  }
  return stpf;
}

}  // namespace

LineSearchResult more_thuente(const LineFunction& phi, double value0, double slope0, double initial_step,
                              const LineSearchOptions& opts) {
  if (!(slope0 < 0.0)) fail(ErrorCode::InvalidArgument, "line search direction is not a descent direction");

  double stp = std::clamp(initial_step, opts.min_step, opts.max_step);
  const double gtest = opts.c1 * slope0;
  double width = opts.max_step - opts.min_step;
  double width1 = 2.0 * width;
  int stage = 1;

  Interval iv{0.0, value0, slope0, 0.0, value0, slope0, false};
  double stmin = 0.0;
  double stmax = stp + kExtrapUpper * stp;

  LineSearchResult out;
  for (out.evals = 1;; ++out.evals) {
    const auto [f, g] = phi(stp);
    out.step = stp;
    out.value = f;
    out.slope = g;

    const double ftest = value0 + stp * gtest;
    if (stage == 1 && f <= ftest && g >= 0.0) stage = 2;

    if (f <= ftest && std::abs(g) <= opts.c2 * (-slope0)) {
      out.status = LineSearchStatus::Converged;
      return out;
    }
    if (iv.bracketed && (stp <= stmin || stp >= stmax)) {
      out.status = LineSearchStatus::RoundingLimit;
      return out;
    }
    if (iv.bracketed && stmax - stmin <= opts.xtol * stmax) {
      out.status = LineSearchStatus::IntervalTooSmall;
      return out;
    }
    if (stp == opts.max_step && f <= ftest && g <= gtest) {
      out.status = LineSearchStatus::AtMaxStep;
      return out;
    }
    if (stp == opts.min_step && (f > ftest || g >= gtest)) {
      out.status = LineSearchStatus::AtMinStep;
      return out;
    }
    if (out.evals >= opts.max_evals) {
      out.status = LineSearchStatus::TooManyEvals;
      return out;
    }

    if (stage == 1 && f <= iv.fx && f > ftest) {
      // Work on the auxiliary function psi(a) = phi(a) - phi(0) - c1 a phi'(0)
      // until a step with sufficient decrease and non-negative slope is found.
      Interval mod{iv.stx, iv.fx - iv.stx * gtest, iv.dx - gtest,
                   iv.sty, iv.fy - iv.sty * gtest, iv.dy - gtest, iv.bracketed};
      stp = safeguarded_step(mod, stp, f - stp * gtest, g - gtest, stmin, stmax);
      iv = {mod.stx, mod.fx + mod.stx * gtest, mod.dx + gtest,
            mod.sty, mod.fy + mod.sty * gtest, mod.dy + gtest, mod.bracketed};
    } else {
      stp = safeguarded_step(iv, stp, f, g, stmin, stmax);
    }

    if (iv.bracketed) {
      if (std::abs(iv.sty - iv.stx) >= 0.66 * width1) stp = iv.stx + 0.5 * (iv.sty - iv.stx);
      width1 = width;
      width = std::abs(iv.sty - iv.stx);
      stmin = std::min(iv.stx, iv.sty);
      stmax = std::max(iv.stx, iv.sty);
    } else {
      stmin = stp + kExtrapLower * (stp - iv.stx);
      stmax = stp + kExtrapUpper * (stp - iv.stx);
    }

    stp = std::clamp(stp, opts.min_step, opts.max_step);
    if ((iv.bracketed && (stp <= stmin || stp >= stmax)) ||
        (iv.bracketed && stmax - stmin <= opts.xtol * stmax)) {
      stp = iv.stx;
    }
  }
}

}  // namespace lrexp::detail
