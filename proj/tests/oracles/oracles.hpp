#pragma once

// Reference computations written independently of the library code paths:
// plain loops, bisection, two-pass statistics and sorting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

// Masked expectile loss over explicit loops. x is n x p row-major, fitted the same.
inline double expectile_loss(const std::vector<double>& x, const std::vector<bool>& mask,
                             const std::vector<double>& fitted, double tau) {
  double total = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!mask[i]) continue;
    const double e = x[i] - fitted[i];
    total += (e >= 0 ? tau : 1.0 - tau) * e * e;
    ++count;
  }
  return total / count;
}

// Central differences with an explicit step.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// First-order condition of the expectile; decreasing in mu.
inline double expectile_condition(const std::vector<double>& s, double tau, double mu) {
  double above = 0.0, below = 0.0;
  for (double v : s) {
    if (v >= mu)
      above += v - mu;
    else
      below += mu - v;
  }
  return tau * above - (1.0 - tau) * below;
}

// Coarse grid to bracket the sign change, then bisection.
inline double expectile_grid_bisection(const std::vector<double>& s, double tau) {
  const double lo0 = *std::min_element(s.begin(), s.end());
  const double hi0 = *std::max_element(s.begin(), s.end());
  if (lo0 == hi0) return lo0;
  const int grid = 200;
  double lo = lo0, hi = hi0;
  for (int g = 1; g <= grid; ++g) {
    const double mu = lo0 + (hi0 - lo0) * g / grid;
    if (expectile_condition(s, tau, mu) <= 0.0) {
      hi = mu;
      lo = lo0 + (hi0 - lo0) * (g - 1) / grid;
      break;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expectile_condition(s, tau, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Var(E[Y|G]) / Var(Y) by two explicit passes.
inline double icc_two_pass(const std::vector<double>& y, const std::vector<std::int64_t>& g) {
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  std::map<std::int64_t, std::pair<double, int>> groups;
  for (std::size_t i = 0; i < y.size(); ++i) {
    groups[g[i]].first += y[i];
    groups[g[i]].second += 1;
  }
  double total = 0.0, between = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& [sum, count] = groups[g[i]];
    const double cond = sum / count;
    between += (cond - mean) * (cond - mean);
    total += (y[i] - mean) * (y[i] - mean);
  }
  return between / total;
}

inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

inline double population_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace oracle
