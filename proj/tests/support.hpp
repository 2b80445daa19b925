#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace fpnet::testing {

/// Brute-force prox: argmin_x 0.5 (x - d)^2 + f(x) by a coarse scan over
/// [-|d| - 10, |d| + 10] followed by two refinement passes around the best
/// coarse point. Independent of every closed form in the library.
inline double grid_prox(const std::function<double(double)>& f, double d) {
  const double lo = -std::abs(d) - 10.0;
  const double hi = std::abs(d) + 10.0;
  auto obj = [&](double x) { return 0.5 * (x - d) * (x - d) + f(x); };
  double best = lo;
  double best_val = std::numeric_limits<double>::infinity();
  auto scan = [&](double a, double b, int n) {
    for (int i = 0; i <= n; ++i) {
      const double x = a + (b - a) * i / n;
      const double v = obj(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    }
  };
  scan(lo, hi, 20000);
  double h = (hi - lo) / 20000.0;
  for (int pass = 0; pass < 3; ++pass) {
    scan(best - 2.0 * h, best + 2.0 * h, 4000);
    h /= 1000.0;
  }
  return best;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline Eigen::MatrixXd random_skew(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s(i, j) = g(rng);
      s(j, i) = -s(i, j);
    }
  return s;
}

}  // namespace fpnet::testing
