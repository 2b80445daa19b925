#pragma once

// Dense two-phase tableau simplex for small LPs:
//   minimize c.x  subject to  A x <= b,  x_j >= 0 unless marked free.
// Dantzig pricing, switching to Bland's rule once the pivot count suggests
// cycling.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fpnet/error.hpp"
#include "fpnet/pair_transform.hpp"

namespace fpnet {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  Index pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  Eigen::MatrixXd& t() { return t_; }
  std::vector<Index>& basis() { return basis_; }
  Index rows() const { return t_.rows() - 1; }
  Index rhs() const { return t_.cols() - 1; }
  Index pivots() const { return pivots_; }

  void pivot(Index r, Index q) {
    t_.row(r) /= t_(r, q);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, q) != 0.0) t_.row(i) -= t_(i, q) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = q;
    ++pivots_;
  }

  /// Runs to optimality over columns [0, usable). Returns false if unbounded.
  bool optimize(Index usable, Index max_pivots) {
    constexpr double eps = 1e-11;
    const Index bland_after = 50 * (rows() + usable);
    for (;;) {
      if (pivots_ > max_pivots) throw OracleError("simplex: pivot limit exceeded");
      const bool bland = pivots_ > bland_after;
      Index q = -1;
      double best = -eps;
      for (Index j = 0; j < usable; ++j) {
        const double rc = t_(rows(), j);
        if (rc < best) {
          q = j;
          if (bland) break;
          best = rc;
        }
      }
      if (q < 0) return true;
      Index r = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows(); ++i) {
        const double a = t_(i, q);
        if (a > eps) {
          const double v = t_(i, rhs()) / a;
          if (v < ratio - 1e-14 ||
              (std::abs(v - ratio) <= 1e-14 && r >= 0 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)])) {
            ratio = v;
            r = i;
          }
        }
      }
      if (r < 0) return false;
      pivot(r, q);
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Index> basis_;
  Index pivots_ = 0;
};

}  // namespace detail

inline LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const std::vector<bool>& free_vars = {}, Index max_pivots = 200000) {
  const Index n = c.size();
  const Index m = A.rows();
  if (A.cols() != n || b.size() != m) throw ConfigError("solve_lp: dimension mismatch");
  if (!free_vars.empty() && static_cast<Index>(free_vars.size()) != n) {
    throw ConfigError("solve_lp: free_vars must have one flag per variable");
  }
  auto is_free = [&](Index j) { return !free_vars.empty() && free_vars[static_cast<std::size_t>(j)]; };

  // Structural columns: x_j, or x_j+ and x_j- for free variables.
  std::vector<Index> col_of(static_cast<std::size_t>(n));
  Index ns = 0;
  for (Index j = 0; j < n; ++j) {
    col_of[static_cast<std::size_t>(j)] = ns;
    ns += is_free(j) ? 2 : 1;
  }
  Index na = 0;
  for (Index i = 0; i < m; ++i)
    if (b(i) < 0.0) ++na;
  const Index slack0 = ns;
  const Index art0 = ns + m;
  const Index cols = ns + m + na;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  Index next_art = art0;
  for (Index i = 0; i < m; ++i) {
    const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
    for (Index j = 0; j < n; ++j) {
      const Index k = col_of[static_cast<std::size_t>(j)];
      t(i, k) = sgn * A(i, j);
      if (is_free(j)) t(i, k + 1) = -sgn * A(i, j);
    }
    t(i, slack0 + i) = sgn;
    t(i, cols) = sgn * b(i);
    if (sgn < 0.0) {
      t(i, next_art) = 1.0;
      basis[static_cast<std::size_t>(i)] = next_art++;
    } else {
      basis[static_cast<std::size_t>(i)] = slack0 + i;
    }
  }

  LpResult result;
  detail::Tableau tab(std::move(t), std::move(basis));
  auto& T = tab.t();

  if (na > 0) {
    // Phase 1: minimize the sum of artificials.
    T.row(m).setZero();
    for (Index j = art0; j < cols; ++j) T(m, j) = 1.0;
    for (Index i = 0; i < m; ++i)
      if (tab.basis()[static_cast<std::size_t>(i)] >= art0) T.row(m) -= T.row(i);
    tab.optimize(cols, max_pivots);
    if (-T(m, cols) > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
      result.status = LpStatus::infeasible;
      result.pivots = tab.pivots();
      return result;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Index i = 0; i < m; ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
      for (Index j = 0; j < art0; ++j) {
        if (std::abs(T(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 reduced costs.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  for (Index j = 0; j < n; ++j) {
    const Index k = col_of[static_cast<std::size_t>(j)];
    cost(k) = c(j);
    if (is_free(j)) cost(k + 1) = -c(j);
  }
  T.row(m).setZero();
  T.row(m).head(cols) = cost.transpose();
  for (Index i = 0; i < m; ++i) {
    const Index bi = tab.basis()[static_cast<std::size_t>(i)];
    if (cost(bi) != 0.0) T.row(m) -= cost(bi) * T.row(i);
  }
  if (!tab.optimize(art0, max_pivots)) {
    result.status = LpStatus::unbounded;
    result.pivots = tab.pivots();
    return result;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(cols);
  for (Index i = 0; i < m; ++i) z(tab.basis()[static_cast<std::size_t>(i)]) = T(i, cols);
  result.x.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Index k = col_of[static_cast<std::size_t>(j)];
    result.x(j) = is_free(j) ? z(k) - z(k + 1) : z(k);
  }
  result.objective = c.dot(result.x);
  result.status = LpStatus::optimal;
  result.pivots = tab.pivots();
  return result;
}

}  // namespace fpnet
