#pragma once

// Conventional reference solvers, independent of the fixed-point engine.
// Each one runs a first-order or pivoting method to near-optimality and then
// polishes on the identified active set with one exact linear solve.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fpnet/error.hpp"
#include "fpnet/problems.hpp"
#include "fpnet/simplex.hpp"

namespace fpnet {

struct OracleSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  double optimality = 0.0;  // stationarity measure, solver specific
  Index iterations = 0;
};

namespace detail {

inline double spectral_norm_sq(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline Eigen::VectorXd huber_lasso_gradient(const LassoInstance& inst, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = inst.rho * (inst.A.transpose() * (inst.A * x - inst.y));
  for (Index i = 0; i < x.size(); ++i) g(i) += inst.lambda * std::clamp(x(i) / inst.epsilon, -1.0, 1.0);
  return g;
}

}  // namespace detail

/// Huber-smoothed LASSO by accelerated gradient with function-value restart,
/// then Newton polishing on the piecewise-quadratic structure.
inline OracleSolution oracle_lasso_huber(const LassoInstance& inst, double grad_tol = 1e-10, Index max_iters = 2000000) {
  inst.validate();
  const Index n = inst.A.cols();
  const double L = inst.lambda / inst.epsilon + inst.rho * detail::spectral_norm_sq(inst.A);
  auto F = [&](const Eigen::VectorXd& v) { return inst.objective(v, true); };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd yk = x;
  double t = 1.0;
  double fx = F(x);
  Index it = 0;
  for (; it < max_iters; ++it) {
    const Eigen::VectorXd g = detail::huber_lasso_gradient(inst, yk);
    const Eigen::VectorXd xn = yk - g / L;
    const double fn = F(xn);
    if (fn > fx) {
      // restart momentum
      yk = x;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = xn + ((t - 1.0) / tn) * (xn - x);
    x = xn;
    fx = fn;
    t = tn;
    if (detail::huber_lasso_gradient(inst, x).cwiseAbs().maxCoeff() <= 1e-3 * grad_tol) break;
    if (it % 64 == 0 && detail::huber_lasso_gradient(inst, x).cwiseAbs().maxCoeff() <= 1e-7) break;
  }

  // Newton steps: the Hessian is constant on each region of the Huber pieces.
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd g = detail::huber_lasso_gradient(inst, x);
    if (g.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + inst.y.cwiseAbs().maxCoeff())) break;
    Eigen::MatrixXd H = inst.rho * inst.A.transpose() * inst.A;
    for (Index i = 0; i < n; ++i)
      if (std::abs(x(i)) < inst.epsilon) H(i, i) += inst.lambda / inst.epsilon;
    const Eigen::VectorXd step = H.ldlt().solve(g);
    const Eigen::VectorXd xn = x - step;
    if (!xn.allFinite() || detail::huber_lasso_gradient(inst, xn).norm() >= g.norm()) break;
    x = xn;
  }

  OracleSolution out;
  out.x = x;
  out.objective = F(x);
  out.optimality = detail::huber_lasso_gradient(inst, x).cwiseAbs().maxCoeff();
  out.iterations = it;
  if (!(out.optimality <= grad_tol)) {
    throw OracleError("huber lasso oracle stalled at gradient " + std::to_string(out.optimality));
  }
  return out;
}

/// Min-norm subgradient of lambda |x|_1 + (rho/2)|A x - y|^2, inf-norm.
inline double lasso_optimality(const LassoInstance& inst, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = inst.rho * (inst.A.transpose() * (inst.A * x - inst.y));
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x(i) != 0.0 ? std::abs(g(i) + inst.lambda * prox::sign(x(i)))
                                 : std::max(0.0, std::abs(g(i)) - inst.lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

/// Exact-1-norm LASSO by cyclic coordinate descent, polished by solving the
/// sign-fixed normal equations on the support.
inline OracleSolution oracle_lasso(const LassoInstance& inst, double tol = 1e-10, Index max_sweeps = 1000000) {
  inst.validate();
  const Index n = inst.A.cols();
  const Eigen::VectorXd col_sq = inst.A.colwise().squaredNorm().transpose();
  for (Index j = 0; j < n; ++j)
    if (!(col_sq(j) > 0.0)) throw ConfigError("lasso: column " + std::to_string(j) + " of A is zero");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = inst.y;  // y - A x
  Index sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double rho_j = inst.rho * (inst.A.col(j).dot(r) + col_sq(j) * x(j));
      const double xj = prox::soft_threshold(rho_j, inst.lambda) / (inst.rho * col_sq(j));
      const double delta = xj - x(j);
      if (delta != 0.0) {
        r -= delta * inst.A.col(j);
        x(j) = xj;
        moved = std::max(moved, std::abs(delta));
      }
    }
    if (moved <= 1e-14 || (sweep % 16 == 0 && lasso_optimality(inst, x) <= 1e-3 * tol)) break;
  }

  // Polish: rho A_S^T (A_S x_S - y) + lambda sign(x_S) = 0.
  std::vector<Index> support;
  for (Index j = 0; j < n; ++j)
    if (x(j) != 0.0) support.push_back(j);
  if (!support.empty()) {
    const auto k = static_cast<Index>(support.size());
    Eigen::MatrixXd As(inst.A.rows(), k);
    Eigen::VectorXd sg(k);
    for (Index i = 0; i < k; ++i) {
      As.col(i) = inst.A.col(support[static_cast<std::size_t>(i)]);
      sg(i) = prox::sign(x(support[static_cast<std::size_t>(i)]));
    }
    const Eigen::MatrixXd H = inst.rho * As.transpose() * As;
    const Eigen::VectorXd rhs = inst.rho * As.transpose() * inst.y - inst.lambda * sg;
    const Eigen::VectorXd xs = H.fullPivLu().solve(rhs);
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(n);
    bool signs_ok = xs.allFinite();
    for (Index i = 0; i < k && signs_ok; ++i) {
      cand(support[static_cast<std::size_t>(i)]) = xs(i);
      if (prox::sign(xs(i)) != sg(i)) signs_ok = false;
    }
    if (signs_ok && lasso_optimality(inst, cand) < lasso_optimality(inst, x)) x = cand;
  }

  OracleSolution out;
  out.x = x;
  out.objective = inst.objective(x, false);
  out.optimality = lasso_optimality(inst, x);
  out.iterations = sweep;
  if (!(out.optimality <= tol)) throw OracleError("lasso oracle stalled at " + std::to_string(out.optimality));
  return out;
}

struct MinimaxSolution {
  Eigen::VectorXd coefficients;
  double delta = 0.0;
  Index pivots = 0;
};

/// Grid LP: min delta s.t. -delta <= W (C a - D) <= delta.
inline MinimaxSolution oracle_minimax_lp(const FirGrid& grid, int num_taps) {
  grid.validate();
  const int nc = (num_taps + 1) / 2;
  const Index ng = grid.size();
  const Eigen::MatrixXd C = cosine_matrix(grid, nc);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * ng, nc + 1);
  Eigen::VectorXd b(2 * ng);
  for (Index j = 0; j < ng; ++j) {
    const auto js = static_cast<std::size_t>(j);
    const double w = grid.weight[js];
    A.row(j).head(nc) = w * C.row(j);
    A(j, nc) = -1.0;
    b(j) = w * grid.desired[js];
    A.row(ng + j).head(nc) = -w * C.row(j);
    A(ng + j, nc) = -1.0;
    b(ng + j) = -w * grid.desired[js];
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nc + 1);
  c(nc) = 1.0;
  std::vector<bool> free_vars(static_cast<std::size_t>(nc + 1), true);
  free_vars.back() = false;
  const LpResult lp = solve_lp(c, A, b, free_vars);
  if (lp.status != LpStatus::optimal) throw OracleError("minimax LP did not reach an optimal basis");
  MinimaxSolution out;
  out.coefficients = lp.x.head(nc);
  out.delta = lp.x(nc);
  out.pivots = lp.pivots;
  return out;
}

struct SvmSolution {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd alpha;
  double objective = 0.0;  // (1/2)|w|^2 + C sum hinge
  double optimality = 0.0;

  Eigen::VectorXd model() const {
    Eigen::VectorXd m(w.size() + 1);
    m << w, b;
    return m;
  }
};

namespace detail {

/// Projection onto {0 <= a <= C, y.a = 0} by bisection on the multiplier.
inline Eigen::VectorXd project_svm_dual(const Eigen::VectorXd& v, const Eigen::VectorXd& y, double C) {
  auto at = [&](double mu) { return (v - mu * y).cwiseMax(0.0).cwiseMin(C).eval(); };
  double lo = -1.0, hi = 1.0;
  while (y.dot(at(lo)) < 0.0) lo *= 2.0;
  while (y.dot(at(hi)) > 0.0) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo) + std::abs(hi)); ++k) {
    const double mid = 0.5 * (lo + hi);
    (y.dot(at(mid)) > 0.0 ? lo : hi) = mid;
  }
  return at(0.5 * (lo + hi));
}

inline double svm_primal(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C, const Eigen::VectorXd& w,
                         double b) {
  double h = 0.0;
  for (Index i = 0; i < X.rows(); ++i) h += std::max(0.0, 1.0 - y(i) * (X.row(i).dot(w) + b));
  return 0.5 * w.squaredNorm() + C * h;
}

}  // namespace detail

/// Soft-margin SVM through its dual QP: accelerated projected gradient, then
/// an exact KKT solve on the free support vectors.
inline SvmSolution oracle_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C, double tol = 1e-9,
                              Index max_iters = 2000000) {
  const Index n = X.rows();
  if (y.size() != n) throw ConfigError("svm oracle: one label per sample required");
  const Eigen::MatrixXd Yx = y.asDiagonal() * X;
  const Eigen::MatrixXd Q = Yx * Yx.transpose();
  const double L = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(), 1e-12);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  auto dual = [&](const Eigen::VectorXd& a) { return 0.5 * a.dot(Q * a) - a.sum(); };  // minimized
  auto pg_gap = [&](const Eigen::VectorXd& a) {
    return (a - detail::project_svm_dual(a - (Q * a - ones), y, C)).cwiseAbs().maxCoeff();
  };

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = a;
  double t = 1.0;
  double fa = dual(a);
  Index it = 0;
  for (; it < max_iters; ++it) {
    const Eigen::VectorXd an = detail::project_svm_dual(z - (Q * z - ones) / L, y, C);
    const double fn = dual(an);
    if (fn > fa) {
      z = a;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = an + ((t - 1.0) / tn) * (an - a);
    a = an;
    fa = fn;
    t = tn;
    if (it % 32 == 0 && pg_gap(a) <= 1e-9) break;
  }

  // Active-set polish on free multipliers: (Q a)_F + y_F b = 1, y.a = 0.
  const double edge = 1e-7 * std::max(1.0, C);
  std::vector<Index> freeset;
  for (Index i = 0; i < n; ++i)
    if (a(i) > edge && a(i) < C - edge) freeset.push_back(i);
  double b = 0.0;
  bool have_b = false;
  if (!freeset.empty()) {
    const auto k = static_cast<Index>(freeset.size());
    Eigen::VectorXd fixed = a;
    for (Index i = 0; i < n; ++i) fixed(i) = a(i) <= edge ? 0.0 : (a(i) >= C - edge ? C : 0.0);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    const Eigen::VectorXd Qfixed = Q * fixed;
    for (Index r = 0; r < k; ++r) {
      const Index i = freeset[static_cast<std::size_t>(r)];
      for (Index s = 0; s < k; ++s) K(r, s) = Q(i, freeset[static_cast<std::size_t>(s)]);
      K(r, k) = y(i);
      K(k, r) = y(i);
      rhs(r) = 1.0 - Qfixed(i);
    }
    rhs(k) = -y.dot(fixed);
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    Eigen::VectorXd cand = fixed;
    bool ok = sol.allFinite();
    for (Index r = 0; r < k && ok; ++r) {
      const double v = sol(r);
      if (v < 0.0 || v > C) ok = false;
      cand(freeset[static_cast<std::size_t>(r)]) = v;
    }
    if (ok && dual(cand) <= fa + 1e-12) {
      a = cand;
      b = sol(k);
      have_b = true;
    }
  }

  SvmSolution out;
  out.alpha = a;
  out.w = Yx.transpose() * a;
  if (!have_b) {
    // Interval of b consistent with the complementarity conditions.
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double m = 1.0 / y(i) - X.row(i).dot(out.w);  // y(i) = +-1
      const bool up = y(i) > 0.0;
      if (a(i) <= edge) {
        // y (w.x + b) >= 1
        if (up) lo = std::max(lo, m); else hi = std::min(hi, m);
      } else if (a(i) >= C - edge) {
        if (up) hi = std::min(hi, m); else lo = std::max(lo, m);
      } else {
        lo = std::max(lo, m);
        hi = std::min(hi, m);
      }
    }
    b = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : (std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0));
  }
  out.b = b;
  out.objective = detail::svm_primal(X, y, C, out.w, b);
  out.optimality = out.objective + dual(a);  // duality gap
  if (!(std::abs(out.optimality) <= tol * (1.0 + std::abs(out.objective)))) {
    throw OracleError("svm oracle duality gap " + std::to_string(out.optimality));
  }
  return out;
}

inline SvmSolution oracle_svm(const SvmInstance& inst, double tol = 1e-9) {
  inst.validate();
  return oracle_svm(inst.features, inst.labels, inst.C, tol);
}

}  // namespace fpnet
