#include <gtest/gtest.h>

#include "fpnet/oracles.hpp"
#include "fpnet/simplex.hpp"

using namespace fpnet;

TEST(Simplex, TextbookMaximization) {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0.
  Eigen::VectorXd c(2);
  c << -3, -5;
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 2, 3, 2;
  Eigen::VectorXd b(3);
  b << 4, 12, 18;
  const auto r = solve_lp(c, A, b);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.x(0), 2.0, 1e-12);
  EXPECT_NEAR(r.x(1), 6.0, 1e-12);
  EXPECT_NEAR(r.objective, -36.0, 1e-12);
}

TEST(Simplex, FreeVariableAndNegativeBound) {
  // min x s.t. -x <= 3 with x free: x = -3.
  Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd A = -Eigen::MatrixXd::Ones(1, 1);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 3.0);
  const auto r = solve_lp(c, A, b, {true});
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.x(0), -3.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  // x <= -1 with x >= 0.
  const auto r = solve_lp(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, -1.0));
  EXPECT_EQ(r.status, LpStatus::infeasible);
}

TEST(Simplex, Unbounded) {
  // min -x s.t. -x <= 0.
  const auto r = solve_lp(-Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  EXPECT_EQ(r.status, LpStatus::unbounded);
}

TEST(Simplex, Degenerate) {
  // Several constraints active at the optimum vertex (1, 1).
  Eigen::VectorXd c(2);
  c << -1, -1;
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, 0, 1, 1, 1, 2, 1;
  Eigen::VectorXd b(4);
  b << 1, 1, 2, 3;
  const auto r = solve_lp(c, A, b);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -2.0, 1e-12);
}

TEST(OracleLasso, ZeroLambdaIsLeastSquares) {
  auto inst = make_lasso_instance(15, 5, 9);
  inst.lambda = 0.0;
  const Eigen::VectorXd ls = (inst.A.transpose() * inst.A).ldlt().solve(inst.A.transpose() * inst.y);
  EXPECT_LT((oracle_lasso(inst).x - ls).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((oracle_lasso_huber(inst).x - ls).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(OracleLasso, ScalarSoftThreshold) {
  LassoInstance inst;
  inst.A = Eigen::MatrixXd::Ones(1, 1);
  inst.y = Eigen::VectorXd::Constant(1, 2.0);
  inst.rho = 1.0;
  inst.lambda = 0.5;
  // argmin 0.5 (x - 2)^2 + 0.5 |x| = 1.5
  EXPECT_NEAR(oracle_lasso(inst).x(0), 1.5, 1e-12);
  EXPECT_LT(lasso_optimality(inst, oracle_lasso(inst).x), 1e-12);
}

TEST(OracleMinimax, SinglePoint) {
  FirGrid g;
  g.frequency = {0.0};
  g.desired = {1.0};
  g.weight = {1.0};
  const auto s = oracle_minimax_lp(g, 1);
  EXPECT_NEAR(s.delta, 0.0, 1e-12);
  EXPECT_NEAR(s.coefficients(0), 1.0, 1e-12);
}

TEST(OracleMinimax, ConstantFitOfTwoLevels) {
  // One coefficient against desired values 0 and 1: best constant 0.5.
  FirGrid g;
  g.frequency = {0.1, 2.0};
  g.desired = {1.0, 0.0};
  g.weight = {1.0, 1.0};
  const auto s = oracle_minimax_lp(g, 1);
  EXPECT_NEAR(s.delta, 0.5, 1e-12);
  EXPECT_NEAR(s.coefficients(0), 0.5, 1e-12);
}

TEST(OracleSvm, TwoPointMaxMargin) {
  Eigen::MatrixXd X(2, 2);
  X << 1, 0, -1, 0;
  Eigen::VectorXd y(2);
  y << 1, -1;
  const auto s = oracle_svm(X, y, 10.0);
  EXPECT_NEAR(s.w(0), 1.0, 1e-7);
  EXPECT_NEAR(s.w(1), 0.0, 1e-7);
  EXPECT_NEAR(s.b, 0.0, 1e-7);
  // Margin 1/|w| equals half the distance between the points.
  EXPECT_NEAR(1.0 / s.w.norm(), 1.0, 1e-7);
}

TEST(OracleSvm, SeparatesDefaultInstance) {
  const auto inst = make_svm_instance();
  const auto s = oracle_svm(inst);
  const Eigen::VectorXd pred = svm_predict(inst.features, s.model());
  EXPECT_EQ((pred.array() == inst.labels.array()).count(), 30);
  EXPECT_LT(s.optimality, 1e-6);
}
