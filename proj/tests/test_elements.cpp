#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fpnet/elements.hpp"
#include "support.hpp"

using namespace fpnet;
using fpnet::testing::grid_prox;

// Literal values below were produced by grid_prox (tests/support.hpp).

TEST(Quadratic, Examples) {
  EXPECT_DOUBLE_EQ(eval_quadratic(3.0, 2.5, 3.0), 3.0);
  EXPECT_NEAR(eval_quadratic(5.0, 1.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(prox::quadratic(0.0, 1.0, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_quadratic(0.0, 1.0, 2.0), 2.0, 1e-15);
  EXPECT_NEAR(grid_prox([](double x) { return 0.5 * (x - 2.0) * (x - 2.0); }, 0.0), 1.0, 1e-6);
}

TEST(HuberL1, Examples) {
  EXPECT_EQ(eval_huber_l1(0.0, 1.0, 0.1), 0.0);
  EXPECT_NEAR(prox::huber_l1(3.0, 1.0, 1.0), 2.0, 1e-15);
  EXPECT_NEAR(eval_huber_l1(3.0, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(prox::huber_l1(1.0, 1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(eval_huber_l1(1.0, 1.0, 1.0), 0.0, 1e-15);
}

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(eval_soft_threshold(0.0, 1.0), 0.0);
  EXPECT_NEAR(prox::soft_threshold(2.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_soft_threshold(2.0, 1.0), 0.0, 1e-15);
  EXPECT_EQ(prox::soft_threshold(0.5, 1.0), 0.0);
  EXPECT_NEAR(eval_soft_threshold(0.5, 1.0), -0.5, 1e-15);
}

TEST(Hinge, Examples) {
  EXPECT_EQ(prox::hinge(2.0, 3.0), 2.0);
  EXPECT_EQ(eval_hinge(2.0, 3.0), 2.0);
  EXPECT_NEAR(prox::hinge(-1.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(eval_hinge(-1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(prox::hinge(0.5, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_hinge(0.5, 1.0), 1.5, 1e-15);
}

TEST(OneSided, Examples) {
  EXPECT_EQ(eval_one_sided(-1.0, 3.0, 0.0, prox::Side::upper), -1.0);
  EXPECT_NEAR(prox::one_sided(2.0, 1.0, 0.0, prox::Side::upper), 1.0, 1e-15);
  EXPECT_NEAR(eval_one_sided(2.0, 1.0, 0.0, prox::Side::upper), 0.0, 1e-15);
  EXPECT_NEAR(prox::one_sided(-2.0, 1.0, 0.0, prox::Side::lower), -1.0, 1e-15);
  EXPECT_NEAR(eval_one_sided(-2.0, 1.0, 0.0, prox::Side::lower), 0.0, 1e-15);
}

TEST(CappedL1, Examples) {
  EXPECT_EQ(prox::capped_l1(0.0, 1.0, 1.0), 0.0);
  EXPECT_EQ(eval_capped_l1(0.0, 1.0, 1.0), 0.0);
  EXPECT_EQ(prox::capped_l1(10.0, 1.0, 1.0), 10.0);
  EXPECT_EQ(prox::capped_l1(0.3, 1.0, 1.0), 0.0);
  EXPECT_EQ(prox::capped_l1(-10.0, 1.0, 1.0), -10.0);
}

TEST(CappedL1, NarrowNotchLeavesLargeInputsAlone) {
  const double rho = 0.5;
  const double v = 1e-9;
  const double cut = std::sqrt(2.0 * rho);
  for (double d : {cut + 1e-6, 1.5, 3.0, -2.0}) EXPECT_EQ(prox::capped_l1(d, rho, v), d) << d;
  for (double d : {cut - 1e-3, 0.5, -0.9}) EXPECT_LE(std::abs(prox::capped_l1(d, rho, v)), v) << d;
}

TEST(CappedL1, TieGoesToSmallerMagnitude) {
  // h = a^2 / 2 with a >= v: zero and plateau cost the same.
  const double h = 0.5;
  const double v = 0.01;
  EXPECT_EQ(prox::capped_l1(1.0, h, v), 0.0);
}

TEST(PairCoupling, Examples) {
  const auto [u, v] = prox::pair_coupling(1.0, 0.0, 0.5);
  EXPECT_NEAR(u, 0.75, 1e-15);
  EXPECT_NEAR(v, 0.25, 1e-15);
  const auto [a, b] = prox::pair_coupling(2.0, 2.0, 7.0);
  EXPECT_EQ(a, 2.0);
  EXPECT_EQ(b, 2.0);
  Eigen::Vector2d d(3.0, -1.0);
  EXPECT_EQ(eval_pair_coupling(d, 0.0), d);
}

TEST(PairCoupling, MatchesNormalEquations) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0), w(0.0, 10.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d d(u(rng), u(rng));
    const double rho = w(rng);
    Eigen::Matrix2d h;
    h << 1.0 + rho, -rho, -rho, 1.0 + rho;
    const Eigen::Vector2d x = h.ldlt().solve(d);
    const auto [pu, pv] = prox::pair_coupling(d(0), d(1), rho);
    EXPECT_NEAR(pu, x(0), 1e-12);
    EXPECT_NEAR(pv, x(1), 1e-12);
  }
}

namespace {

// Projection onto {|e|_inf <= t} by a one-dimensional search over t: for
// fixed t the closest e is a clamp, so the distance is convex in t.
Eigen::VectorXd epigraph_oracle(const Eigen::VectorXd& z) {
  const Index n = z.size() - 1;
  auto cost = [&](double t) {
    double acc = (t - z(n)) * (t - z(n));
    for (Index i = 0; i < n; ++i) {
      const double e = std::clamp(z(i), -t, t);
      acc += (e - z(i)) * (e - z(i));
    }
    return acc;
  };
  double lo = 0.0, hi = std::abs(z(n)) + z.head(n).cwiseAbs().maxCoeff() + 1.0;
  for (int k = 0; k < 300; ++k) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    (cost(m1) < cost(m2) ? hi : lo) = cost(m1) < cost(m2) ? m2 : m1;
  }
  const double t = 0.5 * (lo + hi);
  Eigen::VectorXd out(n + 1);
  for (Index i = 0; i < n; ++i) out(i) = std::clamp(z(i), -t, t);
  out(n) = t;
  return out;
}

Eigen::VectorXd project(Eigen::VectorXd z) {
  prox::linf_epigraph(z);
  return z;
}

}  // namespace

TEST(LinfEpigraph, Examples) {
  Eigen::VectorXd feasible(3);
  feasible << 0.5, -1.0, 2.0;
  EXPECT_EQ(project(feasible), feasible);

  Eigen::VectorXd z(2);
  z << 2.0, 0.0;
  const Eigen::VectorXd p = project(z);
  EXPECT_NEAR(p(0), 1.0, 1e-15);
  EXPECT_NEAR(p(1), 1.0, 1e-15);

  Eigen::VectorXd vertex(3);
  vertex << 0.0, 0.0, -3.0;
  EXPECT_EQ(project(vertex), Eigen::VectorXd::Zero(3));
}

TEST(LinfEpigraph, MatchesSearchOracleAndIsIdempotent) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const Index n = 1 + static_cast<Index>(rng() % 12);
    Eigen::VectorXd z(n + 1);
    for (Index i = 0; i <= n; ++i) z(i) = g(rng);
    const Eigen::VectorXd p = project(z);
    EXPECT_LE(p.head(n).cwiseAbs().maxCoeff(), p(n) + 1e-12);
    EXPECT_LT((p - epigraph_oracle(z)).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((project(p) - p).cwiseAbs().maxCoeff(), 1e-15);
  }
}

// Scalar closed forms against the brute-force minimizer.
TEST(ScalarProx, MatchesGridSearch) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dd(-6.0, 6.0), w(0.0, 4.0), pos(0.05, 3.0), t(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double d = dd(rng);
    const double a = w(rng), b = pos(rng), c = t(rng);
    EXPECT_NEAR(prox::quadratic(d, a, c), grid_prox([&](double x) { return 0.5 * a * (x - c) * (x - c); }, d), 1e-4);
    EXPECT_NEAR(prox::huber_l1(d, a, b), grid_prox([&](double x) {
                  const double m = std::abs(x);
                  return m <= b ? a * m * m / (2 * b) : a * (m - b / 2);
                }, d),
                1e-4);
    EXPECT_NEAR(prox::soft_threshold(d, a), grid_prox([&](double x) { return a * std::abs(x); }, d), 1e-4);
    EXPECT_NEAR(prox::hinge(d, a), grid_prox([&](double x) { return a * std::max(0.0, 1 - x); }, d), 1e-4);
    EXPECT_NEAR(prox::one_sided(d, a, c, prox::Side::upper),
                grid_prox([&](double x) { return 0.5 * a * std::pow(std::max(0.0, x - c), 2); }, d), 1e-4);
    EXPECT_NEAR(prox::one_sided(d, a, c, prox::Side::lower),
                grid_prox([&](double x) { return 0.5 * a * std::pow(std::max(0.0, c - x), 2); }, d), 1e-4);
    EXPECT_NEAR(prox::capped_l1(d, a, b), grid_prox([&](double x) { return a * std::min(std::abs(x) / b, 1.0); }, d),
                1e-4);
  }
}

namespace {

std::vector<Element> convex_elements() {
  return {Element{{0, 3}, Quadratic{1.7, 0.4}},
          Element{{0, 3}, HuberL1{1.0, 0.3}},
          Element{{0, 3}, SoftThreshold{0.8}},
          Element{{0, 4}, LinfEpigraph{}},
          Element{{0, 3}, Hinge{1.2}},
          Element{{0, 4}, PairCoupling{2.0}},
          Element{{0, 3}, OneSidedPenalty{3.0, {0.2}, prox::Side::upper}},
          Element{{0, 3}, OneSidedPenalty{3.0, {-0.1, 0.0, 0.1}, prox::Side::lower}}};
}

}  // namespace

TEST(Dissipativity, ConvexKindsPass) {
  for (const auto& e : convex_elements()) {
    ASSERT_TRUE(e.dissipative());
    const Eigen::VectorXd center = fpnet::testing::random_vector(e.block.length, 3);
    const auto rep = dissipativity_probe(e, center, 1000, 3.0, 17);
    EXPECT_TRUE(rep.pass) << to_string(e.kind()) << " ratio " << rep.max_ratio;
  }
}

TEST(Dissipativity, QuadraticUnitWeightCollapses) {
  const Element e{{0, 2}, Quadratic{1.0, 0.0}};
  const auto rep = dissipativity_probe(e, Eigen::VectorXd::Zero(2), 100, 1.0, 1);
  EXPECT_EQ(rep.max_ratio, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Dissipativity, CappedL1FailsAcrossNotch) {
  const Element e{{0, 1}, CappedL1{1.0, 1.0}};
  EXPECT_FALSE(e.dissipative());
  const auto rep = dissipativity_probe(e, Eigen::VectorXd::Zero(1), 1000, 2.0, 5);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_ratio, 1.0);
}

TEST(Nonexpansive, RandomPairs) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 2.0);
  for (const auto& e : convex_elements()) {
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd a(e.block.length), b(e.block.length);
      for (Index i = 0; i < a.size(); ++i) {
        a(i) = g(rng);
        b(i) = g(rng);
      }
      EXPECT_LE((e.reflect(a) - e.reflect(b)).norm(), (a - b).norm() + 1e-10) << to_string(e.kind());
    }
  }
}

TEST(FixedPoints, MinimizersAreFixed) {
  // m(d) = d exactly when prox(d) = d, i.e. d minimizes the element cost.
  EXPECT_EQ(eval_quadratic(0.7, 3.0, 0.7), 0.7);
  EXPECT_EQ(eval_soft_threshold(0.0, 2.0), 0.0);
  EXPECT_EQ(eval_hinge(1.5, 2.0), 1.5);
  EXPECT_EQ(eval_one_sided(-0.5, 1.0, 0.0, prox::Side::upper), -0.5);
  EXPECT_EQ(eval_capped_l1(0.0, 1.0, 0.1), 0.0);
  Eigen::Vector2d same(0.3, 0.3);
  EXPECT_EQ(eval_pair_coupling(same, 4.0), same);
}

TEST(Validation, RejectsBadParameters) {
  EXPECT_THROW((Element{{0, 1}, Quadratic{-1.0, 0.0}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 1}, HuberL1{1.0, 0.0}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 1}, CappedL1{1.0, 0.0}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 1}, CappedL1{1.0, -1.0}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 3}, PairCoupling{1.0}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 1}, LinfEpigraph{}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 2}, OneSidedPenalty{1.0, {0.0, 1.0, 2.0}, prox::Side::upper}}.validate()), ConfigError);
  EXPECT_THROW((Element{{0, 1}, SoftThreshold{std::nan("")}}.validate()), ConfigError);
}
