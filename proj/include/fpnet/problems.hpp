#pragma once

// Builders for the example systems. Each one lays out element blocks, writes
// the linear constraints among prox-point variables, pins constant data with
// absorbed sources, and returns the assembled System plus the block map
// needed to read the solution back.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fpnet/elements.hpp"
#include "fpnet/engine.hpp"
#include "fpnet/error.hpp"
#include "fpnet/graph.hpp"
#include "fpnet/interconnect.hpp"

namespace fpnet {

namespace detail {

inline std::vector<Index> iota_indices(Index first, Index count) {
  std::vector<Index> v(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = first + i;
  return v;
}

inline void require_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw ConfigError(what + " contains non-finite entries");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LASSO

struct LassoInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  double lambda = 1.0;
  double rho = 10.0;
  double epsilon = 0.01;  // Huber half-width

  void validate() const {
    if (A.rows() == 0 || A.cols() == 0) throw ConfigError("lasso: A is empty");
    if (y.size() != A.rows()) {
      throw ConfigError("lasso: y has " + std::to_string(y.size()) + " entries, A has " + std::to_string(A.rows()) +
                        " rows");
    }
    detail::require_finite(A, "lasso: A");
    detail::require_finite(y, "lasso: y");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lasso: lambda must be >= 0");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("lasso: rho must be >= 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("lasso: epsilon must be > 0");
  }

  /// lambda huber_eps(x) + (rho/2) |A x - y|^2, or the exact 1-norm variant.
  double objective(const Eigen::VectorXd& x, bool huber) const {
    double reg = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      const double a = std::abs(x(i));
      reg += huber ? (a <= epsilon ? a * a / (2.0 * epsilon) : a - 0.5 * epsilon) : a;
    }
    return lambda * reg + 0.5 * rho * (A * x - y).squaredNorm();
  }
};

/// Gaussian m x n design, sparse ground truth with `nonzeros` entries, small
/// additive noise.
inline LassoInstance make_lasso_instance(Index m = 10, Index n = 20, std::uint64_t seed = 1, Index nonzeros = 3,
                                         double noise = 0.01) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  LassoInstance inst;
  inst.A.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) inst.A(i, j) = gauss(rng);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(n);
  std::vector<Index> perm = detail::iota_indices(0, n);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (Index k = 0; k < std::min(nonzeros, n); ++k) {
    truth(perm[static_cast<std::size_t>(k)]) = (k % 2 == 0 ? 1.0 : -1.0) * mag(rng);
  }
  inst.y = inst.A * truth;
  for (Index i = 0; i < m; ++i) inst.y(i) += noise * gauss(rng);
  return inst;
}

struct LassoSystem {
  System system;
  BlockIndex x;  // coefficients
  BlockIndex r;  // residual A x - y

  Eigen::VectorXd coefficients(const Eigen::VectorXd& d) const { return prox_point(system, d).segment(x.offset, x.length); }
};

namespace detail {

inline LassoSystem build_lasso(const LassoInstance& inst, ElementLaw x_law) {
  inst.validate();
  const Index n = inst.A.cols();
  const Index m = inst.A.rows();
  // Layout: x | r | u (pinned to 1, absorbed).
  const Index u = n + m;
  LinearConstraint con;
  con.independent = iota_indices(0, n);
  con.independent.push_back(u);
  con.dependent = iota_indices(n, m);
  con.coupling.resize(m, n + 1);
  con.coupling << inst.A, -inst.y;

  const AffineInterconnection full = assemble_interconnection({con}, n + m + 1);
  LassoSystem out;
  out.x = {0, n};
  out.r = {n, m};
  out.system.interconnection = absorb_sources(full, {SourceRelation::pinned({u, 1}, Eigen::VectorXd::Ones(1))});
  out.system.elements = {Element{out.x, std::move(x_law)}, Element{out.r, Quadratic{inst.rho, 0.0}}};
  out.system.validate();
  return out;
}

}  // namespace detail

/// Smoothed 1-norm (Huber) on x, quadratic penalty on r = A x - y.
inline LassoSystem build_lasso_huber(const LassoInstance& inst) {
  return detail::build_lasso(inst, HuberL1{inst.lambda, inst.epsilon});
}

/// Exact 1-norm on x, quadratic augmentation of weight rho on r = A x - y.
inline LassoSystem build_lasso_augmented(const LassoInstance& inst) {
  return detail::build_lasso(inst, SoftThreshold{inst.lambda});
}

/// Fixed point of either LASSO system from a primal minimizer x*:
/// d* = z* + v* with z* = (x*, r*), r* = A x* - y, and v* in the subdifferential
/// at z*. Optimality gives v*_x = -rho A^T r*, v*_r = rho r*.
inline Eigen::VectorXd lasso_fixed_point(const LassoInstance& inst, const Eigen::VectorXd& x) {
  const Index n = inst.A.cols();
  const Index m = inst.A.rows();
  const Eigen::VectorXd r = inst.A * x - inst.y;
  Eigen::VectorXd d(n + m);
  d.head(n) = x - inst.rho * (inst.A.transpose() * r);
  d.tail(m) = (1.0 + inst.rho) * r;
  return d;
}

// ---------------------------------------------------------------------------
// Minimax FIR (linear phase, odd length)

struct FirSpec {
  int num_taps = 15;
  double passband_edge = 0.4 * std::numbers::pi;
  double stopband_edge = 0.6 * std::numbers::pi;
  int grid_size = 128;
  double passband_weight = 1.0;
  double stopband_weight = 1.0;

  void validate() const {
    if (num_taps < 1 || num_taps % 2 == 0) throw ConfigError("fir: num_taps must be a positive odd integer");
    if (!(passband_edge > 0.0 && passband_edge < stopband_edge && stopband_edge < std::numbers::pi)) {
      throw ConfigError("fir: band edges must satisfy 0 < passband_edge < stopband_edge < pi");
    }
    if (grid_size < 2) throw ConfigError("fir: grid_size must be >= 2");
    if (!(passband_weight > 0.0) || !(stopband_weight > 0.0)) throw ConfigError("fir: band weights must be > 0");
  }

  /// Number of cosine coefficients (center tap plus one per symmetric pair).
  int coefficients() const { return (num_taps + 1) / 2; }
};

/// Frequencies, desired amplitudes and weights the error is measured on.
struct FirGrid {
  std::vector<double> frequency;
  std::vector<double> desired;
  std::vector<double> weight;

  Index size() const { return static_cast<Index>(frequency.size()); }

  void validate() const {
    if (frequency.empty()) throw ConfigError("fir: empty grid");
    if (desired.size() != frequency.size() || weight.size() != frequency.size()) {
      throw ConfigError("fir: grid vectors have mismatched lengths");
    }
    for (std::size_t i = 0; i < frequency.size(); ++i) {
      if (!std::isfinite(frequency[i]) || !std::isfinite(desired[i]) || !(weight[i] > 0.0)) {
        throw ConfigError("fir: grid entry " + std::to_string(i) + " is invalid");
      }
    }
  }

  FirGrid slice(Index first, Index count) const {
    FirGrid g;
    g.frequency.assign(frequency.begin() + first, frequency.begin() + first + count);
    g.desired.assign(desired.begin() + first, desired.begin() + first + count);
    g.weight.assign(weight.begin() + first, weight.begin() + first + count);
    return g;
  }
};

/// Equally spaced points on [0, wp] and [ws, pi], split in proportion to the
/// band widths.
inline FirGrid design_grid(const FirSpec& spec) {
  spec.validate();
  const double pass_w = spec.passband_edge;
  const double stop_w = std::numbers::pi - spec.stopband_edge;
  int n_pass = static_cast<int>(std::lround(spec.grid_size * pass_w / (pass_w + stop_w)));
  n_pass = std::clamp(n_pass, 1, spec.grid_size - 1);
  const int n_stop = spec.grid_size - n_pass;
  FirGrid g;
  auto band = [&](double lo, double hi, int count, double want, double w) {
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      g.frequency.push_back(lo + t * (hi - lo));
      g.desired.push_back(want);
      g.weight.push_back(w);
    }
  };
  band(0.0, spec.passband_edge, n_pass, 1.0, spec.passband_weight);
  band(spec.stopband_edge, std::numbers::pi, n_stop, 0.0, spec.stopband_weight);
  return g;
}

/// Passband points come first in design_grid; this is their count.
inline Index passband_points(const FirGrid& grid) {
  Index k = 0;
  while (k < grid.size() && grid.desired[static_cast<std::size_t>(k)] == 1.0) ++k;
  return k;
}

/// C(j, k) = cos(k w_j), k = 0..coefficients-1.
inline Eigen::MatrixXd cosine_matrix(const FirGrid& grid, int coefficients) {
  Eigen::MatrixXd c(grid.size(), coefficients);
  for (Index j = 0; j < grid.size(); ++j)
    for (int k = 0; k < coefficients; ++k) c(j, k) = std::cos(k * grid.frequency[static_cast<std::size_t>(j)]);
  return c;
}

/// Weighted error W (C a - D) on the grid.
inline Eigen::VectorXd grid_errors(const FirGrid& grid, const Eigen::VectorXd& coeffs) {
  const Eigen::MatrixXd c = cosine_matrix(grid, static_cast<int>(coeffs.size()));
  Eigen::VectorXd e = c * coeffs;
  for (Index j = 0; j < grid.size(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    e(j) = grid.weight[js] * (e(j) - grid.desired[js]);
  }
  return e;
}

inline double max_grid_error(const FirGrid& grid, const Eigen::VectorXd& coeffs) {
  return grid_errors(grid, coeffs).cwiseAbs().maxCoeff();
}

/// Symmetric impulse response from cosine coefficients:
/// h[M] = a0, h[M +- k] = a_k / 2.
inline Eigen::VectorXd fir_taps(const Eigen::VectorXd& coeffs) {
  const Index m = coeffs.size() - 1;
  Eigen::VectorXd h(2 * m + 1);
  h(m) = coeffs(0);
  for (Index k = 1; k <= m; ++k) h(m - k) = h(m + k) = 0.5 * coeffs(k);
  return h;
}

/// Counts sign alternations among grid points whose error magnitude is within
/// `tol` of `level`, scanning in grid order.
inline int count_alternations(const Eigen::VectorXd& errors, double level, double tol) {
  int count = 0;
  int last = 0;
  for (Index j = 0; j < errors.size(); ++j) {
    if (std::abs(errors(j)) >= level - tol) {
      const int s = errors(j) > 0 ? 1 : -1;
      if (s != last) {
        ++count;
        last = s;
      }
    }
  }
  return count;
}

struct FirSystem {
  System system;
  FirGrid grid;
  BlockIndex coeffs;
  BlockIndex epigraph;  // grid errors then delta

  Eigen::VectorXd coefficients(const Eigen::VectorXd& d) const {
    return prox_point(system, d).segment(coeffs.offset, coeffs.length);
  }
  double delta(const Eigen::VectorXd& d) const { return prox_point(system, d)(epigraph.end() - 1); }
};

namespace detail {

/// Constraint rows e = W (C a - D u), delta copies equal delta.
inline LinearConstraint fir_constraint(const FirGrid& grid, int nc, const std::vector<Index>& coeff_idx, Index delta,
                                       Index pin, Index error_first, const std::vector<Index>& delta_copies) {
  const Index ng = grid.size();
  LinearConstraint con;
  con.independent = coeff_idx;
  con.independent.push_back(delta);
  con.independent.push_back(pin);
  con.dependent = iota_indices(error_first, ng);
  con.dependent.insert(con.dependent.end(), delta_copies.begin(), delta_copies.end());
  const Index nd = ng + static_cast<Index>(delta_copies.size());
  con.coupling = Eigen::MatrixXd::Zero(nd, nc + 2);
  const Eigen::MatrixXd c = cosine_matrix(grid, nc);
  for (Index j = 0; j < ng; ++j) {
    const auto js = static_cast<std::size_t>(j);
    con.coupling.row(j).head(nc) = grid.weight[js] * c.row(j);
    con.coupling(j, nc + 1) = -grid.weight[js] * grid.desired[js];
  }
  for (Index k = ng; k < nd; ++k) con.coupling(k, nc) = 1.0;
  return con;
}

}  // namespace detail

/// min delta s.t. |W (C a - D)| <= delta on the grid. The unit cost on delta
/// rides on an absorbed copy of delta.
inline FirSystem build_minimax_fir(const FirGrid& grid, int num_taps, double delta_cost = 1.0) {
  grid.validate();
  if (num_taps < 1 || num_taps % 2 == 0) throw ConfigError("fir: num_taps must be a positive odd integer");
  const int nc = (num_taps + 1) / 2;
  const Index ng = grid.size();
  // Layout: a | e | delta | delta copy (cost source) | u (pinned source)
  const Index delta = nc + ng;
  const Index cost_copy = delta + 1;
  const Index pin = delta + 2;
  const LinearConstraint con =
      detail::fir_constraint(grid, nc, detail::iota_indices(0, nc), delta, pin, nc, {cost_copy});
  const AffineInterconnection full = assemble_interconnection({con}, pin + 1);

  FirSystem out;
  out.grid = grid;
  out.coeffs = {0, nc};
  out.epigraph = {nc, ng + 1};
  out.system.interconnection = absorb_sources(
      full, {SourceRelation::linear_cost({cost_copy, 1}, Eigen::VectorXd::Constant(1, delta_cost)),
             SourceRelation::pinned({pin, 1}, Eigen::VectorXd::Ones(1))});
  out.system.elements = {Element{out.coeffs, Quadratic{0.0, 0.0}}, Element{out.epigraph, LinfEpigraph{}}};
  out.system.validate();
  return out;
}

inline FirSystem build_minimax_fir(const FirSpec& spec) { return build_minimax_fir(design_grid(spec), spec.num_taps); }

struct SplitFirSystem {
  System system;
  FirGrid first_grid;
  FirGrid second_grid;
  Index coefficient_count = 0;
  BlockIndex coupling;  // interleaved (first, second) copies: coefficients then delta
  BlockIndex first_epigraph;
  BlockIndex second_epigraph;

  Eigen::VectorXd first_copy(const Eigen::VectorXd& d) const { return copy(d, 0); }
  Eigen::VectorXd second_copy(const Eigen::VectorXd& d) const { return copy(d, 1); }
  Eigen::VectorXd coefficients(const Eigen::VectorXd& d) const { return 0.5 * (first_copy(d) + second_copy(d)); }
  /// max |first - second| over the shared coefficients.
  double copy_gap(const Eigen::VectorXd& d) const { return (first_copy(d) - second_copy(d)).cwiseAbs().maxCoeff(); }

 private:
  Eigen::VectorXd copy(const Eigen::VectorXd& d, Index which) const {
    const Eigen::VectorXd x = prox_point(system, d);
    Eigen::VectorXd a(coefficient_count);
    for (Index k = 0; k < coefficient_count; ++k) a(k) = x(coupling.offset + 2 * k + which);
    return a;
  }
};

/// Two interconnections over two sub-grids, each with its own copy of the
/// coefficients and of delta, tied by PairCoupling elements of weight 1/rho.
/// Small rho ties the copies tightly; rho = +inf decouples them.
inline SplitFirSystem build_minimax_fir_split(const FirGrid& first, const FirGrid& second, int num_taps, double rho,
                                              double delta_cost = 1.0) {
  first.validate();
  second.validate();
  if (num_taps < 1 || num_taps % 2 == 0) throw ConfigError("fir: num_taps must be a positive odd integer");
  if (!(rho > 0.0)) throw ConfigError("fir split: rho must be > 0");
  const int nc = (num_taps + 1) / 2;
  const double weight = std::isinf(rho) ? 0.0 : 1.0 / rho;
  const Index n1 = first.size();
  const Index n2 = second.size();

  // Layout: coupling pairs (a1_k, a2_k)..., (delta1', delta2') | e1, delta1 | e2, delta2 |
  //         cost copies c1, c2 | pins u1, u2
  const Index pairs = nc + 1;
  const Index e1 = 2 * pairs;
  const Index delta1 = e1 + n1;
  const Index e2 = delta1 + 1;
  const Index delta2 = e2 + n2;
  const Index cost1 = delta2 + 1;
  const Index cost2 = cost1 + 1;
  const Index pin1 = cost2 + 1;
  const Index pin2 = pin1 + 1;
  std::vector<Index> a1, a2;
  for (Index k = 0; k < nc; ++k) {
    a1.push_back(2 * k);
    a2.push_back(2 * k + 1);
  }
  const Index link1 = 2 * nc;
  const Index link2 = 2 * nc + 1;
  const LinearConstraint con1 = detail::fir_constraint(first, nc, a1, delta1, pin1, e1, {link1, cost1});
  const LinearConstraint con2 = detail::fir_constraint(second, nc, a2, delta2, pin2, e2, {link2, cost2});
  const AffineInterconnection full = assemble_interconnection({con1, con2}, pin2 + 1);

  SplitFirSystem out;
  out.first_grid = first;
  out.second_grid = second;
  out.coefficient_count = nc;
  out.coupling = {0, 2 * pairs};
  out.first_epigraph = {e1, n1 + 1};
  out.second_epigraph = {e2, n2 + 1};
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(1, 0.5 * delta_cost);
  out.system.interconnection = absorb_sources(
      full, {SourceRelation::linear_cost({cost1, 1}, half), SourceRelation::linear_cost({cost2, 1}, half),
             SourceRelation::pinned({pin1, 1}, Eigen::VectorXd::Ones(1)),
             SourceRelation::pinned({pin2, 1}, Eigen::VectorXd::Ones(1))});
  out.system.elements = {Element{out.coupling, PairCoupling{weight}}, Element{out.first_epigraph, LinfEpigraph{}},
                         Element{out.second_epigraph, LinfEpigraph{}}};
  out.system.validate();
  return out;
}

/// Passband and stopband halves of the design grid.
inline SplitFirSystem build_minimax_fir_split(const FirSpec& spec, double rho) {
  const FirGrid grid = design_grid(spec);
  const Index np = passband_points(grid);
  return build_minimax_fir_split(grid.slice(0, np), grid.slice(np, grid.size() - np), spec.num_taps, rho);
}

// ---------------------------------------------------------------------------
// Decentralized SVM

struct SvmInstance {
  Eigen::MatrixXd features;  // one row per agent
  Eigen::VectorXd labels;    // +-1
  Graph graph;
  double rho = 0.01;  // coupling softness; element weight is 1/rho
  double C = 1.0;

  Index agents() const { return features.rows(); }
  Index dim() const { return features.cols(); }

  void validate() const {
    if (features.rows() < 2 || features.cols() < 1) throw ConfigError("svm: need at least two agents with features");
    if (labels.size() != features.rows()) throw ConfigError("svm: one label per agent required");
    detail::require_finite(features, "svm: features");
    for (Index i = 0; i < labels.size(); ++i) {
      if (labels(i) != 1.0 && labels(i) != -1.0) throw ConfigError("svm: labels must be +1 or -1");
    }
    if (graph.nodes != features.rows()) throw ConfigError("svm: graph node count must equal agent count");
    for (const auto& [i, j] : graph.edges) {
      if (i < 0 || j < 0 || i >= graph.nodes || j >= graph.nodes || i == j) throw ConfigError("svm: invalid edge");
    }
    if (!graph.is_connected()) throw ConfigError("svm: communication graph is disconnected");
    if (!(rho > 0.0)) throw ConfigError("svm: rho must be > 0");
    if (!(C >= 0.0) || !std::isfinite(C)) throw ConfigError("svm: C must be >= 0");
  }
};

/// Two Gaussian blobs centred at +-(separation/2) sigma on the first axis,
/// labels alternating +1, -1, on a circulant 4-regular graph.
inline SvmInstance make_svm_instance(int agents = 30, std::uint64_t seed = 7, double separation = 4.0,
                                     double rho = 0.01, double C = 1.0, int degree = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SvmInstance inst;
  inst.features.resize(agents, 2);
  inst.labels.resize(agents);
  for (int i = 0; i < agents; ++i) {
    const double y = i % 2 == 0 ? 1.0 : -1.0;
    inst.labels(i) = y;
    inst.features(i, 0) = gauss(rng) + 0.5 * separation * y;
    inst.features(i, 1) = gauss(rng);
  }
  inst.graph = make_regular_graph(agents, degree);
  inst.rho = rho;
  inst.C = C;
  return inst;
}

struct SvmSystem {
  System system;
  Index agents = 0;
  Index dim = 0;
  BlockIndex weights;  // agent-major w_i
  BlockIndex biases;
  BlockIndex margins;
  BlockIndex coupling;

  /// Local (w_i, b_i) per agent, one row each.
  Eigen::MatrixXd local_models(const Eigen::VectorXd& d) const {
    const Eigen::VectorXd x = prox_point(system, d);
    Eigen::MatrixXd out(agents, dim + 1);
    for (Index i = 0; i < agents; ++i) {
      out.row(i).head(dim) = x.segment(weights.offset + i * dim, dim).transpose();
      out(i, dim) = x(biases.offset + i);
    }
    return out;
  }

  /// Average of the local models.
  Eigen::VectorXd consensus_model(const Eigen::VectorXd& d) const { return local_models(d).colwise().mean().transpose(); }

  /// Largest coordinate disagreement across graph edges.
  double consensus_gap(const Eigen::VectorXd& d, const Graph& graph) const {
    const Eigen::MatrixXd m = local_models(d);
    double gap = 0.0;
    for (const auto& [i, j] : graph.edges) gap = std::max(gap, (m.row(i) - m.row(j)).cwiseAbs().maxCoeff());
    return gap;
  }
};

/// Per agent: Quadratic(1/N) on w_i, free b_i, Hinge(C) on the margin
/// z_i = y_i (w_i . x_i + b_i), and one copy of (w_i, b_i) per incident edge.
/// Each graph edge couples the two endpoint copies with PairCoupling(1/rho).
/// Every agent owns a separate interconnection.
inline SvmSystem build_svm_decentralized(const SvmInstance& inst) {
  inst.validate();
  const Index n = inst.agents();
  const Index p = inst.dim();
  const Index q = p + 1;  // coordinates shared per edge
  const auto edges = static_cast<Index>(inst.graph.edges.size());

  SvmSystem out;
  out.agents = n;
  out.dim = p;
  out.weights = {0, n * p};
  out.biases = {n * p, n};
  out.margins = {n * p + n, n};
  out.coupling = {n * p + 2 * n, 2 * q * edges};
  const Index total = out.coupling.end();

  // Copy slots per agent, in edge order.
  std::vector<std::vector<Index>> copies(static_cast<std::size_t>(n));
  for (Index e = 0; e < edges; ++e) {
    const auto [i, j] = inst.graph.edges[static_cast<std::size_t>(e)];
    for (Index k = 0; k < q; ++k) {
      const Index slot = out.coupling.offset + 2 * (e * q + k);
      copies[static_cast<std::size_t>(i)].push_back(slot);
      copies[static_cast<std::size_t>(j)].push_back(slot + 1);
    }
  }

  std::vector<LinearConstraint> cons;
  cons.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    LinearConstraint con;
    con.independent = detail::iota_indices(out.weights.offset + i * p, p);
    con.independent.push_back(out.biases.offset + i);
    con.dependent.push_back(out.margins.offset + i);
    const auto& mine = copies[static_cast<std::size_t>(i)];
    con.dependent.insert(con.dependent.end(), mine.begin(), mine.end());
    con.coupling = Eigen::MatrixXd::Zero(static_cast<Index>(con.dependent.size()), q);
    const double y = inst.labels(i);
    con.coupling.row(0).head(p) = y * inst.features.row(i);
    con.coupling(0, p) = y;
    for (std::size_t c = 0; c < mine.size(); ++c) con.coupling(static_cast<Index>(c) + 1, static_cast<Index>(c) % q) = 1.0;
    cons.push_back(std::move(con));
  }

  out.system.interconnection = assemble_interconnection(cons, total);
  out.system.elements = {Element{out.weights, Quadratic{1.0 / static_cast<double>(n), 0.0}},
                         Element{out.biases, Quadratic{0.0, 0.0}}, Element{out.margins, Hinge{inst.C}},
                         Element{out.coupling, PairCoupling{1.0 / inst.rho}}};
  out.system.validate();
  return out;
}

inline Eigen::VectorXd svm_predict(const Eigen::MatrixXd& features, const Eigen::VectorXd& model) {
  const Index p = features.cols();
  Eigen::VectorXd out(features.rows());
  for (Index i = 0; i < features.rows(); ++i) {
    out(i) = features.row(i).dot(model.head(p)) + model(p) >= 0.0 ? 1.0 : -1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse equalizer (nonconvex)

struct EqualizerInstance {
  Eigen::VectorXd response;  // channel impulse response g
  int taps = 16;
  int delay = 0;
  Eigen::VectorXd upper;  // envelope on the output error, per output sample
  Eigen::VectorXd lower;
  double rho = 0.1;  // CappedL1 plateau height
  double notch_width = 0.05;
  double rho_upper = 0.1;
  double rho_lower = 10.0;

  Index outputs() const { return response.size() + taps - 1; }

  /// Full-length convolution matrix (outputs x taps).
  Eigen::MatrixXd convolution() const {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(outputs(), taps);
    for (int j = 0; j < taps; ++j) c.block(j, j, response.size(), 1) = response;
    return c;
  }

  Eigen::VectorXd target() const {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(outputs());
    t(delay) = 1.0;
    return t;
  }

  void validate() const {
    if (response.size() < 1 || taps < 1) throw ConfigError("equalizer: empty response or tap count");
    if (delay < 0 || delay >= outputs()) throw ConfigError("equalizer: delay outside the output range");
    if (upper.size() != outputs() || lower.size() != outputs()) {
      throw ConfigError("equalizer: envelope must have " + std::to_string(outputs()) + " entries");
    }
    detail::require_finite(response, "equalizer: response");
    for (Index i = 0; i < outputs(); ++i) {
      if (!(lower(i) <= 0.0 && 0.0 <= upper(i))) {
        throw ConfigError("equalizer: envelope excludes the target at output " + std::to_string(i));
      }
    }
    if (!(notch_width > 0.0)) throw ConfigError("equalizer: notch_width must be > 0");
    if (!(rho >= 0.0) || !(rho_upper >= 0.0) || !(rho_lower >= 0.0)) {
      throw ConfigError("equalizer: weights must be >= 0");
    }
  }
};

/// Decaying response of a filter with zeros at 0.5, -0.4, 0.3 driven through
/// a one-pole smoother (pole 0.7), truncated to `length` and normalized.
inline Eigen::VectorXd synthetic_response(int length = 32) {
  std::vector<double> h{1.0};
  for (double z : {0.5, -0.4, 0.3}) {
    std::vector<double> next(h.size() + 1, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
      next[i] += h[i];
      next[i + 1] -= z * h[i];
    }
    h = std::move(next);
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(length);
  for (int n = 0; n < length; ++n) {
    double acc = 0.0;
    for (int k = 0; k <= n && k < static_cast<int>(h.size()); ++k) acc += h[static_cast<std::size_t>(k)] * std::pow(0.7, n - k);
    g(n) = acc;
  }
  return g / g.norm();
}

inline EqualizerInstance make_equalizer_instance(Eigen::VectorXd response, int taps = 16, double envelope = 0.1) {
  EqualizerInstance inst;
  inst.response = std::move(response);
  inst.taps = taps;
  inst.upper = Eigen::VectorXd::Constant(inst.outputs(), envelope);
  inst.lower = Eigen::VectorXd::Constant(inst.outputs(), -envelope);
  return inst;
}

struct EqualizerSystem {
  System system;
  BlockIndex taps;
  BlockIndex upper_error;
  BlockIndex lower_error;

  Eigen::VectorXd equalizer(const Eigen::VectorXd& d) const {
    return prox_point(system, d).segment(taps.offset, taps.length);
  }
};

/// CappedL1 on the taps; two copies of the output error r = g * x - target,
/// one penalized above u+, the other below u-.
inline EqualizerSystem build_sparse_equalizer(const EqualizerInstance& inst) {
  inst.validate();
  const Index nx = inst.taps;
  const Index ny = inst.outputs();
  const Index pin = nx + 2 * ny;
  LinearConstraint con;
  con.independent = detail::iota_indices(0, nx);
  con.independent.push_back(pin);
  con.dependent = detail::iota_indices(nx, 2 * ny);
  const Eigen::MatrixXd conv = inst.convolution();
  const Eigen::VectorXd target = inst.target();
  con.coupling.resize(2 * ny, nx + 1);
  con.coupling << conv, -target, conv, -target;

  const AffineInterconnection full = assemble_interconnection({con}, pin + 1);
  EqualizerSystem out;
  out.taps = {0, nx};
  out.upper_error = {nx, ny};
  out.lower_error = {nx + ny, ny};
  out.system.interconnection = absorb_sources(full, {SourceRelation::pinned({pin, 1}, Eigen::VectorXd::Ones(1))});
  auto as_vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  out.system.elements = {
      Element{out.taps, CappedL1{inst.rho, inst.notch_width}},
      Element{out.upper_error, OneSidedPenalty{inst.rho_upper, as_vec(inst.upper), prox::Side::upper}},
      Element{out.lower_error, OneSidedPenalty{inst.rho_lower, as_vec(inst.lower), prox::Side::lower}}};
  out.system.validate();
  return out;
}

}  // namespace fpnet
