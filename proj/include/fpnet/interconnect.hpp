#pragma once

// Orthonormal ("neutral") linear interconnection d = G c + s.
//
// A linear constraint a_dep = A a_ind between primal variables, together with
// the matching dual constraint b_ind = -A^T b_dep, is a lossless relation. In
// the scattering variables c = (a + b)/sqrt2, d = (a - b)/sqrt2 it becomes
//
//   G = J (I + S)(I - S)^{-1},   S = [[0, A^T], [-A, 0]],
//
// where J = diag(+I, -I) flips the dependent coordinates. G equals the
// reflection 2P - I across the constraint subspace, so it is orthonormal
// and symmetric.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fpnet/error.hpp"
#include "fpnet/pair_transform.hpp"

namespace fpnet {

/// Skew-symmetric matrix, validated at construction.
class SkewCore {
 public:
  explicit SkewCore(Eigen::MatrixXd s, double tol = 1e-12) : s_(std::move(s)) {
    if (s_.rows() != s_.cols()) {
      throw ConfigError("SkewCore: matrix is " + std::to_string(s_.rows()) + "x" + std::to_string(s_.cols()) +
                        ", expected square");
    }
    for (Index i = 0; i < s_.rows(); ++i) {
      for (Index j = i; j < s_.cols(); ++j) {
        const double sum = s_(i, j) + s_(j, i);
        if (!(std::abs(sum) < tol) || !std::isfinite(s_(i, j))) {
          throw ConfigError("SkewCore: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") breaks skew symmetry: S(i,j) + S(j,i) = " + std::to_string(sum));
        }
      }
    }
  }

  /// [[0, A^T], [-A, 0]] for a constraint matrix A (dependent x independent).
  static SkewCore from_constraints(const Eigen::MatrixXd& a) {
    const Index ni = a.cols();
    const Index nd = a.rows();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ni + nd, ni + nd);
    s.topRightCorner(ni, nd) = a.transpose();
    s.bottomLeftCorner(nd, ni) = -a;
    return SkewCore(std::move(s));
  }

  const Eigen::MatrixXd& matrix() const { return s_; }
  Index size() const { return s_.rows(); }

 private:
  Eigen::MatrixXd s_;
};

/// Cayley transform (I + S)(I - S)^{-1}. The two factors commute, so this is
/// evaluated as a single solve against (I - S), which is nonsingular for any
/// skew S.
inline Eigen::MatrixXd cayley(const SkewCore& core) {
  const Index n = core.size();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  return (eye - core.matrix()).partialPivLu().solve(eye + core.matrix());
}

struct OrthonormalityReport {
  double max_deviation = 0.0;
  bool pass = false;
};

inline OrthonormalityReport check_orthonormal(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols()) {
    throw ConfigError("check_orthonormal: matrix is not square");
  }
  const Eigen::MatrixXd dev = g.transpose() * g - Eigen::MatrixXd::Identity(g.rows(), g.cols());
  OrthonormalityReport r;
  r.max_deviation = g.size() == 0 ? 0.0 : dev.cwiseAbs().maxCoeff();
  r.pass = r.max_deviation <= tol;
  return r;
}

/// d = G c + s. `neutral` is cleared when a lossy source was absorbed, in
/// which case G need not be orthonormal.
struct AffineInterconnection {
  Eigen::MatrixXd G;
  Eigen::VectorXd s;
  bool neutral = true;

  Index size() const { return G.rows(); }

  static AffineInterconnection linear(Eigen::MatrixXd g) {
    const Index n = g.rows();
    return {std::move(g), Eigen::VectorXd::Zero(n), true};
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& c) const {
    if (c.size() != G.cols()) {
      throw ConfigError("interconnection apply: input has " + std::to_string(c.size()) + " coordinates, expected " +
                        std::to_string(G.cols()));
    }
    return G * c + s;
  }
};

inline Eigen::VectorXd apply(const AffineInterconnection& ic, const Eigen::VectorXd& c) { return ic.apply(c); }

/// Linear constraint among global coordinates: a[dependent] = coupling * a[independent].
struct LinearConstraint {
  std::vector<Index> independent;
  std::vector<Index> dependent;
  Eigen::MatrixXd coupling;  // dependent.size() x independent.size()
};

/// Local orthonormal map of one constraint, ordered (independent, dependent).
inline Eigen::MatrixXd constraint_map(const Eigen::MatrixXd& coupling) {
  Eigen::MatrixXd g = cayley(SkewCore::from_constraints(coupling));
  g.bottomRows(coupling.rows()) *= -1.0;
  return g;
}

/// Direct sum of the constraint maps, scattered into an n-coordinate system.
/// Every coordinate must appear in exactly one constraint.
inline AffineInterconnection assemble_interconnection(const std::vector<LinearConstraint>& constraints, Index n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& con : constraints) {
    const auto ni = static_cast<Index>(con.independent.size());
    const auto nd = static_cast<Index>(con.dependent.size());
    if (con.coupling.rows() != nd || con.coupling.cols() != ni) {
      throw ConfigError("constraint coupling is " + std::to_string(con.coupling.rows()) + "x" +
                        std::to_string(con.coupling.cols()) + ", expected " + std::to_string(nd) + "x" +
                        std::to_string(ni));
    }
    std::vector<Index> idx(con.independent);
    idx.insert(idx.end(), con.dependent.begin(), con.dependent.end());
    for (Index i : idx) {
      if (i < 0 || i >= n) throw ConfigError("constraint references coordinate " + std::to_string(i) + " out of range");
      if (seen[static_cast<std::size_t>(i)]++ != 0) {
        throw ConfigError("coordinate " + std::to_string(i) + " appears in more than one constraint");
      }
    }
    const Eigen::MatrixXd local = constraint_map(con.coupling);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        g(idx[r], idx[c]) = local(static_cast<Index>(r), static_cast<Index>(c));
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)] == 0) {
      throw ConfigError("coordinate " + std::to_string(i) + " is not attached to any constraint");
    }
  }
  return AffineInterconnection::linear(std::move(g));
}

/// Affine constitutive relation c_block = gain * d_block + offset.
struct SourceRelation {
  BlockIndex block;
  Eigen::MatrixXd gain;
  Eigen::VectorXd offset;

  bool lossless(double tol = 1e-12) const { return check_orthonormal(gain, tol).pass; }

  /// c = 2 v - d: the element that pins its primal variable to v.
  static SourceRelation pinned(BlockIndex block, const Eigen::VectorXd& value) {
    return {block, -Eigen::MatrixXd::Identity(block.length, block.length), 2.0 * value};
  }

  /// c = d - 2 w: linear cost w^T x on the block.
  static SourceRelation linear_cost(BlockIndex block, const Eigen::VectorXd& weight) {
    return {block, Eigen::MatrixXd::Identity(block.length, block.length), -2.0 * weight};
  }
};

/// Solve the delay-free loop through the source coordinates and fold it into
/// the interconnection. The result acts on the remaining coordinates, which
/// keep their relative order.
inline AffineInterconnection absorb_sources(const AffineInterconnection& ic, const std::vector<SourceRelation>& sources) {
  if (sources.empty()) return ic;
  const Index n = ic.size();

  std::vector<char> is_source(static_cast<std::size_t>(n), 0);
  std::vector<Index> src;
  for (const auto& so : sources) {
    check_block(so.block, n);
    if (so.gain.rows() != so.block.length || so.gain.cols() != so.block.length || so.offset.size() != so.block.length) {
      throw ConfigError("source at offset " + std::to_string(so.block.offset) + " has mismatched gain/offset sizes");
    }
    for (Index i = so.block.offset; i < so.block.end(); ++i) {
      if (is_source[static_cast<std::size_t>(i)]) {
        throw ConfigError("coordinate " + std::to_string(i) + " belongs to two sources");
      }
      is_source[static_cast<std::size_t>(i)] = 1;
      src.push_back(i);
    }
  }
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i) {
    if (!is_source[static_cast<std::size_t>(i)]) keep.push_back(i);
  }

  const auto ns = static_cast<Index>(src.size());
  const auto nk = static_cast<Index>(keep.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd g(ns);
  {
    Index at = 0;
    for (const auto& so : sources) {
      f.block(at, at, so.block.length, so.block.length) = so.gain;
      g.segment(at, so.block.length) = so.offset;
      at += so.block.length;
    }
  }
  // `src` lists coordinates source by source, matching the layout of f and g.
  auto sub = [&](const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = ic.G(rows[r], cols[c]);
    return m;
  };
  const Eigen::MatrixXd g_kk = sub(keep, keep);
  const Eigen::MatrixXd g_ks = sub(keep, src);
  const Eigen::MatrixXd g_sk = sub(src, keep);
  const Eigen::MatrixXd g_ss = sub(src, src);
  Eigen::VectorXd s_k(nk), s_s(ns);
  for (Index i = 0; i < nk; ++i) s_k(i) = ic.s(keep[static_cast<std::size_t>(i)]);
  for (Index i = 0; i < ns; ++i) s_s(i) = ic.s(src[static_cast<std::size_t>(i)]);

  // Loop: d_s = G_ss c_s + G_sk c_k + s_s,  c_s = F d_s + g.
  const Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(ns, ns) - f * g_ss;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(loop);
  if (!(lu.rcond() > 1e-12)) {
    Index at = 0;
    for (const auto& so : sources) {
      const Eigen::MatrixXd own = Eigen::MatrixXd::Identity(so.block.length, so.block.length) -
                                  so.gain * g_ss.block(at, at, so.block.length, so.block.length);
      if (!(own.partialPivLu().rcond() > 1e-12)) {
        throw SingularLoopError("source block at offset " + std::to_string(so.block.offset) +
                                " forms a singular algebraic loop with the interconnection");
      }
      at += so.block.length;
    }
    throw SingularLoopError("source blocks jointly form a singular algebraic loop with the interconnection");
  }

  AffineInterconnection out;
  out.G = g_kk + g_ks * lu.solve(f * g_sk);
  out.s = s_k + g_ks * lu.solve(f * s_s + g);
  out.neutral = ic.neutral && std::all_of(sources.begin(), sources.end(), [](const SourceRelation& so) { return so.lossless(); });
  return out;
}

}  // namespace fpnet
