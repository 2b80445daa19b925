#pragma once

// Primal/dual variable pairs and the invertible 2x2 mixing that turns them
// into the (c, d) wave-like variables the iteration runs on.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fpnet/error.hpp"

namespace fpnet {

using Index = Eigen::Index;

struct DecisionPair {
  double a = 0.0;  // primal
  double b = 0.0;  // dual
};

struct TransformedPair {
  double c = 0.0;
  double d = 0.0;
};

/// Invertible 2x2 map (a, b) -> (c, d). The inverse is computed once at
/// construction; singular matrices are rejected there.
class PairTransform {
 public:
  PairTransform(double m11, double m12, double m21, double m22)
      : m11_(m11), m12_(m12), m21_(m21), m22_(m22) {
    const double det = m11 * m22 - m12 * m21;
    const double scale = std::abs(m11) + std::abs(m12) + std::abs(m21) + std::abs(m22);
    if (!std::isfinite(det) || !(std::abs(det) > 1e-14 * scale * scale)) {
      throw ConfigError("PairTransform: matrix is singular (det = " + std::to_string(det) + ")");
    }
    i11_ = m22 / det;
    i12_ = -m12 / det;
    i21_ = -m21 / det;
    i22_ = m11 / det;
  }

  /// (1/sqrt2) [[1, 1], [1, -1]]: orthonormal and its own inverse.
  static PairTransform canonical() {
    const double h = 1.0 / std::sqrt(2.0);
    return {h, h, h, -h};
  }

  static PairTransform identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double m11() const { return m11_; }
  double m12() const { return m12_; }
  double m21() const { return m21_; }
  double m22() const { return m22_; }

  double determinant() const { return m11_ * m22_ - m12_ * m21_; }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << m11_, m12_, m21_, m22_;
    return m;
  }

  bool is_orthonormal(double tol = 1e-12) const {
    const Eigen::Matrix2d m = matrix();
    return ((m.transpose() * m) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= tol;
  }

  TransformedPair forward(DecisionPair p) const {
    return {m11_ * p.a + m12_ * p.b, m21_ * p.a + m22_ * p.b};
  }

  DecisionPair backward(TransformedPair t) const {
    return {i11_ * t.c + i12_ * t.d, i21_ * t.c + i22_ * t.d};
  }

 private:
  double m11_, m12_, m21_, m22_;
  double i11_, i12_, i21_, i22_;
};

inline TransformedPair transform(DecisionPair pair, const PairTransform& m) { return m.forward(pair); }

inline DecisionPair inverse_transform(TransformedPair tp, const PairTransform& m) { return m.backward(tp); }

/// Contiguous coordinate range [offset, offset + length) in a system vector.
struct BlockIndex {
  Index offset = 0;
  Index length = 0;

  Index end() const { return offset + length; }
  bool operator==(const BlockIndex&) const = default;
};

inline void check_block(const BlockIndex& block, Index size) {
  if (block.offset < 0 || block.length <= 0 || block.end() > size) {
    throw ConfigError("block [" + std::to_string(block.offset) + ", " + std::to_string(block.end()) +
                      ") does not fit a vector of size " + std::to_string(size));
  }
}

inline Eigen::VectorXd gather(const BlockIndex& block, const Eigen::VectorXd& v) {
  check_block(block, v.size());
  return v.segment(block.offset, block.length);
}

inline Eigen::VectorXd scatter(const BlockIndex& block, const Eigen::VectorXd& sub, Eigen::VectorXd v) {
  check_block(block, v.size());
  if (sub.size() != block.length) {
    throw ConfigError("scatter: sub-vector length " + std::to_string(sub.size()) + " != block length " +
                      std::to_string(block.length));
  }
  v.segment(block.offset, block.length) = sub;
  return v;
}

/// Throws unless every coordinate in [0, size) belongs to exactly one block.
template <typename Range>
void check_partition(const Range& blocks, Index size) {
  std::vector<int> owner(static_cast<std::size_t>(size), 0);
  for (const BlockIndex& b : blocks) {
    check_block(b, size);
    for (Index i = b.offset; i < b.end(); ++i) {
      if (++owner[static_cast<std::size_t>(i)] > 1) {
        throw ConfigError("coordinate " + std::to_string(i) + " is claimed by more than one block");
      }
    }
  }
  for (Index i = 0; i < size; ++i) {
    if (owner[static_cast<std::size_t>(i)] == 0) {
      throw ConfigError("coordinate " + std::to_string(i) + " is not covered by any block");
    }
  }
}

}  // namespace fpnet
