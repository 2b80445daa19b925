#pragma once

// Constitutive relations c = m(d) = 2 prox_f(d) - d, one per cost term f,
// with prox_f(d) = argmin_x 1/2 |x - d|^2 + f(x). The reflected resolvent of
// a convex f is nonexpansive; CappedL1 is the one nonconvex kind.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "fpnet/error.hpp"
#include "fpnet/pair_transform.hpp"

namespace fpnet {

namespace prox {

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// f(x) = (w/2)(x - t)^2
inline double quadratic(double d, double weight, double target) { return (d + weight * target) / (1.0 + weight); }

/// Huber: f(x) = w x^2 / (2 eps) for |x| <= eps, w (|x| - eps/2) beyond.
inline double huber_l1(double d, double weight, double half_width) {
  const double k = weight / half_width;
  if (std::abs(d) <= half_width * (1.0 + k)) return d / (1.0 + k);
  return sign(d) * (std::abs(d) - weight);
}

/// f(x) = w |x|
inline double soft_threshold(double d, double weight) { return sign(d) * std::max(std::abs(d) - weight, 0.0); }

/// f(z) = C max(0, 1 - z)
inline double hinge(double d, double weight) {
  if (d >= 1.0) return d;
  if (d <= 1.0 - weight) return d + weight;
  return 1.0;
}

enum class Side { upper, lower };

/// Upper: f(x) = (w/2) max(0, x - u)^2. Lower mirrors it.
inline double one_sided(double d, double weight, double bound, Side side) {
  const bool inactive = side == Side::upper ? d <= bound : d >= bound;
  return inactive ? d : (d + weight * bound) / (1.0 + weight);
}

/// f(x) = h min(|x| / v, 1). Candidates: stay on the plateau, shrink inside
/// the notch, or stop at the notch edge. Ties go to the smaller magnitude.
inline double capped_l1(double d, double height, double notch_width) {
  const double a = std::abs(d);
  const double s = sign(d);
  auto cost = [&](double x) { return 0.5 * (x - a) * (x - a) + height * std::min(x / notch_width, 1.0); };

  double best = std::min(std::max(a - height / notch_width, 0.0), notch_width);
  double best_cost = cost(best);
  const double edge_cost = cost(notch_width);
  if (edge_cost < best_cost) {
    best = notch_width;
    best_cost = edge_cost;
  }
  if (a >= notch_width && height < best_cost) {
    best = a;
  }
  return s * best;
}

/// Euclidean projection of (e, delta) onto {|e|_inf <= delta}, in place.
/// `block` holds e followed by delta.
inline void linf_epigraph(Eigen::Ref<Eigen::VectorXd> block) {
  const Index n = block.size() - 1;
  const double delta = block(n);
  auto e = block.head(n);
  const double peak = n > 0 ? e.cwiseAbs().maxCoeff() : 0.0;
  if (peak <= delta) return;

  std::vector<double> mags(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(e(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Level t solves t = delta + sum_i (|e_i| - t)_+ ; scan the active count k.
  double level = 0.0;
  double partial = 0.0;
  for (std::size_t k = 1; k <= mags.size(); ++k) {
    partial += mags[k - 1];
    level = (delta + partial) / static_cast<double>(k + 1);
    const double next = k < mags.size() ? mags[k] : -std::numeric_limits<double>::infinity();
    if (level >= next) break;
  }
  level = std::max(level, 0.0);
  for (Index i = 0; i < n; ++i) e(i) = std::clamp(e(i), -level, level);
  block(n) = level;
}

/// f(u, v) = (w/2)(u - v)^2
inline std::pair<double, double> pair_coupling(double u, double v, double weight) {
  const double shift = weight / (1.0 + 2.0 * weight) * (u - v);
  return {u - shift, v + shift};
}

}  // namespace prox

// Reflected maps c = 2 prox(d) - d.

inline double eval_quadratic(double d, double weight, double target) { return 2.0 * prox::quadratic(d, weight, target) - d; }
inline double eval_huber_l1(double d, double weight, double half_width) {
  return 2.0 * prox::huber_l1(d, weight, half_width) - d;
}
inline double eval_soft_threshold(double d, double weight) { return 2.0 * prox::soft_threshold(d, weight) - d; }
inline double eval_hinge(double d, double weight) { return 2.0 * prox::hinge(d, weight) - d; }
inline double eval_one_sided(double d, double weight, double bound, prox::Side side) {
  return 2.0 * prox::one_sided(d, weight, bound, side) - d;
}
inline double eval_capped_l1(double d, double height, double notch_width) {
  return 2.0 * prox::capped_l1(d, height, notch_width) - d;
}
inline Eigen::VectorXd eval_linf_epigraph(const Eigen::VectorXd& d) {
  if (d.size() < 2) throw ConfigError("LinfEpigraph block needs at least one error coordinate plus delta");
  Eigen::VectorXd p = d;
  prox::linf_epigraph(p);
  return 2.0 * p - d;
}
inline Eigen::Vector2d eval_pair_coupling(const Eigen::Vector2d& d, double weight) {
  const auto [pu, pv] = prox::pair_coupling(d(0), d(1), weight);
  return {2.0 * pu - d(0), 2.0 * pv - d(1)};
}

// Element laws. Scalar laws apply coordinatewise across their block.

struct Quadratic {
  double weight = 0.0;
  double target = 0.0;
};
struct HuberL1 {
  double weight = 0.0;
  double half_width = 1.0;
};
struct SoftThreshold {
  double weight = 0.0;
};
/// Block layout: error coordinates, then delta.
struct LinfEpigraph {};
struct Hinge {
  double weight = 0.0;
};
/// Block layout: interleaved pairs (u0, v0, u1, v1, ...).
struct PairCoupling {
  double weight = 0.0;
};
/// One bound per coordinate, or a single bound for the whole block.
struct OneSidedPenalty {
  double weight = 0.0;
  std::vector<double> bounds;
  prox::Side side = prox::Side::upper;
};
struct CappedL1 {
  double height = 0.0;
  double notch_width = 1.0;
};

using ElementLaw =
    std::variant<Quadratic, HuberL1, SoftThreshold, LinfEpigraph, Hinge, PairCoupling, OneSidedPenalty, CappedL1>;

enum class ElementKind { Quadratic, HuberL1, SoftThreshold, LinfEpigraph, Hinge, PairCoupling, OneSidedPenalty, CappedL1 };

inline const char* to_string(ElementKind k) {
  constexpr const char* names[] = {"Quadratic", "HuberL1",        "SoftThreshold", "LinfEpigraph",
                                   "Hinge",     "PairCoupling",   "OneSidedPenalty", "CappedL1"};
  return names[static_cast<int>(k)];
}

struct Element {
  BlockIndex block;
  ElementLaw law;

  ElementKind kind() const { return static_cast<ElementKind>(law.index()); }

  /// Declared dissipativity: true for every convex kind.
  bool dissipative() const { return !std::holds_alternative<CappedL1>(law); }

  /// Throws ConfigError on non-finite or out-of-range parameters.
  void validate() const {
    auto finite_nonneg = [&](double v, const char* what) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ConfigError(std::string(to_string(kind())) + ": " + what + " must be finite and >= 0");
      }
    };
    std::visit(
        [&](const auto& law_) {
          using T = std::decay_t<decltype(law_)>;
          if constexpr (std::is_same_v<T, Quadratic>) {
            finite_nonneg(law_.weight, "weight");
            if (!std::isfinite(law_.target)) throw ConfigError("Quadratic: target must be finite");
          } else if constexpr (std::is_same_v<T, HuberL1>) {
            finite_nonneg(law_.weight, "weight");
            if (!(law_.half_width > 0.0) || !std::isfinite(law_.half_width))
              throw ConfigError("HuberL1: half_width must be > 0");
          } else if constexpr (std::is_same_v<T, SoftThreshold> || std::is_same_v<T, Hinge> ||
                               std::is_same_v<T, PairCoupling>) {
            finite_nonneg(law_.weight, "weight");
            if constexpr (std::is_same_v<T, PairCoupling>) {
              if (block.length % 2 != 0) throw ConfigError("PairCoupling: block length must be even");
            }
          } else if constexpr (std::is_same_v<T, LinfEpigraph>) {
            if (block.length < 2) throw ConfigError("LinfEpigraph: block length must be >= 2");
          } else if constexpr (std::is_same_v<T, OneSidedPenalty>) {
            finite_nonneg(law_.weight, "weight");
            if (law_.bounds.size() != 1 && static_cast<Index>(law_.bounds.size()) != block.length)
              throw ConfigError("OneSidedPenalty: need one bound or one per coordinate");
            for (double b : law_.bounds)
              if (!std::isfinite(b)) throw ConfigError("OneSidedPenalty: bounds must be finite");
          } else if constexpr (std::is_same_v<T, CappedL1>) {
            finite_nonneg(law_.height, "height");
            if (!(law_.notch_width > 0.0) || !std::isfinite(law_.notch_width))
              throw ConfigError("CappedL1: notch_width must be > 0");
          }
        },
        law);
  }

  /// prox_f on a block-sized input, in place.
  void prox_inplace(Eigen::Ref<Eigen::VectorXd> x) const {
    std::visit(
        [&](const auto& law_) {
          using T = std::decay_t<decltype(law_)>;
          const Index n = x.size();
          if constexpr (std::is_same_v<T, Quadratic>) {
            for (Index i = 0; i < n; ++i) x(i) = prox::quadratic(x(i), law_.weight, law_.target);
          } else if constexpr (std::is_same_v<T, HuberL1>) {
            for (Index i = 0; i < n; ++i) x(i) = prox::huber_l1(x(i), law_.weight, law_.half_width);
          } else if constexpr (std::is_same_v<T, SoftThreshold>) {
            for (Index i = 0; i < n; ++i) x(i) = prox::soft_threshold(x(i), law_.weight);
          } else if constexpr (std::is_same_v<T, LinfEpigraph>) {
            prox::linf_epigraph(x);
          } else if constexpr (std::is_same_v<T, Hinge>) {
            for (Index i = 0; i < n; ++i) x(i) = prox::hinge(x(i), law_.weight);
          } else if constexpr (std::is_same_v<T, PairCoupling>) {
            for (Index i = 0; i + 1 < n; i += 2) {
              const auto [pu, pv] = prox::pair_coupling(x(i), x(i + 1), law_.weight);
              x(i) = pu;
              x(i + 1) = pv;
            }
          } else if constexpr (std::is_same_v<T, OneSidedPenalty>) {
            const bool shared = law_.bounds.size() == 1;
            for (Index i = 0; i < n; ++i) {
              const double b = law_.bounds[shared ? 0 : static_cast<std::size_t>(i)];
              x(i) = prox::one_sided(x(i), law_.weight, b, law_.side);
            }
          } else if constexpr (std::is_same_v<T, CappedL1>) {
            for (Index i = 0; i < n; ++i) x(i) = prox::capped_l1(x(i), law_.height, law_.notch_width);
          }
        },
        law);
  }

  /// Reflected map on a block-sized input.
  Eigen::VectorXd reflect(const Eigen::VectorXd& d) const {
    Eigen::VectorXd p = d;
    prox_inplace(p);
    return 2.0 * p - d;
  }

  /// Cost f on a block-sized point (+inf outside an indicator's domain).
  double cost(const Eigen::VectorXd& x) const {
    return std::visit(
        [&](const auto& law_) -> double {
          using T = std::decay_t<decltype(law_)>;
          const Index n = x.size();
          double acc = 0.0;
          if constexpr (std::is_same_v<T, Quadratic>) {
            for (Index i = 0; i < n; ++i) acc += 0.5 * law_.weight * (x(i) - law_.target) * (x(i) - law_.target);
          } else if constexpr (std::is_same_v<T, HuberL1>) {
            for (Index i = 0; i < n; ++i) {
              const double a = std::abs(x(i));
              acc += a <= law_.half_width ? law_.weight * a * a / (2.0 * law_.half_width)
                                          : law_.weight * (a - 0.5 * law_.half_width);
            }
          } else if constexpr (std::is_same_v<T, SoftThreshold>) {
            acc = law_.weight * x.cwiseAbs().sum();
          } else if constexpr (std::is_same_v<T, LinfEpigraph>) {
            const double peak = x.head(n - 1).cwiseAbs().maxCoeff();
            acc = peak <= x(n - 1) * (1.0 + 1e-12) + 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<T, Hinge>) {
            for (Index i = 0; i < n; ++i) acc += law_.weight * std::max(0.0, 1.0 - x(i));
          } else if constexpr (std::is_same_v<T, PairCoupling>) {
            for (Index i = 0; i + 1 < n; i += 2) acc += 0.5 * law_.weight * (x(i) - x(i + 1)) * (x(i) - x(i + 1));
          } else if constexpr (std::is_same_v<T, OneSidedPenalty>) {
            const bool shared = law_.bounds.size() == 1;
            for (Index i = 0; i < n; ++i) {
              const double b = law_.bounds[shared ? 0 : static_cast<std::size_t>(i)];
              const double v = law_.side == prox::Side::upper ? std::max(0.0, x(i) - b) : std::max(0.0, b - x(i));
              acc += 0.5 * law_.weight * v * v;
            }
          } else if constexpr (std::is_same_v<T, CappedL1>) {
            for (Index i = 0; i < n; ++i) acc += law_.height * std::min(std::abs(x(i)) / law_.notch_width, 1.0);
          }
          return acc;
        },
        law);
  }
};

struct DissipativityReport {
  Index samples = 0;
  double max_ratio = 0.0;
  bool pass = false;
};

/// Samples points uniformly in a ball around `center` and records the worst
/// Lipschitz ratio |m(x) - m(y)| / |x - y|, both against the center and
/// between consecutive samples. The second kind catches jumps in the
/// nonconvex prox that a center-only comparison can miss.
inline DissipativityReport dissipativity_probe(const Element& element, const Eigen::VectorXd& center, Index samples,
                                               double radius, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("dissipativity_probe: need at least one sample");
  if (center.size() != element.block.length) {
    throw ConfigError("dissipativity_probe: reference point has " + std::to_string(center.size()) +
                      " coordinates, element block has " + std::to_string(element.block.length));
  }
  const Index n = center.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::VectorXd m_center = element.reflect(center);
  DissipativityReport report;
  report.samples = samples;

  auto ratio = [](const Eigen::VectorXd& dm, const Eigen::VectorXd& dd) {
    const double den = dd.norm();
    return den > 0.0 ? dm.norm() / den : 0.0;
  };

  Eigen::VectorXd prev_x, prev_m;
  for (Index k = 0; k < samples; ++k) {
    Eigen::VectorXd dir(n);
    for (Index i = 0; i < n; ++i) dir(i) = gauss(rng);
    const double len = dir.norm();
    if (len == 0.0) continue;
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
    const Eigen::VectorXd x = center + (r / len) * dir;
    const Eigen::VectorXd mx = element.reflect(x);
    report.max_ratio = std::max(report.max_ratio, ratio(mx - m_center, x - center));
    if (k > 0) report.max_ratio = std::max(report.max_ratio, ratio(mx - prev_m, x - prev_x));
    prev_x = x;
    prev_m = mx;
  }
  report.pass = report.max_ratio <= 1.0 + 1e-10;
  return report;
}

}  // namespace fpnet
