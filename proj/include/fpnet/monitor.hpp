#pragma once

// Convergence instrumentation around a reference fixed point d*.
//
// With c* = m(d*) and d* = G c* + s, a perturbed input d = d* + e gives
//   c' = m(d* + e) - c*,    d_D = G c'.
// Orthonormal G makes |d_D| = |c'| exactly; a map m that shrinks every
// nonzero e makes the loop strictly norm-reducing.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "fpnet/engine.hpp"
#include "fpnet/error.hpp"
#include "fpnet/trace.hpp"

namespace fpnet {

/// |d - d*|^2
inline double oracle_residual(const Eigen::VectorXd& d, const Eigen::VectorXd& reference) {
  if (d.size() != reference.size()) {
    throw ConfigError("oracle_residual: dimension mismatch (" + std::to_string(d.size()) + " vs " +
                      std::to_string(reference.size()) + ")");
  }
  return (d - reference).squaredNorm();
}

inline double oracle_residual(const SystemState& state, const Eigen::VectorXd& reference) {
  return oracle_residual(state.d, reference);
}

/// |G m(d) + s - d| relative to (1 + |d|).
inline double fixed_point_residual(const System& sys, const Eigen::VectorXd& d) {
  return (loop_map(sys, d) - d).norm() / (1.0 + d.norm());
}

inline void require_fixed_point(const System& sys, const Eigen::VectorXd& d, double tol = 1e-8) {
  if (d.size() != sys.size()) throw ConfigError("reference point has the wrong dimension");
  const double r = fixed_point_residual(sys, d);
  if (!(r <= tol)) {
    throw NotFixedPointError("reference point is not a fixed point (relative residual " + std::to_string(r) + ")", r);
  }
}

struct NeutralityCertificate {
  Index samples = 0;
  double max_deviation = 0.0;  // max | |d_D| - |c'| | / max(1, |c'|)
  bool pass = false;
};

struct NormReductionCertificate {
  Index samples = 0;
  double max_ratio = 0.0;  // max |c'| / |e|
  Index strict_reductions = 0;
  Index non_strict = 0;
  bool pass = false;       // every sample strictly reduced
  bool weak_pass = false;  // every sample nonexpanding
};

namespace detail {

/// Random perturbation with uniform direction and radius in (0, radius],
/// optionally confined to one block.
class PerturbationSampler {
 public:
  PerturbationSampler(Index n, double radius, std::uint64_t seed, std::optional<BlockIndex> support)
      : n_(n), radius_(radius), support_(support), rng_(seed) {
    if (support_) check_block(*support_, n);
  }

  Eigen::VectorXd next() {
    const BlockIndex b = support_.value_or(BlockIndex{0, n_});
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    for (;;) {
      for (Index i = b.offset; i < b.end(); ++i) e(i) = gauss_(rng_);
      const double len = e.norm();
      if (len > 0.0) {
        const double r = radius_ * (1.0 - unit_(rng_));  // (0, radius]
        return (r / len) * e;
      }
    }
  }

 private:
  Index n_;
  double radius_;
  std::optional<BlockIndex> support_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace detail

/// |d_D| <= |c'|, which an orthonormal G turns into an equality. Checked to
/// 1e-10 relative.
inline NeutralityCertificate certify_neutrality(const System& sys, const Eigen::VectorXd& reference, Index samples,
                                         double radius, std::uint64_t seed) {
  require_fixed_point(sys, reference);
  const Eigen::VectorXd c_ref = reflect(sys, reference);
  detail::PerturbationSampler sampler(sys.size(), radius, seed, std::nullopt);
  NeutralityCertificate cert;
  cert.samples = samples;
  for (Index k = 0; k < samples; ++k) {
    const Eigen::VectorXd e = sampler.next();
    const Eigen::VectorXd c_shift = reflect(sys, reference + e) - c_ref;
    const Eigen::VectorXd d_out = sys.interconnection.G * c_shift;
    const double dev = std::abs(d_out.norm() - c_shift.norm()) / std::max(1.0, c_shift.norm());
    cert.max_deviation = std::max(cert.max_deviation, dev);
  }
  cert.pass = cert.max_deviation <= 1e-10;
  return cert;
}

/// |m(d* + e) - m(d*)| < |e| for sampled e != 0. A sample counts as strict
/// when the ratio is below 1 - 1e-12; weak_pass allows rounding of order
/// eps |d*| on top of |e|.
inline NormReductionCertificate certify_norm_reduction(const System& sys, const Eigen::VectorXd& reference, Index samples,
                                            double radius, std::uint64_t seed,
                                            std::optional<BlockIndex> support = std::nullopt) {
  require_fixed_point(sys, reference);
  const Eigen::VectorXd c_ref = reflect(sys, reference);
  detail::PerturbationSampler sampler(sys.size(), radius, seed, support);
  NormReductionCertificate cert;
  cert.samples = samples;
  // Absolute rounding in m(d* + e) - m(d*) scales with |d*|, not |e|.
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * (reference.norm() + c_ref.norm());
  bool expanded = false;
  for (Index k = 0; k < samples; ++k) {
    const Eigen::VectorXd e = sampler.next();
    const double out = (reflect(sys, reference + e) - c_ref).norm();
    const double ratio = out / e.norm();
    cert.max_ratio = std::max(cert.max_ratio, ratio);
    if (ratio < 1.0 - 1e-12) {
      ++cert.strict_reductions;
    } else {
      ++cert.non_strict;
    }
    expanded = expanded || out > (1.0 + 1e-12) * e.norm() + rounding;
  }
  cert.pass = cert.non_strict == 0;
  cert.weak_pass = !expanded;
  return cert;
}

struct TraceStats {
  bool monotone = true;
  /// First recorded iteration at or below 1e-3, 1e-6, 1e-9.
  std::array<std::optional<std::int64_t>, 3> iterations_to{};
  double final_residual = 0.0;
};

inline constexpr std::array<double, 3> kTraceThresholds = {1e-3, 1e-6, 1e-9};

/// Uses the oracle residual when every record carries one, otherwise the
/// self residual. Monotone allows 1e-12 absolute slack per step.
inline TraceStats trace_stats(const RunTrace& trace) {
  if (trace.empty()) throw ConfigError("trace_stats: empty trace");
  const bool use_oracle = std::all_of(trace.records.begin(), trace.records.end(),
                                      [](const TraceRecord& r) { return r.oracle_residual.has_value(); });
  auto value = [&](const TraceRecord& r) { return use_oracle ? *r.oracle_residual : r.self_residual; };

  TraceStats st;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const double v = value(trace.records[i]);
    if (i > 0 && v > value(trace.records[i - 1]) + 1e-12) st.monotone = false;
    for (std::size_t t = 0; t < kTraceThresholds.size(); ++t) {
      if (!st.iterations_to[t] && v <= kTraceThresholds[t]) st.iterations_to[t] = trace.records[i].iter;
    }
  }
  st.final_residual = value(trace.back());
  return st;
}

/// One step of the error system: inputs shifted by (c*, d*).
///   e' = (1 - gamma) e + gamma G (m(d* + e) - c*)
inline Eigen::VectorXd error_system_step(const System& sys, const Eigen::VectorXd& reference,
                                         const Eigen::VectorXd& c_reference, const Eigen::VectorXd& e) {
  const Eigen::VectorXd forced = sys.interconnection.G * (reflect(sys, reference + e) - c_reference);
  return (1.0 - sys.gamma) * e + sys.gamma * forced;
}

/// Runs the original system from d* + e0 and the error system from e0 side
/// by side; returns the largest |(d[n] - d*) - e[n]|_inf over the horizon.
inline double superposition_gap(const System& sys, const Eigen::VectorXd& reference, const Eigen::VectorXd& e0,
                                Index steps) {
  const Eigen::VectorXd c_ref = reflect(sys, reference);
  SystemState st{reference + e0, 0, 0.0};
  Eigen::VectorXd e = e0;
  double gap = 0.0;
  for (Index k = 0; k < steps; ++k) {
    st = step_sync(sys, st);
    e = error_system_step(sys, reference, c_ref, e);
    gap = std::max(gap, ((st.d - reference) - e).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace fpnet
