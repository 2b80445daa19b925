#pragma once

// Fixed-point execution of an interconnected system
//
//   c = m(d)            (elements, blockwise)
//   d' = G c + s        (interconnection)
//   d <- (1 - gamma) d + gamma d'
//
// either synchronously or through Bernoulli-triggered sample-and-hold
// registers on the element inputs.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fpnet/elements.hpp"
#include "fpnet/error.hpp"
#include "fpnet/interconnect.hpp"
#include "fpnet/pair_transform.hpp"
#include "fpnet/trace.hpp"

namespace fpnet {

struct System {
  AffineInterconnection interconnection;
  std::vector<Element> elements;
  PairTransform transform = PairTransform::canonical();
  double gamma = 0.5;

  Index size() const { return interconnection.size(); }

  void validate() const {
    const Index n = size();
    if (interconnection.G.cols() != n || interconnection.s.size() != n) {
      throw ConfigError("system interconnection has inconsistent dimensions");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(gamma));
    }
    std::vector<BlockIndex> blocks;
    blocks.reserve(elements.size());
    for (const auto& e : elements) {
      e.validate();
      blocks.push_back(e.block);
    }
    check_partition(blocks, n);
  }
};

/// c = m(d), evaluated element by element.
inline Eigen::VectorXd reflect(const System& sys, const Eigen::VectorXd& d) {
  Eigen::VectorXd c = d;
  for (const auto& e : sys.elements) {
    auto seg = c.segment(e.block.offset, e.block.length);
    e.prox_inplace(seg);
  }
  return 2.0 * c - d;
}

/// prox points x = (m(d) + d) / 2: the primal solution estimate in the
/// elements' own units.
inline Eigen::VectorXd prox_point(const System& sys, const Eigen::VectorXd& d) {
  Eigen::VectorXd x = d;
  for (const auto& e : sys.elements) {
    auto seg = x.segment(e.block.offset, e.block.length);
    e.prox_inplace(seg);
  }
  return x;
}

/// Sum of element costs at the prox point of d.
inline double objective(const System& sys, const Eigen::VectorXd& d) {
  const Eigen::VectorXd x = prox_point(sys, d);
  double total = 0.0;
  for (const auto& e : sys.elements) total += e.cost(x.segment(e.block.offset, e.block.length));
  return total;
}

/// d' = G m(d) + s, the undamped loop map.
inline Eigen::VectorXd loop_map(const System& sys, const Eigen::VectorXd& d) {
  return sys.interconnection.apply(reflect(sys, d));
}

/// Damped candidate (1 - gamma) d + gamma (G m(d) + s).
inline Eigen::VectorXd candidate(const System& sys, const Eigen::VectorXd& d) {
  Eigen::VectorXd next = loop_map(sys, d);
  if (sys.gamma != 1.0) next = (1.0 - sys.gamma) * d + sys.gamma * next;
  if (!next.allFinite()) throw DivergedError("iteration produced a non-finite value");
  return next;
}

enum class DelayMode { synchronous, asynchronous };

/// Trigger granularity for asynchronous registers.
enum class TriggerScope { coordinate, block };

/// Sample-and-hold delay bank on the element inputs. The held values are the
/// state vector d itself; the bank owns the trigger processes.
class DelayBank {
 public:
  DelayBank() = default;

  DelayBank(DelayMode mode, double p, std::uint64_t seed, TriggerScope scope = TriggerScope::coordinate)
      : mode_(mode), p_(mode == DelayMode::synchronous ? 1.0 : p), seed_(seed), scope_(scope), rng_(seed) {
    if (mode == DelayMode::asynchronous && !(p > 0.0 && p <= 1.0)) {
      throw ConfigError("sampling probability p must lie in (0, 1], got " + std::to_string(p));
    }
  }

  static DelayBank synchronous() { return {}; }
  static DelayBank asynchronous(double p, std::uint64_t seed, TriggerScope scope = TriggerScope::coordinate) {
    return {DelayMode::asynchronous, p, seed, scope};
  }

  DelayMode mode() const { return mode_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  TriggerScope scope() const { return scope_; }

  /// Draw one trigger per coordinate (or per element block).
  std::vector<char> draw(const System& sys) {
    std::bernoulli_distribution fire(p_);
    std::vector<char> mask(static_cast<std::size_t>(sys.size()), 0);
    if (scope_ == TriggerScope::coordinate) {
      for (auto& m : mask) m = fire(rng_) ? 1 : 0;
    } else {
      for (const auto& e : sys.elements) {
        const char f = fire(rng_) ? 1 : 0;
        for (Index i = e.block.offset; i < e.block.end(); ++i) mask[static_cast<std::size_t>(i)] = f;
      }
    }
    return mask;
  }

 private:
  DelayMode mode_ = DelayMode::synchronous;
  double p_ = 1.0;
  std::uint64_t seed_ = 0;
  TriggerScope scope_ = TriggerScope::coordinate;
  std::mt19937_64 rng_{0};
};

struct SystemState {
  Eigen::VectorXd d;
  std::int64_t iter = 0;
  double normalized_iter = 0.0;

  static SystemState zeros(Index n) { return {Eigen::VectorXd::Zero(n), 0, 0.0}; }
};

inline SystemState step_sync(const System& sys, const SystemState& state) {
  SystemState next{candidate(sys, state.d), state.iter + 1, state.normalized_iter + 1.0};
  return next;
}

namespace detail {
inline void latch(Eigen::VectorXd& held, const Eigen::VectorXd& cand, const std::vector<char>& mask) {
  for (Index i = 0; i < held.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) held(i) = cand(i);
  }
}
}  // namespace detail

/// Every register computes its candidate; each one adopts it only if its
/// trigger fires this step.
inline SystemState step_async(const System& sys, const SystemState& state, DelayBank& bank) {
  if (bank.mode() != DelayMode::asynchronous) {
    throw ConfigError("step_async requires an asynchronous delay bank");
  }
  const Eigen::VectorXd cand = candidate(sys, state.d);
  SystemState next{state.d, state.iter + 1, state.normalized_iter + bank.p()};
  detail::latch(next.d, cand, bank.draw(sys));
  return next;
}

/// Per-pair (a_i, b_i) = M^{-1} (c_i, d_i) with c = m(d).
inline std::vector<DecisionPair> readout(const SystemState& state, const System& sys) {
  const Eigen::VectorXd c = reflect(sys, state.d);
  std::vector<DecisionPair> out(static_cast<std::size_t>(c.size()));
  for (Index i = 0; i < c.size(); ++i) {
    out[static_cast<std::size_t>(i)] = inverse_transform({c(i), state.d(i)}, sys.transform);
  }
  return out;
}

struct RunOptions {
  std::optional<Eigen::VectorXd> initial;
  /// Reference fixed point; enables the oracle_residual trace column.
  std::optional<Eigen::VectorXd> reference;
  /// Record element cost at every iteration.
  bool record_objective = false;
  /// Produce a readout even when the run did not converge.
  bool force_readout = false;
};

struct RunResult {
  bool converged = false;
  bool diverged = false;
  std::string message;
  SystemState state;
  std::vector<DecisionPair> readout;
  RunTrace trace;
};

/// Iterate until |d_next - d| <= tol (1 + |d|) or max_iters steps. The
/// residual is that of the full damped candidate, in both modes.
inline RunResult run(const System& sys, DelayBank bank, double tol, std::int64_t max_iters, const RunOptions& opts = {}) {
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  sys.validate();

  RunResult result;
  result.state = SystemState::zeros(sys.size());
  if (opts.initial) {
    if (opts.initial->size() != sys.size()) throw ConfigError("initial state has the wrong dimension");
    result.state.d = *opts.initial;
  }
  if (opts.reference && opts.reference->size() != sys.size()) {
    throw ConfigError("reference fixed point has the wrong dimension");
  }

  const bool async = bank.mode() == DelayMode::asynchronous;
  SystemState& st = result.state;
  try {
    for (std::int64_t k = 0; k < max_iters; ++k) {
      const Eigen::VectorXd cand = candidate(sys, st.d);
      TraceRecord rec;
      rec.iter = st.iter;
      rec.normalized_iter = st.normalized_iter;
      rec.self_residual = (cand - st.d).norm();
      if (opts.reference) rec.oracle_residual = (st.d - *opts.reference).squaredNorm();
      if (opts.record_objective) rec.objective = objective(sys, st.d);
      result.trace.records.push_back(rec);

      if (rec.self_residual <= tol * (1.0 + st.d.norm())) {
        result.converged = true;
        break;
      }
      if (async) {
        detail::latch(st.d, cand, bank.draw(sys));
        st.normalized_iter += bank.p();
      } else {
        st.d = cand;
        st.normalized_iter += 1.0;
      }
      ++st.iter;
    }
  } catch (const DivergedError& e) {
    result.diverged = true;
    result.message = e.what();
  }
  if (!result.converged && result.message.empty()) {
    result.message = "iteration budget exhausted";
  }
  if (result.converged) result.message = "converged";
  if (result.converged || opts.force_readout) result.readout = readout(st, sys);
  return result;
}

}  // namespace fpnet
