#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fpnet {

struct TraceRecord {
  std::int64_t iter = 0;
  double normalized_iter = 0.0;
  double self_residual = 0.0;
  std::optional<double> oracle_residual;
  std::optional<double> objective;

  bool operator==(const TraceRecord&) const = default;
};

/// Per-iteration history of a run. Records are appended with strictly
/// increasing `iter`.
struct RunTrace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
  const TraceRecord& back() const { return records.back(); }
  bool operator==(const RunTrace&) const = default;
};

}  // namespace fpnet
