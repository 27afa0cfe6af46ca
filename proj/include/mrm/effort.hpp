#pragma once

#include <cstdint>

namespace mrm {

/// Linear cost model: one unit per machine transition, four per 64-byte hash
/// input unit, one per arbitration response.
struct CostModel {
  static constexpr std::int64_t kStep = 1;
  static constexpr std::int64_t kHashUnit = 4;
  static constexpr std::int64_t kQuery = 1;
};

/// Per-agent, per-game effort counters. Monotone; total() is derived.
class EffortMeter {
 public:
  void add_steps(std::int64_t n) { steps_ += n; }
  void add_hash(std::int64_t units) {
    ++hash_calls_;
    hash_units_ += units;
  }
  void add_query() { ++queries_; }

  [[nodiscard]] std::int64_t steps() const { return steps_; }
  [[nodiscard]] std::int64_t hash_calls() const { return hash_calls_; }
  [[nodiscard]] std::int64_t hash_units() const { return hash_units_; }
  [[nodiscard]] std::int64_t queries() const { return queries_; }
  [[nodiscard]] std::int64_t total() const {
    return CostModel::kStep * steps_ + CostModel::kHashUnit * hash_units_ +
           CostModel::kQuery * queries_;
  }

 private:
  std::int64_t steps_ = 0;
  std::int64_t hash_calls_ = 0;
  std::int64_t hash_units_ = 0;
  std::int64_t queries_ = 0;
};

}  // namespace mrm
