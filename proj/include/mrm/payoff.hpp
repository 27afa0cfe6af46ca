#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrm/mechanism.hpp"

namespace mrm {

/// Seed of trial k, shared by every cell so cells face the same keys.
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);

struct CellStats {
  double mean_a = 0;
  double mean_b = 0;
  std::map<std::string, std::size_t> outcomes;
  std::size_t arbitrations = 0;
  std::size_t max_queries = 0;
  std::int64_t max_verifier_hash_calls = 0;

  friend bool operator==(const CellStats&, const CellStats&) = default;
};

/// Row strategy plays seat A, column strategy seat B.
struct PayoffMatrix {
  std::vector<std::string> ids;
  std::size_t trials = 0;
  std::vector<CellStats> cells;  // row-major

  [[nodiscard]] const CellStats& at(std::size_t a, std::size_t b) const { return cells.at(a * ids.size() + b); }
  [[nodiscard]] std::size_t index_of(const std::string& id) const;

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

/// Every (cell, trial) game in parallel; results are reduced in a fixed order
/// so the matrix is identical to the serial one.
PayoffMatrix payoff_matrix(const GameSetup& setup, const std::vector<std::string>& ids,
                           std::size_t trials, std::uint64_t base_seed);

/// Single-threaded reference.
PayoffMatrix payoff_matrix_serial(const GameSetup& setup, const std::vector<std::string>& ids,
                                  std::size_t trials, std::uint64_t base_seed);

struct Deviation {
  std::size_t row, col;  // the profile
  Agent seat;            // who deviates
  std::string to;        // best deviation within the library
  double gain;           // strictly positive
};

struct NashReport {
  /// Best strictly profitable unilateral deviation of each profile that has one.
  std::vector<Deviation> deviations;
  [[nodiscard]] bool is_stable(std::size_t row, std::size_t col) const;
};

NashReport nash_report(const PayoffMatrix& m);

struct BestResponse {
  std::vector<std::string> best;           // all maximizers
  std::map<std::string, double> utilities;  // mean utility of each candidate
};

/// Candidates play seat A against a fixed opponent in seat B.
BestResponse best_response_check(const GameSetup& setup, const std::string& opponent,
                                 const std::vector<std::string>& candidates, std::size_t trials,
                                 std::uint64_t base_seed);

}  // namespace mrm
