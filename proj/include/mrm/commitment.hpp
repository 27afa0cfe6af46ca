#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrm/effort.hpp"
#include "mrm/machine.hpp"
#include "mrm/merkle.hpp"

namespace mrm {

/// Report triple (a, t, r): output, reported running time, tree root.
struct Commitment {
  std::string a;
  std::size_t t = 1;
  Digest r{};

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

/// Hash units of one leaf call (a 2*lambda-byte block) and one node call.
std::int64_t leaf_units(const TableauShape& shape);
std::int64_t node_units();

/// Hash units needed to move a row tree from `prev` to `next`: one leaf per
/// changed block plus the union of their ancestors. Counted, not hashed.
std::int64_t row_update_units(std::span<const Bytes> prev, std::span<const Bytes> next);

/// Effort schedule M(i): cost of computing rows 1..i and the full tree.
///
///   M(1)   = c_hash * [ 2 * (B*h_B + (B-1)*h_N) + (T-1)*h_N ]
///   M(i+1) = M(i) + c_step + c_hash * u_{i+1}
///
/// The bracket covers the first-row tree, the shared blank-row tree and the
/// upper tree. u_i is the incremental update of row i; for rows the head does
/// not carry across a block boundary it equals h_B + log2(B)*h_N.
class CostSchedule {
 public:
  /// Every row update charged at the single-path rate.
  static CostSchedule nominal(const TableauShape& shape);
  /// Exact update costs of the honest trace for rows 2..t, single-path rate
  /// beyond t.
  static CostSchedule for_tableau(const Tableau& tableau);

  [[nodiscard]] std::int64_t M(std::size_t i) const;  // OutOfRange unless 1 <= i <= T
  [[nodiscard]] std::int64_t M_c() const { return prefix_.back(); }
  [[nodiscard]] const TableauShape& shape() const { return shape_; }

 private:
  CostSchedule(TableauShape shape, std::vector<std::int64_t> prefix)
      : shape_(shape), prefix_(std::move(prefix)) {}

  TableauShape shape_;
  std::vector<std::int64_t> prefix_;  // prefix_[i-1] = M(i)
};

/// Closed form of the nominal schedule.
std::int64_t cost_M(std::size_t i, const TableauShape& shape);

/// Builds a TableauTree row by row with incremental row-root updates, charging
/// every hash to the meter. Rows not pushed are blank.
class TreeBuilder {
 public:
  TreeBuilder(TableauShape shape, Symbol blank, const HashScheme& scheme, EffortMeter& meter);

  /// `local` restricts changes to the blocks around the previous head; rows
  /// that were fabricated rather than computed pass false.
  void push_row(const Row& row, bool local = true);
  [[nodiscard]] std::size_t rows() const { return trees_.size(); }
  TableauTree finish() &&;

 private:
  TableauShape shape_;
  Symbol blank_;
  const HashScheme& scheme_;
  EffortMeter& meter_;
  std::vector<RowTree> trees_;
  std::vector<Bytes> last_blocks_;
  std::optional<std::size_t> last_head_block_;
};

std::vector<Bytes> row_block_bytes(const Row& row, std::size_t lambda);

struct CommitResult {
  Commitment commitment;
  TableauTree tree;
  Tableau tableau;
};

/// Honest commitment f_H: runs the machine (one step charged per transition)
/// and builds the tree incrementally.
CommitResult commit(const MachineSpec& spec, std::string_view input, const TableauShape& shape,
                    const HashScheme& scheme, EffortMeter& meter);

}  // namespace mrm
