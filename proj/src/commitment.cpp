#include "mrm/commitment.hpp"

#include <set>

#include "mrm/error.hpp"

namespace mrm {

std::int64_t leaf_units(const TableauShape& shape) {
  return HashScheme::units_for(shape.block_bytes());
}

std::int64_t node_units() { return HashScheme::units_for(2 * Digest{}.size()); }

std::int64_t row_update_units(std::span<const Bytes> prev, std::span<const Bytes> next) {
  if (prev.size() != next.size()) throw Error(ErrorCode::PreconditionViolated, "row widths differ");
  const std::size_t count = prev.size();
  std::int64_t leaves = 0;
  std::set<std::size_t> ancestors;
  std::int64_t block_units = 0;
  for (std::size_t j = 0; j < count; ++j) {
    if (prev[j] == next[j]) continue;
    ++leaves;
    block_units = HashScheme::units_for(next[j].size());
    for (std::size_t p = (count + j) / 2; p >= 1; p /= 2) ancestors.insert(p);
  }
  return leaves * block_units + static_cast<std::int64_t>(ancestors.size()) * node_units();
}

namespace {

std::int64_t base_units(const TableauShape& shape) {
  const auto B = static_cast<std::int64_t>(shape.blocks_per_row());
  const auto T = static_cast<std::int64_t>(shape.rows);
  const std::int64_t row_tree = B * leaf_units(shape) + (B - 1) * node_units();
  return 2 * row_tree + (T - 1) * node_units();
}

std::int64_t single_path_units(const TableauShape& shape) {
  return leaf_units(shape) + static_cast<std::int64_t>(shape.log_blocks()) * node_units();
}

}  // namespace

CostSchedule CostSchedule::nominal(const TableauShape& shape) {
  shape.validate();
  std::vector<std::int64_t> prefix(shape.rows);
  prefix[0] = CostModel::kHashUnit * base_units(shape);
  for (std::size_t i = 1; i < shape.rows; ++i) {
    prefix[i] = prefix[i - 1] + CostModel::kStep + CostModel::kHashUnit * single_path_units(shape);
  }
  return CostSchedule(shape, std::move(prefix));
}

CostSchedule CostSchedule::for_tableau(const Tableau& tableau) {
  const auto& shape = tableau.shape();
  std::vector<std::int64_t> prefix(shape.rows);
  prefix[0] = CostModel::kHashUnit * base_units(shape);
  std::vector<Bytes> prev = row_block_bytes(tableau.row(1), shape.lambda);
  for (std::size_t i = 2; i <= shape.rows; ++i) {
    std::int64_t units = single_path_units(shape);
    if (i <= tableau.t()) {
      auto next = row_block_bytes(tableau.row(i), shape.lambda);
      units = row_update_units(prev, next);
      prev = std::move(next);
    }
    prefix[i - 1] = prefix[i - 2] + CostModel::kStep + CostModel::kHashUnit * units;
  }
  return CostSchedule(shape, std::move(prefix));
}

std::int64_t CostSchedule::M(std::size_t i) const {
  if (i == 0 || i > prefix_.size()) throw Error(ErrorCode::OutOfRange, "M(i) needs 1 <= i <= T");
  return prefix_[i - 1];
}

std::int64_t cost_M(std::size_t i, const TableauShape& shape) {
  shape.validate();
  if (i == 0 || i > shape.rows) throw Error(ErrorCode::OutOfRange, "M(i) needs 1 <= i <= T");
  const auto rows_after_first = static_cast<std::int64_t>(i - 1);
  return CostModel::kStep * rows_after_first +
         CostModel::kHashUnit * (base_units(shape) + rows_after_first * single_path_units(shape));
}

// --- tree builder

std::vector<Bytes> row_block_bytes(const Row& row, std::size_t lambda) {
  std::vector<Bytes> out;
  out.reserve(row.cells.size() / lambda);
  for (std::size_t j = 0; j < row.cells.size() / lambda; ++j) {
    out.push_back(encode_cells(std::span(row.cells).subspan(j * lambda, lambda)));
  }
  return out;
}

TreeBuilder::TreeBuilder(TableauShape shape, Symbol blank, const HashScheme& scheme,
                         EffortMeter& meter)
    : shape_(shape), blank_(blank), scheme_(scheme), meter_(meter) {
  shape_.validate();
}

void TreeBuilder::push_row(const Row& row, bool local) {
  if (row.cells.size() != shape_.columns) throw Error(ErrorCode::MalformedRow, "row width differs from S");
  if (trees_.size() == shape_.rows) throw Error(ErrorCode::TimeExceeded, "more than T rows");
  auto blocks = row_block_bytes(row, shape_.lambda);
  if (trees_.empty()) {
    trees_.push_back(build_row_tree(blocks, scheme_, &meter_));
  } else {
    BlockRange window{1, shape_.blocks_per_row()};
    if (local && last_head_block_) {
      window.first = *last_head_block_ > 1 ? *last_head_block_ - 1 : 1;
      window.last = std::min(*last_head_block_ + 1, shape_.blocks_per_row());
    }
    trees_.push_back(
        incremental_row_root(trees_.back(), last_blocks_, blocks, window, scheme_, &meter_));
  }
  last_blocks_ = std::move(blocks);
  auto col = head_column(row);
  last_head_block_ = col ? std::optional((*col - 1) / shape_.lambda + 1) : std::nullopt;
}

TableauTree TreeBuilder::finish() && {
  const std::vector<Bytes> blank(shape_.blocks_per_row(), blank_block(blank_, shape_.lambda));
  RowTree blank_tree = build_row_tree(blank, scheme_, &meter_);
  return TableauTree(shape_, std::move(trees_), std::move(blank_tree), scheme_, &meter_);
}

CommitResult commit(const MachineSpec& spec, std::string_view input, const TableauShape& shape,
                    const HashScheme& scheme, EffortMeter& meter) {
  Tableau tableau = run_tableau(spec, input, shape);
  meter.add_steps(static_cast<std::int64_t>(tableau.t()) - 1);
  TreeBuilder builder(shape, spec.blank(), scheme, meter);
  for (const Row& row : tableau.stored_rows()) builder.push_row(row);
  TableauTree tree = std::move(builder).finish();
  Commitment c{tableau.output(), tableau.t(), tree.root()};
  return CommitResult{std::move(c), std::move(tree), std::move(tableau)};
}

}  // namespace mrm
