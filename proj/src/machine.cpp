#include "mrm/machine.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "mrm/error.hpp"

namespace mrm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMachine: return "InvalidMachine";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::HeadOutOfBounds: return "HeadOutOfBounds";
    case ErrorCode::TimeExceeded: return "TimeExceeded";
    case ErrorCode::SpaceExceeded: return "SpaceExceeded";
    case ErrorCode::OutputTooLarge: return "OutputTooLarge";
    case ErrorCode::NoHead: return "NoHead";
    case ErrorCode::MultipleHeads: return "MultipleHeads";
    case ErrorCode::MalformedBlock: return "MalformedBlock";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::IncompleteBundle: return "IncompleteBundle";
    case ErrorCode::DivergesOutsideWindow: return "DivergesOutsideWindow";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::InvalidChoice: return "InvalidChoice";
    case ErrorCode::InvalidStrategy: return "InvalidStrategy";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
  }
  return "Unknown";
}

MachineSpec::MachineSpec(std::string name, std::vector<char> symbols, Symbol blank,
                         std::vector<std::string> states, State start,
                         std::vector<State> halting,
                         std::vector<std::optional<Transition>> table)
    : name_(std::move(name)),
      symbols_(std::move(symbols)),
      blank_(blank),
      states_(std::move(states)),
      start_(start),
      halting_(states_.size(), false),
      table_(std::move(table)) {
  if (symbols_.empty() || symbols_.size() > kMaxSymbols) {
    throw Error(ErrorCode::InvalidMachine, "symbol count must be in [1, 255]");
  }
  if (states_.empty() || states_.size() > kMaxStates) {
    throw Error(ErrorCode::InvalidMachine, "state count must be in [1, 254]");
  }
  if (blank_ >= symbols_.size() || start_ >= states_.size()) {
    throw Error(ErrorCode::InvalidMachine, "blank or start out of range");
  }
  if (halting.empty()) throw Error(ErrorCode::InvalidMachine, "no halting states");
  for (State q : halting) {
    if (q >= states_.size()) throw Error(ErrorCode::InvalidMachine, "halting state out of range");
    halting_[q] = true;
  }
  if (table_.size() != states_.size() * symbols_.size()) {
    throw Error(ErrorCode::InvalidMachine, "transition table has wrong size");
  }
  for (std::size_t q = 0; q < states_.size(); ++q) {
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
      const auto& tr = table_[q * symbols_.size() + s];
      const std::string where = "(" + states_[q] + ", " + std::string(1, symbols_[s]) + ")";
      if (halting_[q] && tr) {
        throw Error(ErrorCode::InvalidMachine, "halting state has a transition " + where);
      }
      if (!halting_[q] && !tr) {
        throw Error(ErrorCode::InvalidMachine, "missing transition " + where);
      }
      if (tr && (tr->next >= states_.size() || tr->write >= symbols_.size())) {
        throw Error(ErrorCode::InvalidMachine, "transition target out of range " + where);
      }
    }
  }
}

std::optional<Symbol> MachineSpec::symbol_of(char c) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), c);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<Symbol>(it - symbols_.begin());
}

std::optional<State> MachineSpec::state_of(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) return std::nullopt;
  return static_cast<State>(it - states_.begin());
}

const Transition& MachineSpec::transition(State q, Symbol s) const {
  const auto& tr = table_.at(static_cast<std::size_t>(q) * symbols_.size() + s);
  if (!tr) throw Error(ErrorCode::InvalidMachine, "no transition from halting state");
  return *tr;
}

std::vector<Symbol> MachineSpec::encode_input(std::string_view text) const {
  std::vector<Symbol> out;
  out.reserve(text.size());
  for (char c : text) {
    auto s = symbol_of(c);
    if (!s) throw Error(ErrorCode::InvalidMachine, std::string("unknown input symbol '") + c + "'");
    out.push_back(*s);
  }
  return out;
}

// --- shape

TableauShape TableauShape::make(std::size_t T, std::size_t S, std::size_t lambda) {
  if (T == 0 || S == 0 || lambda == 0) throw Error(ErrorCode::InvalidShape, "zero dimension");
  std::size_t blocks = (S + lambda - 1) / lambda;
  TableauShape shape{std::bit_ceil(T), std::bit_ceil(blocks) * lambda, lambda};
  shape.validate();
  return shape;
}

unsigned TableauShape::log_rows() const { return static_cast<unsigned>(std::countr_zero(rows)); }
unsigned TableauShape::log_blocks() const {
  return static_cast<unsigned>(std::countr_zero(blocks_per_row()));
}

void TableauShape::validate() const {
  if (rows == 0 || lambda == 0 || columns == 0 || columns % lambda != 0) {
    throw Error(ErrorCode::InvalidShape, "lambda must divide S");
  }
  if (!std::has_single_bit(rows) || !std::has_single_bit(blocks_per_row())) {
    throw Error(ErrorCode::InvalidShape, "T and S/lambda must be powers of two");
  }
  if (log_rows() + log_blocks() + 1 > 63) throw Error(ErrorCode::InvalidShape, "tree too deep");
}

// --- encoding

Bytes encode_cells(std::span<const Cell> cells) {
  Bytes out;
  out.reserve(2 * cells.size());
  for (const Cell& c : cells) {
    out.push_back(c.symbol);
    out.push_back(c.head ? static_cast<std::uint8_t>(*c.head + 1) : 0);
  }
  return out;
}

std::vector<Cell> decode_cells(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 2 != 0) throw Error(ErrorCode::MalformedBlock, "odd block length");
  std::vector<Cell> cells(bytes.size() / 2);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells[k].symbol = bytes[2 * k];
    if (bytes[2 * k + 1] != 0) cells[k].head = static_cast<State>(bytes[2 * k + 1] - 1);
  }
  return cells;
}

Bytes blank_block(Symbol blank, std::size_t lambda) {
  Bytes out(2 * lambda, 0);
  for (std::size_t k = 0; k < lambda; ++k) out[2 * k] = blank;
  return out;
}

// --- tableau

Row blank_row(Symbol blank, std::size_t columns, std::size_t index) {
  return Row{index, std::vector<Cell>(columns, Cell{blank, std::nullopt})};
}

Tableau::Tableau(std::string spec_name, std::string input, TableauShape shape, Symbol blank,
                 std::vector<Row> rows, std::string output)
    : spec_name_(std::move(spec_name)),
      input_(std::move(input)),
      shape_(shape),
      blank_(blank),
      rows_(std::move(rows)),
      blank_row_(blank_row(blank, shape.columns, 0)),
      output_(std::move(output)) {
  shape_.validate();
  if (rows_.empty() || rows_.size() > shape_.rows) {
    throw Error(ErrorCode::InvalidShape, "row count must be in [1, T]");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].cells.size() != shape_.columns) {
      throw Error(ErrorCode::MalformedRow, "row width differs from S");
    }
    rows_[i].index = i + 1;
  }
}

const Row& Tableau::row(std::size_t i) const {
  if (i == 0 || i > shape_.rows) throw Error(ErrorCode::OutOfRange, "row index");
  return i <= rows_.size() ? rows_[i - 1] : blank_row_;
}

Bytes Tableau::block_bytes(std::size_t i, std::size_t j) const {
  if (j == 0 || j > shape_.blocks_per_row()) throw Error(ErrorCode::OutOfRange, "block index");
  const auto& cells = row(i).cells;
  return encode_cells(std::span(cells).subspan((j - 1) * shape_.lambda, shape_.lambda));
}

// --- execution

std::optional<std::size_t> head_column(const Row& row) {
  std::optional<std::size_t> found;
  for (std::size_t c = 0; c < row.cells.size(); ++c) {
    if (!row.cells[c].head) continue;
    if (found) throw Error(ErrorCode::MalformedRow, "more than one head");
    found = c + 1;
  }
  return found;
}

std::variant<Row, Halted> step(const MachineSpec& spec, const Row& row) {
  auto col = head_column(row);
  if (!col) throw Error(ErrorCode::MalformedRow, "row has no head");
  const Cell& here = row.cells[*col - 1];
  if (spec.is_halting(*here.head)) return Halted{};

  const Transition& tr = spec.transition(*here.head, here.symbol);
  std::size_t target = *col;
  if (tr.move == Move::Left) {
    if (target == 1) throw Error(ErrorCode::HeadOutOfBounds, "move L at column 1");
    --target;
  } else if (tr.move == Move::Right) {
    if (target == row.cells.size()) throw Error(ErrorCode::HeadOutOfBounds, "move R at column S");
    ++target;
  }
  Row next{row.index + 1, row.cells};
  next.cells[*col - 1] = Cell{tr.write, std::nullopt};
  next.cells[target - 1].head = tr.next;
  return next;
}

Row initial_row(const MachineSpec& spec, std::span<const Symbol> input, std::size_t columns) {
  if (input.size() > columns) throw Error(ErrorCode::SpaceExceeded, "input longer than S");
  Row row = blank_row(spec.blank(), columns, 1);
  for (std::size_t c = 0; c < input.size(); ++c) row.cells[c].symbol = input[c];
  row.cells[0].head = spec.start();
  return row;
}

std::string output_of(const MachineSpec& spec, const Row& row, std::size_t lambda) {
  std::size_t end = std::min(lambda, row.cells.size());
  while (end > 0 && row.cells[end - 1].symbol == spec.blank()) --end;
  std::string out;
  for (std::size_t c = 0; c < end; ++c) out.push_back(spec.symbol_char(row.cells[c].symbol));
  return out;
}

namespace {

void check_output_row(const MachineSpec& spec, const Row& row, std::size_t lambda) {
  for (std::size_t c = lambda; c < row.cells.size(); ++c) {
    if (row.cells[c].symbol != spec.blank() || row.cells[c].head) {
      throw Error(ErrorCode::OutputTooLarge,
                  "halting row has content outside block 1 at column " + std::to_string(c + 1));
    }
  }
}

}  // namespace

Tableau run_tableau(const MachineSpec& spec, std::string_view input, const TableauShape& shape) {
  shape.validate();
  const auto symbols = spec.encode_input(input);
  std::vector<Row> rows;
  rows.push_back(initial_row(spec, symbols, shape.columns));
  for (;;) {
    std::variant<Row, Halted> next;
    try {
      next = step(spec, rows.back());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::HeadOutOfBounds && head_column(rows.back()) == shape.columns) {
        throw Error(ErrorCode::SpaceExceeded, "machine needs more than S cells");
      }
      throw;
    }
    if (std::holds_alternative<Halted>(next)) break;
    if (rows.size() == shape.rows) {
      throw Error(ErrorCode::TimeExceeded, "machine does not halt within T rows");
    }
    rows.push_back(std::move(std::get<Row>(next)));
  }
  check_output_row(spec, rows.back(), shape.lambda);
  std::string output = output_of(spec, rows.back(), shape.lambda);
  return Tableau(spec.name(), std::string(input), shape, spec.blank(), std::move(rows),
                 std::move(output));
}

std::vector<Block> blocks_of_row(const Row& row, std::size_t lambda) {
  if (lambda == 0 || row.cells.size() % lambda != 0) {
    throw Error(ErrorCode::InvalidShape, "lambda must divide the row width");
  }
  std::vector<Block> blocks;
  blocks.reserve(row.cells.size() / lambda);
  for (std::size_t j = 0; j < row.cells.size() / lambda; ++j) {
    auto first = row.cells.begin() + static_cast<std::ptrdiff_t>(j * lambda);
    blocks.push_back(Block{row.index, j + 1, std::vector<Cell>(first, first + static_cast<std::ptrdiff_t>(lambda))});
  }
  return blocks;
}

ActiveWindow active_block_window(const Row& row, std::size_t lambda) {
  auto col = head_column(row);
  if (!col) throw Error(ErrorCode::NoHead, "blank row has no active region");
  const std::size_t offset = (*col - 1) % lambda;
  return ActiveWindow{(*col - 1) / lambda + 1, offset == 0 || offset == lambda - 1};
}

Bytes local_transition(const MachineSpec& spec, const TableauShape& shape,
                       const BlockWindow& window, std::size_t j) {
  const std::size_t lambda = shape.lambda;
  const std::size_t blocks = shape.blocks_per_row();
  if (j == 0 || j > blocks) throw Error(ErrorCode::OutOfRange, "block index");

  // strip[k] holds global column (j-2)*lambda + k + 1; out-of-range slots stay blank.
  std::vector<Cell> strip(3 * lambda, Cell{spec.blank(), std::nullopt});
  for (std::size_t w = 0; w < 3; ++w) {
    const std::size_t block = j + w - 1;  // j-1, j, j+1 with j-1 possibly 0
    if (block == 0 || block > blocks) continue;
    if (window[w].size() != 2 * lambda) throw Error(ErrorCode::MalformedBlock, "window block size");
    auto cells = decode_cells(window[w]);
    std::copy(cells.begin(), cells.end(), strip.begin() + static_cast<std::ptrdiff_t>(w * lambda));
  }

  std::optional<std::size_t> head;
  for (std::size_t k = 0; k < strip.size(); ++k) {
    if (!strip[k].head) continue;
    if (head) throw Error(ErrorCode::MultipleHeads, "window holds more than one head");
    if (*strip[k].head >= spec.state_count() || strip[k].symbol >= spec.symbol_count()) {
      throw Error(ErrorCode::MalformedBlock, "cell does not decode under this machine");
    }
    head = k;
  }

  auto centre = [&](const std::vector<Cell>& cells) {
    return encode_cells(std::span(cells).subspan(lambda, lambda));
  };
  if (!head) return window[1];
  if (spec.is_halting(*strip[*head].head)) return blank_block(spec.blank(), lambda);

  const Transition& tr = spec.transition(*strip[*head].head, strip[*head].symbol);
  // Global column of strip slot k is (j-2)*lambda + k + 1, kept signed here.
  const auto column = static_cast<long long>((j - 1) * lambda) - static_cast<long long>(lambda) +
                      static_cast<long long>(*head) + 1;
  long long delta = 0;
  if (tr.move == Move::Left) delta = -1;
  if (tr.move == Move::Right) delta = 1;
  const long long target_column = column + delta;
  if (target_column < 1) throw Error(ErrorCode::HeadOutOfBounds, "move L past column 1");
  if (target_column > static_cast<long long>(shape.columns)) {
    throw Error(ErrorCode::HeadOutOfBounds, "move R past column S");
  }
  strip[*head] = Cell{tr.write, std::nullopt};
  const long long target = static_cast<long long>(*head) + delta;
  if (target >= 0 && target < static_cast<long long>(strip.size())) {
    strip[static_cast<std::size_t>(target)].head = tr.next;
  }
  return centre(strip);
}

}  // namespace mrm
