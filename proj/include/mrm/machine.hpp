#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mrm {

using Symbol = std::uint8_t;
using State = std::uint8_t;
using Bytes = std::vector<std::uint8_t>;

enum class Move : char { Left = 'L', Right = 'R', Stay = 'S' };

struct Transition {
  State next;
  Symbol write;
  Move move;
};

/// Deterministic single-tape Turing machine.
///
/// Symbols and states are dense byte-sized indices. The transition table is
/// total over non-halting states and empty for halting ones; the constructor
/// rejects anything else.
class MachineSpec {
 public:
  static constexpr std::size_t kMaxSymbols = 255;
  static constexpr std::size_t kMaxStates = 254;

  MachineSpec(std::string name, std::vector<char> symbols, Symbol blank,
              std::vector<std::string> states, State start, std::vector<State> halting,
              std::vector<std::optional<Transition>> table);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] std::size_t symbol_count() const { return symbols_.size(); }
  [[nodiscard]] std::size_t state_count() const { return states_.size(); }
  [[nodiscard]] Symbol blank() const { return blank_; }
  [[nodiscard]] State start() const { return start_; }
  [[nodiscard]] bool is_halting(State q) const { return halting_.at(q); }
  [[nodiscard]] char symbol_char(Symbol s) const { return symbols_.at(s); }
  [[nodiscard]] const std::string& state_name(State q) const { return states_.at(q); }
  [[nodiscard]] std::optional<Symbol> symbol_of(char c) const;
  [[nodiscard]] std::optional<State> state_of(std::string_view name) const;

  /// Throws InvalidMachine when called for a halting state.
  [[nodiscard]] const Transition& transition(State q, Symbol s) const;

  /// Maps characters to symbols; throws InvalidMachine on unknown characters.
  [[nodiscard]] std::vector<Symbol> encode_input(std::string_view text) const;

 private:
  std::string name_;
  std::vector<char> symbols_;
  Symbol blank_;
  std::vector<std::string> states_;
  State start_;
  std::vector<bool> halting_;
  std::vector<std::optional<Transition>> table_;  // state * symbol_count + symbol
};

struct Cell {
  Symbol symbol = 0;
  std::optional<State> head;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Row {
  std::size_t index = 1;  // 1-based
  std::vector<Cell> cells;

  friend bool operator==(const Row&, const Row&) = default;
};

/// Geometry of a tableau: T rows, S cells per row, blocks of lambda cells.
struct TableauShape {
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t lambda = 8;

  /// Rounds T and S/lambda up to powers of two.
  static TableauShape make(std::size_t T, std::size_t S, std::size_t lambda = 8);

  [[nodiscard]] std::size_t blocks_per_row() const { return columns / lambda; }
  [[nodiscard]] unsigned log_rows() const;
  [[nodiscard]] unsigned log_blocks() const;
  [[nodiscard]] std::size_t block_bytes() const { return 2 * lambda; }

  /// Throws InvalidShape unless T and B are powers of two and lambda divides S.
  void validate() const;

  friend bool operator==(const TableauShape&, const TableauShape&) = default;
};

// --- cell/block encoding: per cell a symbol byte, then 0 (no head) or state+1.

Bytes encode_cells(std::span<const Cell> cells);
/// Throws MalformedBlock for odd-length input.
std::vector<Cell> decode_cells(std::span<const std::uint8_t> bytes);
Bytes blank_block(Symbol blank, std::size_t lambda);

struct Block {
  std::size_t row = 1;
  std::size_t index = 1;
  std::vector<Cell> cells;

  [[nodiscard]] Bytes bytes() const { return encode_cells(cells); }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Computation tableau. Rows 1..t are stored; rows t+1..T are implicit blanks.
class Tableau {
 public:
  Tableau(std::string spec_name, std::string input, TableauShape shape, Symbol blank,
          std::vector<Row> rows, std::string output);

  [[nodiscard]] const std::string& spec_name() const { return spec_name_; }
  [[nodiscard]] const std::string& input() const { return input_; }
  [[nodiscard]] const TableauShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t t() const { return rows_.size(); }
  [[nodiscard]] const std::string& output() const { return output_; }
  [[nodiscard]] Symbol blank() const { return blank_; }

  /// 1 <= i <= T; rows beyond t are the shared blank row.
  [[nodiscard]] const Row& row(std::size_t i) const;
  [[nodiscard]] Bytes block_bytes(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::span<const Row> stored_rows() const { return rows_; }

  friend bool operator==(const Tableau&, const Tableau&) = default;

 private:
  std::string spec_name_;
  std::string input_;
  TableauShape shape_;
  Symbol blank_;
  std::vector<Row> rows_;
  Row blank_row_;
  std::string output_;
};

struct Halted {
  friend bool operator==(const Halted&, const Halted&) = default;
};

std::optional<std::size_t> head_column(const Row& row);  // 1-based; MalformedRow if > 1 heads

/// One machine transition on a full row.
std::variant<Row, Halted> step(const MachineSpec& spec, const Row& row);

Row initial_row(const MachineSpec& spec, std::span<const Symbol> input, std::size_t columns);
Row blank_row(Symbol blank, std::size_t columns, std::size_t index);

/// Output string of a halted row: block-1 symbols with trailing blanks removed.
std::string output_of(const MachineSpec& spec, const Row& row, std::size_t lambda);

Tableau run_tableau(const MachineSpec& spec, std::string_view input, const TableauShape& shape);

std::vector<Block> blocks_of_row(const Row& row, std::size_t lambda);

struct ActiveWindow {
  std::size_t block;
  bool boundary;
};
ActiveWindow active_block_window(const Row& row, std::size_t lambda);

/// Blocks j-1, j, j+1 of the predecessor row. Entries outside [1, B] are ignored.
using BlockWindow = std::array<Bytes, 3>;

/// Block j of the successor row computed from the three-block window alone.
/// A halting head erases the row (everything after the output row is blank).
Bytes local_transition(const MachineSpec& spec, const TableauShape& shape,
                       const BlockWindow& window, std::size_t j);

}  // namespace mrm
