#pragma once

// Test scaffolding shared by the unit suites and the acceptance binary:
// scripted provers, tableau corruption and a linear-scan oracle.

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "mrm/arbitration.hpp"
#include "mrm/program.hpp"
#include "mrm/strategies.hpp"

namespace mrm::testing {

/// Tree-backed oracle with an optional hook that edits answers.
class Scripted : public ProverOracle {
 public:
  using Hook = std::function<void(const Query&, Response&)>;
  Scripted(const Tableau& tab, const HashScheme& scheme, Hook hook = {})
      : responder_(tab, build_tree(tab, scheme)), hook_(std::move(hook)) {}

  Response answer(const Query& q, std::span<const Query> history) override {
    seen_history_ = history.size();
    Response r = responder_.answer(q);
    if (hook_) hook_(q, r);
    return r;
  }
  [[nodiscard]] const TableauTree& tree() const { return responder_.tree(); }
  std::size_t seen_history_ = 0;

 private:
  TreeResponder responder_;
  Hook hook_;
};

inline Tableau corrupt(const Tableau& tab, const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
  std::vector<Row> rows(tab.stored_rows().begin(), tab.stored_rows().end());
  const auto lambda = tab.shape().lambda;
  for (const auto& [i, j] : blocks) {
    while (rows.size() < i) rows.push_back(blank_row(tab.blank(), tab.shape().columns, rows.size() + 1));
    auto& cell = rows[i - 1].cells[(j - 1) * lambda];
    cell.symbol = static_cast<Symbol>(cell.symbol + 1);
  }
  return Tableau(tab.spec_name(), tab.input(), tab.shape(), tab.blank(), std::move(rows), tab.output());
}

inline std::optional<std::pair<std::size_t, std::size_t>> linear_first_difference(const Tableau& x, const Tableau& y) {
  const auto& s = x.shape();
  for (std::size_t i = 1; i <= s.rows; ++i) {
    for (std::size_t j = 1; j <= s.blocks_per_row(); ++j) {
      if (x.block_bytes(i, j) != y.block_bytes(i, j)) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

// Timer machine whose running time is exactly `rows`, head kept in block 1.
inline MachineSpec timer_running_for(std::size_t rows, int width) {
  const auto input = timer_input(width);
  auto length = [&](int rounds, int pad) {
    return naive_run(parse_program(timer_program(rounds, pad), "timer"), input,
                     static_cast<std::size_t>(width), rows + 1)
        .size();
  };
  int rounds = 1;
  while (length(rounds + 1, 0) <= rows) ++rounds;
  const int pad = static_cast<int>(rows - length(rounds, 0));
  auto spec = parse_program(timer_program(rounds, pad), "timer");
  if (length(rounds, pad) != rows) throw std::logic_error("timer cannot hit the requested length");
  return spec;
}

}  // namespace mrm::testing
