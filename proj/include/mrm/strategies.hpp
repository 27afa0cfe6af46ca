#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrm/arbitration.hpp"
#include "mrm/commitment.hpp"
#include "mrm/effort.hpp"

namespace mrm {

/// A prover strategy: a commit behaviour plus an arbitration responder, both
/// charged to the strategy's own meter. One instance per game and seat.
class Strategy : public ProverOracle {
 public:
  [[nodiscard]] virtual std::string id() const = 0;
  /// Member of the truthful set: commits exactly what the honest commitment
  /// function would.
  [[nodiscard]] virtual bool truthful() const { return false; }

  virtual Commitment commit(const VerifierInput& task, const HashScheme& scheme) = 0;

  [[nodiscard]] const EffortMeter& meter() const { return meter_; }

 protected:
  EffortMeter meter_;
};

/// Answers every query from a stored tableau and its tree. Used by every
/// strategy that keeps a (possibly fabricated) but internally consistent tree.
class TreeResponder {
 public:
  TreeResponder(Tableau tableau, TableauTree tree)
      : tableau_(std::move(tableau)), tree_(std::move(tree)) {}

  [[nodiscard]] Response answer(const Query& query) const;
  [[nodiscard]] const Tableau& tableau() const { return tableau_; }
  [[nodiscard]] const TableauTree& tree() const { return tree_; }

 private:
  Tableau tableau_;
  TableauTree tree_;
};

/// Builds a strategy from its id: tau, lazy:<i>, lazyhalt:<i>, flip,
/// inflate:<d>, collude, apliar:<k>, overclaim:<i>. InvalidStrategy on
/// anything else.
std::unique_ptr<Strategy> make_strategy(const std::string& id);

/// Validates an id without building it.
bool is_strategy_id(const std::string& id);

/// The eight-strategy library with parameters fitted to an honest running
/// time t: i = max(1, (t - 2) / 2) so that lazyhalt(i) and overclaim(i + 1)
/// both stop before the real halt.
std::vector<std::string> default_library(std::size_t t);

/// Prefix computation shared by the lazy strategies: rows 1..rows of the
/// honest run, charging rows - 1 steps. InvalidStrategy if the machine halts
/// within those rows.
std::vector<Row> compute_prefix(const MachineSpec& spec, std::string_view input,
                                const TableauShape& shape, std::size_t rows, EffortMeter& meter);

/// Row the lazy strategies append: block 1 of `last` with a halting head on
/// cell 1, everything else blank.
Row fabricated_halt_row(const MachineSpec& spec, const Row& last, std::size_t lambda);

}  // namespace mrm
