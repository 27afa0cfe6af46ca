#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mrm/commitment.hpp"
#include "mrm/effort.hpp"
#include "mrm/machine.hpp"
#include "mrm/merkle.hpp"

namespace mrm {

// --- queries

struct BlockValue {
  std::size_t row, block;
  friend bool operator==(const BlockValue&, const BlockValue&) = default;
};
struct RowRoot {
  std::size_t row;
  friend bool operator==(const RowRoot&, const RowRoot&) = default;
};
struct NodeChildren {
  NodeAddress node;
  friend bool operator==(const NodeChildren&, const NodeChildren&) = default;
};
/// Block 1 of each listed row.
struct LastRowBlocks {
  std::vector<std::size_t> rows;
  friend bool operator==(const LastRowBlocks&, const LastRowBlocks&) = default;
};

using Query = std::variant<BlockValue, RowRoot, NodeChildren, LastRowBlocks>;

std::string describe(const Query& q);

// --- responses

enum class Agent { A, B };

using DigestPair = std::pair<Digest, Digest>;
using Payload = std::variant<std::monostate, Bytes, Digest, DigestPair, std::vector<Bytes>>;

struct Response {
  Payload payload;         // monostate = no answer
  bool oversized = false;  // the prover offered more than the query allows
  friend bool operator==(const Response&, const Response&) = default;
};

/// Strategy-side answer function. `history` holds every earlier query of this
/// arbitration, never the other agent's answers.
class ProverOracle {
 public:
  virtual ~ProverOracle() = default;
  virtual Response answer(const Query& query, std::span<const Query> history) = 0;
};

struct TranscriptRecord {
  std::size_t seq;
  Query query;
  Response a_response;
  Response b_response;
};

class Transcript {
 public:
  void append(TranscriptRecord record);
  [[nodiscard]] const std::vector<TranscriptRecord>& records() const { return records_; }
  [[nodiscard]] std::size_t queries() const { return records_.size(); }
  [[nodiscard]] std::size_t bytes() const { return bytes_; }

 private:
  std::vector<TranscriptRecord> records_;
  std::size_t bytes_ = 0;
};

struct Verdict {
  bool winner_a = false;
  bool winner_b = false;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Agents caught with an inconsistent or malformed answer.
struct Liars {
  bool a = false;
  bool b = false;
  friend bool operator==(const Liars&, const Liars&) = default;
};

struct DivergentBlock {
  std::size_t row, block;
  Bytes a_block, b_block;
  friend bool operator==(const DivergentBlock&, const DivergentBlock&) = default;
};

using DivergenceResult = std::variant<Liars, DivergentBlock>;

/// What the verifier knows without asking anyone.
struct VerifierInput {
  MachineSpec spec;
  std::string input;
  TableauShape shape;
};

/// One arbitration: owns the transcript and the verifier's hash meter.
class Arbiter {
 public:
  Arbiter(VerifierInput verifier, const HashScheme& scheme, ProverOracle& a, ProverOracle& b);

  /// Full case analysis for two different commitments. PreconditionViolated
  /// if they are equal.
  Verdict arbitrate(const Commitment& a, const Commitment& b);

  /// Binary descent from v (where the agents claim va != vb) to the leftmost
  /// leaf they disagree on. Malformed answers count as lies.
  DivergenceResult first_divergence(const Digest& va, const Digest& vb, const NodeAddress& v);

  [[nodiscard]] const Transcript& transcript() const { return transcript_; }
  [[nodiscard]] const EffortMeter& verifier_meter() const { return meter_; }

 private:
  struct Answers {
    Response a, b;
  };
  Answers ask(const Query& q);

  Verdict equal_roots(const Commitment& a, const Commitment& b);
  Verdict row_root_branch(const Commitment& a, const Commitment& b, std::size_t t);
  Verdict different_roots(const Commitment& a, const Commitment& b);
  DivergenceResult descend(const Digest& va, const Digest& vb, NodeAddress v);

  struct PathCheck {
    bool a_ok = false, b_ok = false;
    Digest a_end{}, b_end{};  // value of v implied by each bundle
    Bytes a_block, b_block;
  };
  /// Queries children along u..v from both agents and checks each agent's
  /// path from its own `top`. Blocks at leaf depth come from `blocks` when
  /// given, otherwise from a BlockValue query.
  PathCheck check_paths(const NodeAddress& u, const NodeAddress& v, const Digest& top_a,
                        const Digest& top_b, const std::pair<Bytes, Bytes>* blocks = nullptr);

  bool reports_output(const Bytes& block, const std::string& a) const;

  VerifierInput verifier_;
  const HashScheme& scheme_;
  ProverOracle& oracle_a_;
  ProverOracle& oracle_b_;
  Transcript transcript_;
  std::vector<Query> history_;
  EffortMeter meter_;
};

struct ArbitrationResult {
  Verdict verdict;
  Transcript transcript;
  EffortMeter verifier_meter;
};

ArbitrationResult arbitrate(const Commitment& a, const Commitment& b, ProverOracle& oracle_a,
                            ProverOracle& oracle_b, const HashScheme& scheme,
                            const VerifierInput& verifier);

/// True iff some cell of the block carries a halting state. MalformedBlock on
/// odd length or an unknown state byte.
bool check_halting_block(const MachineSpec& spec, std::span<const std::uint8_t> block);

/// True iff `block` is block j of the canonical first row for `input`.
bool verify_input_block(const MachineSpec& spec, std::string_view input, std::size_t j,
                        std::span<const std::uint8_t> block, const TableauShape& shape);

}  // namespace mrm
