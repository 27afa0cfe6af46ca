#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrm/effort.hpp"
#include "mrm/machine.hpp"

namespace mrm {

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes bytes_from_hex(std::string_view hex);   // throws OutOfRange on bad input
Digest digest_from_hex(std::string_view hex);

/// Keyed SHA-256: H_k(x) = SHA-256(k || x). Leaves hash 0x00 || block,
/// internal nodes hash 0x01 || left || right.
class HashScheme {
 public:
  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kDigestBits = 256;

  HashScheme(Bytes key, unsigned security_parameter);

  [[nodiscard]] const Bytes& key() const { return key_; }
  [[nodiscard]] unsigned security_parameter() const { return n_; }

  [[nodiscard]] Digest leaf_hash(std::span<const std::uint8_t> block,
                                 EffortMeter* meter = nullptr) const;
  [[nodiscard]] Digest node_hash(const Digest& left, const Digest& right,
                                 EffortMeter* meter = nullptr) const;
  /// Un-prefixed keyed hash of an arbitrary message.
  [[nodiscard]] Digest hash(std::span<const std::uint8_t> message,
                            EffortMeter* meter = nullptr) const;

  /// Metered cost of one call: 64-byte units of the (prefix || message) input.
  static std::int64_t units_for(std::size_t message_bytes);

 private:
  Digest keyed(std::uint8_t prefix, std::span<const std::uint8_t> a,
               std::span<const std::uint8_t> b) const;

  Bytes key_;
  unsigned n_;
};

/// Deterministic under `seed`; requires n >= 16.
HashScheme gen_key(unsigned n, std::uint64_t seed);

/// Position in the tableau tree as a bit string from the root: 0 = left child.
/// Depth log T addresses a row root, depth log T + log B a leaf r_ij, and one
/// more bit (always 0) the data block under that leaf.
class NodeAddress {
 public:
  static constexpr unsigned kMaxDepth = 63;

  NodeAddress() = default;
  static NodeAddress from_string(std::string_view bits);

  [[nodiscard]] unsigned depth() const { return depth_; }
  [[nodiscard]] std::uint64_t bits() const { return bits_; }
  [[nodiscard]] bool bit(unsigned k) const { return (bits_ >> (depth_ - 1 - k)) & 1U; }
  [[nodiscard]] NodeAddress child(bool right) const;
  [[nodiscard]] NodeAddress parent() const;
  [[nodiscard]] NodeAddress prefix(unsigned length) const;
  [[nodiscard]] bool is_ancestor_of(const NodeAddress& other) const;  // reflexive
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const NodeAddress&, const NodeAddress&) = default;

 private:
  NodeAddress(std::uint64_t bits, unsigned depth) : bits_(bits), depth_(depth) {}
  std::uint64_t bits_ = 0;
  unsigned depth_ = 0;
};

enum class NodeKind { Internal, Leaf, Block };

/// Throws OutOfRange for addresses deeper than a block.
NodeKind kind_of(const NodeAddress& a, const TableauShape& shape);
unsigned leaf_depth(const TableauShape& shape);

NodeAddress address_of(std::size_t i, std::size_t j, const TableauShape& shape);
NodeAddress row_address(std::size_t i, const TableauShape& shape);
NodeAddress block_address(std::size_t i, std::size_t j, const TableauShape& shape);
/// Inverse of address_of for leaf- and block-depth addresses.
std::pair<std::size_t, std::size_t> coordinates_of(const NodeAddress& a, const TableauShape& shape);

/// Merkle tree over one row's B blocks, heap-indexed (node 1 = row root).
class RowTree {
 public:
  RowTree() = default;
  explicit RowTree(std::vector<Digest> heap) : heap_(std::move(heap)) {}

  [[nodiscard]] const Digest& root() const { return heap_.at(1); }
  [[nodiscard]] std::size_t leaf_count() const { return heap_.size() / 2; }
  [[nodiscard]] const Digest& leaf(std::size_t j) const { return heap_.at(leaf_count() + j - 1); }
  /// Node `offset` (0-based, left to right) at `level` below the row root.
  [[nodiscard]] const Digest& node(unsigned level, std::uint64_t offset) const {
    return heap_.at((std::size_t{1} << level) + offset);
  }
  [[nodiscard]] const std::vector<Digest>& heap() const { return heap_; }

  friend bool operator==(const RowTree&, const RowTree&) = default;

 private:
  std::vector<Digest> heap_;  // size 2B, index 0 unused
};

RowTree build_row_tree(std::span<const Bytes> blocks, const HashScheme& scheme,
                       EffortMeter* meter = nullptr);

struct BlockRange {
  std::size_t first;  // 1-based, inclusive
  std::size_t last;
};

/// Updates `prev` for a successor row that may differ only inside `window`.
/// Rehashes exactly the changed leaves plus the union of their ancestors;
/// throws DivergesOutsideWindow if any block outside the window changed.
RowTree incremental_row_root(const RowTree& prev, std::span<const Bytes> prev_blocks,
                             std::span<const Bytes> next_blocks, BlockRange window,
                             const HashScheme& scheme, EffortMeter* meter = nullptr);

/// Two-level tree: one RowTree per stored row, a shared blank-row tree for the
/// rest, and an upper tree over the T row roots.
class TableauTree {
 public:
  TableauTree(TableauShape shape, std::vector<RowTree> rows, RowTree blank,
              const HashScheme& scheme, EffortMeter* meter = nullptr);

  [[nodiscard]] const TableauShape& shape() const { return shape_; }
  [[nodiscard]] const Digest& root() const { return upper_.at(1); }
  [[nodiscard]] const Digest& row_root(std::size_t i) const;
  [[nodiscard]] const RowTree& row_tree(std::size_t i) const;
  [[nodiscard]] const Digest& leaf(std::size_t i, std::size_t j) const;
  /// Value of any internal or leaf node.
  [[nodiscard]] const Digest& value(const NodeAddress& a) const;
  [[nodiscard]] std::pair<Digest, Digest> children(const NodeAddress& a) const;

  /// Swaps in a new tree for stored row i and rehashes the upper path.
  void replace_row(std::size_t i, RowTree tree, const HashScheme& scheme,
                   EffortMeter* meter = nullptr);

 private:
  TableauShape shape_;
  std::vector<RowTree> rows_;
  RowTree blank_;
  std::vector<Digest> upper_;  // heap over T row roots, index 0 unused
};

/// Batch build straight from the tableau (every row hashed from scratch).
TableauTree build_tree(const Tableau& tableau, const HashScheme& scheme,
                       EffortMeter* meter = nullptr);

/// Values needed to check the path from u down to v: u's value, both children
/// of every internal node on the path, and the data block once the path
/// reaches leaf depth.
struct PathBundle {
  Digest top;
  std::vector<std::pair<Digest, Digest>> children;
  std::optional<Bytes> block;
};

PathBundle extract_path(const TableauTree& tree, const Tableau& tableau, const NodeAddress& u,
                        const NodeAddress& v);

/// True iff every node on the u..v path hashes to its children (or its block).
/// Throws IncompleteBundle when the bundle lacks a required value and
/// PreconditionViolated when u is not an ancestor of v.
bool check_consistent_path(const HashScheme& scheme, const PathBundle& bundle,
                           const NodeAddress& u, const NodeAddress& v, const TableauShape& shape,
                           EffortMeter* meter = nullptr);

/// Digest of v implied by the bundle (v at internal or leaf depth), no hashing.
Digest path_terminal(const PathBundle& bundle, const NodeAddress& u, const NodeAddress& v);

}  // namespace mrm
