#include "mrm/merkle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <random>
#include <set>

#include "mrm/error.hpp"

namespace mrm {

// --- hex

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes.size());
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Bytes bytes_from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorCode::OutOfRange, "not a hex digit");
  };
  if (hex.size() % 2 != 0) throw Error(ErrorCode::OutOfRange, "odd hex length");
  Bytes out(hex.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<std::uint8_t>(nibble(hex[2 * k]) << 4 | nibble(hex[2 * k + 1]));
  }
  return out;
}

Digest digest_from_hex(std::string_view hex) {
  const Bytes raw = bytes_from_hex(hex);
  if (raw.size() != Digest{}.size()) throw Error(ErrorCode::OutOfRange, "digest must be 32 bytes");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

// --- hashing

HashScheme::HashScheme(Bytes key, unsigned security_parameter)
    : key_(std::move(key)), n_(security_parameter) {
  if (key_.size() != kKeyBytes) throw Error(ErrorCode::PreconditionViolated, "key must be 32 bytes");
}

std::int64_t HashScheme::units_for(std::size_t message_bytes) {
  return static_cast<std::int64_t>((message_bytes + 1 + 63) / 64);
}

Digest HashScheme::keyed(std::uint8_t prefix, std::span<const std::uint8_t> a,
                         std::span<const std::uint8_t> b) const {
  Digest out{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned int len = 0;
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, key_.data(), key_.size()) == 1 &&
                  EVP_DigestUpdate(ctx, &prefix, 1) == 1 &&
                  EVP_DigestUpdate(ctx, a.data(), a.size()) == 1 &&
                  EVP_DigestUpdate(ctx, b.data(), b.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || len != out.size()) throw std::runtime_error("SHA-256 failed");
  return out;
}

Digest HashScheme::leaf_hash(std::span<const std::uint8_t> block, EffortMeter* meter) const {
  if (meter) meter->add_hash(units_for(block.size()));
  return keyed(0x00, block, {});
}

Digest HashScheme::node_hash(const Digest& left, const Digest& right, EffortMeter* meter) const {
  if (meter) meter->add_hash(units_for(2 * left.size()));
  return keyed(0x01, left, right);
}

Digest HashScheme::hash(std::span<const std::uint8_t> message, EffortMeter* meter) const {
  if (meter) meter->add_hash(units_for(message.size()));
  Digest out{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned int len = 0;
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, key_.data(), key_.size()) == 1 &&
                  EVP_DigestUpdate(ctx, message.data(), message.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-256 failed");
  return out;
}

HashScheme gen_key(unsigned n, std::uint64_t seed) {
  if (n < 16) throw Error(ErrorCode::PreconditionViolated, "security parameter must be >= 16");
  std::mt19937_64 rng(seed);
  Bytes key(HashScheme::kKeyBytes);
  for (std::size_t k = 0; k < key.size(); k += 8) {
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < 8; ++b) key[k + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return HashScheme(std::move(key), n);
}

// --- addresses

NodeAddress NodeAddress::from_string(std::string_view bits) {
  if (bits.size() > kMaxDepth) throw Error(ErrorCode::OutOfRange, "address too deep");
  NodeAddress a;
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error(ErrorCode::OutOfRange, "address must be a bit string");
    a = a.child(c == '1');
  }
  return a;
}

NodeAddress NodeAddress::child(bool right) const {
  if (depth_ >= kMaxDepth) throw Error(ErrorCode::OutOfRange, "address too deep");
  return NodeAddress((bits_ << 1) | (right ? 1U : 0U), depth_ + 1);
}

NodeAddress NodeAddress::parent() const {
  if (depth_ == 0) throw Error(ErrorCode::OutOfRange, "root has no parent");
  return NodeAddress(bits_ >> 1, depth_ - 1);
}

NodeAddress NodeAddress::prefix(unsigned length) const {
  if (length > depth_) throw Error(ErrorCode::OutOfRange, "prefix longer than address");
  return NodeAddress(bits_ >> (depth_ - length), length);
}

bool NodeAddress::is_ancestor_of(const NodeAddress& other) const {
  return depth_ <= other.depth_ && other.prefix(depth_) == *this;
}

std::string NodeAddress::to_string() const {
  std::string out;
  for (unsigned k = 0; k < depth_; ++k) out.push_back(bit(k) ? '1' : '0');
  return out;
}

unsigned leaf_depth(const TableauShape& shape) { return shape.log_rows() + shape.log_blocks(); }

NodeKind kind_of(const NodeAddress& a, const TableauShape& shape) {
  const unsigned leaf = leaf_depth(shape);
  if (a.depth() < leaf) return NodeKind::Internal;
  if (a.depth() == leaf) return NodeKind::Leaf;
  if (a.depth() == leaf + 1 && !a.bit(leaf)) return NodeKind::Block;
  throw Error(ErrorCode::OutOfRange, "address outside the tree: " + a.to_string());
}

NodeAddress address_of(std::size_t i, std::size_t j, const TableauShape& shape) {
  if (i == 0 || i > shape.rows || j == 0 || j > shape.blocks_per_row()) {
    throw Error(ErrorCode::OutOfRange, "block coordinates outside the T x B grid");
  }
  NodeAddress a;
  const std::uint64_t bits = ((i - 1) << shape.log_blocks()) | (j - 1);
  for (unsigned k = leaf_depth(shape); k-- > 0;) a = a.child((bits >> k) & 1U);
  return a;
}

NodeAddress row_address(std::size_t i, const TableauShape& shape) {
  return address_of(i, 1, shape).prefix(shape.log_rows());
}

NodeAddress block_address(std::size_t i, std::size_t j, const TableauShape& shape) {
  return address_of(i, j, shape).child(false);
}

std::pair<std::size_t, std::size_t> coordinates_of(const NodeAddress& a,
                                                   const TableauShape& shape) {
  const NodeKind kind = kind_of(a, shape);
  if (kind == NodeKind::Internal) throw Error(ErrorCode::OutOfRange, "not a leaf address");
  const NodeAddress leaf = kind == NodeKind::Block ? a.parent() : a;
  const std::uint64_t mask = (std::uint64_t{1} << shape.log_blocks()) - 1;
  return {static_cast<std::size_t>(leaf.bits() >> shape.log_blocks()) + 1,
          static_cast<std::size_t>(leaf.bits() & mask) + 1};
}

// --- row trees

RowTree build_row_tree(std::span<const Bytes> blocks, const HashScheme& scheme,
                       EffortMeter* meter) {
  const std::size_t count = blocks.size();
  std::vector<Digest> heap(2 * count);
  for (std::size_t j = 0; j < count; ++j) heap[count + j] = scheme.leaf_hash(blocks[j], meter);
  for (std::size_t p = count; p-- > 1;) heap[p] = scheme.node_hash(heap[2 * p], heap[2 * p + 1], meter);
  return RowTree(std::move(heap));
}

RowTree incremental_row_root(const RowTree& prev, std::span<const Bytes> prev_blocks,
                             std::span<const Bytes> next_blocks, BlockRange window,
                             const HashScheme& scheme, EffortMeter* meter) {
  const std::size_t count = prev.leaf_count();
  if (prev_blocks.size() != count || next_blocks.size() != count) {
    throw Error(ErrorCode::PreconditionViolated, "block count differs from the row tree");
  }
  std::vector<Digest> heap = prev.heap();
  std::set<std::size_t, std::greater<>> dirty;
  for (std::size_t j = 0; j < count; ++j) {
    if (prev_blocks[j] == next_blocks[j]) continue;
    if (j + 1 < window.first || j + 1 > window.last) {
      throw Error(ErrorCode::DivergesOutsideWindow,
                  "block " + std::to_string(j + 1) + " changed outside the active window");
    }
    heap[count + j] = scheme.leaf_hash(next_blocks[j], meter);
    for (std::size_t p = (count + j) / 2; p >= 1; p /= 2) dirty.insert(p);
  }
  // Descending heap order visits children before parents.
  for (std::size_t p : dirty) heap[p] = scheme.node_hash(heap[2 * p], heap[2 * p + 1], meter);
  return RowTree(std::move(heap));
}

// --- tableau tree

TableauTree::TableauTree(TableauShape shape, std::vector<RowTree> rows, RowTree blank,
                         const HashScheme& scheme, EffortMeter* meter)
    : shape_(shape), rows_(std::move(rows)), blank_(std::move(blank)) {
  shape_.validate();
  if (rows_.size() > shape_.rows) throw Error(ErrorCode::InvalidShape, "more row trees than T");
  const std::size_t T = shape_.rows;
  upper_.assign(2 * T, Digest{});
  for (std::size_t i = 1; i <= T; ++i) upper_[T + i - 1] = row_tree(i).root();
  for (std::size_t p = T; p-- > 1;) upper_[p] = scheme.node_hash(upper_[2 * p], upper_[2 * p + 1], meter);
}

const RowTree& TableauTree::row_tree(std::size_t i) const {
  if (i == 0 || i > shape_.rows) throw Error(ErrorCode::OutOfRange, "row index");
  return i <= rows_.size() ? rows_[i - 1] : blank_;
}

const Digest& TableauTree::row_root(std::size_t i) const { return row_tree(i).root(); }

const Digest& TableauTree::leaf(std::size_t i, std::size_t j) const {
  if (j == 0 || j > shape_.blocks_per_row()) throw Error(ErrorCode::OutOfRange, "block index");
  return row_tree(i).leaf(j);
}

const Digest& TableauTree::value(const NodeAddress& a) const {
  if (kind_of(a, shape_) == NodeKind::Block) {
    throw Error(ErrorCode::OutOfRange, "blocks have no digest");
  }
  const unsigned log_t = shape_.log_rows();
  if (a.depth() <= log_t) return upper_.at((std::size_t{1} << a.depth()) + a.bits());
  const unsigned level = a.depth() - log_t;
  const std::size_t row = static_cast<std::size_t>(a.bits() >> level) + 1;
  return row_tree(row).node(level, a.bits() & ((std::uint64_t{1} << level) - 1));
}

std::pair<Digest, Digest> TableauTree::children(const NodeAddress& a) const {
  if (kind_of(a, shape_) != NodeKind::Internal) {
    throw Error(ErrorCode::OutOfRange, "node has no digest children");
  }
  return {value(a.child(false)), value(a.child(true))};
}

void TableauTree::replace_row(std::size_t i, RowTree tree, const HashScheme& scheme,
                              EffortMeter* meter) {
  if (i == 0 || i > rows_.size()) throw Error(ErrorCode::OutOfRange, "only stored rows can change");
  rows_[i - 1] = std::move(tree);
  const std::size_t T = shape_.rows;
  upper_[T + i - 1] = rows_[i - 1].root();
  for (std::size_t p = (T + i - 1) / 2; p >= 1; p /= 2) {
    upper_[p] = scheme.node_hash(upper_[2 * p], upper_[2 * p + 1], meter);
  }
}

TableauTree build_tree(const Tableau& tableau, const HashScheme& scheme, EffortMeter* meter) {
  const auto& shape = tableau.shape();
  auto row_blocks = [&](std::size_t i) {
    std::vector<Bytes> blocks;
    for (std::size_t j = 1; j <= shape.blocks_per_row(); ++j) blocks.push_back(tableau.block_bytes(i, j));
    return blocks;
  };
  std::vector<RowTree> rows;
  rows.reserve(tableau.t());
  for (std::size_t i = 1; i <= tableau.t(); ++i) rows.push_back(build_row_tree(row_blocks(i), scheme, meter));
  const std::vector<Bytes> blank(shape.blocks_per_row(), blank_block(tableau.blank(), shape.lambda));
  RowTree blank_tree = build_row_tree(blank, scheme, meter);
  return TableauTree(shape, std::move(rows), std::move(blank_tree), scheme, meter);
}

// --- paths

PathBundle extract_path(const TableauTree& tree, const Tableau& tableau, const NodeAddress& u,
                        const NodeAddress& v) {
  const auto& shape = tree.shape();
  if (!u.is_ancestor_of(v)) throw Error(ErrorCode::PreconditionViolated, "u is not an ancestor of v");
  kind_of(v, shape);
  const unsigned leaf = leaf_depth(shape);
  PathBundle bundle{tree.value(u), {}, std::nullopt};
  const unsigned stop = v.depth() >= leaf ? leaf : v.depth() + 1;
  for (unsigned d = u.depth(); d < stop; ++d) bundle.children.push_back(tree.children(v.prefix(d)));
  if (v.depth() >= leaf) {
    const auto [i, j] = coordinates_of(v.prefix(leaf), shape);
    bundle.block = tableau.block_bytes(i, j);
  }
  return bundle;
}

bool check_consistent_path(const HashScheme& scheme, const PathBundle& bundle,
                           const NodeAddress& u, const NodeAddress& v, const TableauShape& shape,
                           EffortMeter* meter) {
  if (!u.is_ancestor_of(v)) throw Error(ErrorCode::PreconditionViolated, "u is not an ancestor of v");
  if (kind_of(u, shape) == NodeKind::Block) {
    throw Error(ErrorCode::PreconditionViolated, "path must start at a digest node");
  }
  kind_of(v, shape);
  const unsigned leaf = leaf_depth(shape);
  // Every node w on the path is checked, v included; v's own children are
  // needed when v is internal.
  const unsigned last_internal = std::min(v.depth(), leaf);  // exclusive
  const std::size_t needed = last_internal > u.depth() ? last_internal - u.depth() : 0;
  const bool reaches_leaf = v.depth() >= leaf;
  const std::size_t internal_checks = reaches_leaf ? needed : needed + 1;
  if (bundle.children.size() < internal_checks || (reaches_leaf && !bundle.block)) {
    throw Error(ErrorCode::IncompleteBundle, "bundle lacks values for the u-v path");
  }

  Digest value = bundle.top;
  for (std::size_t k = 0; k < internal_checks; ++k) {
    const auto& [left, right] = bundle.children[k];
    if (scheme.node_hash(left, right, meter) != value) return false;
    const unsigned depth = u.depth() + static_cast<unsigned>(k);
    if (depth < v.depth()) value = v.bit(depth) ? right : left;
  }
  if (reaches_leaf) return scheme.leaf_hash(*bundle.block, meter) == value;
  return true;
}

Digest path_terminal(const PathBundle& bundle, const NodeAddress& u, const NodeAddress& v) {
  if (!u.is_ancestor_of(v)) throw Error(ErrorCode::PreconditionViolated, "u is not an ancestor of v");
  if (bundle.children.size() < v.depth() - u.depth()) {
    throw Error(ErrorCode::IncompleteBundle, "bundle does not reach v");
  }
  Digest value = bundle.top;
  for (unsigned d = u.depth(); d < v.depth(); ++d) {
    const auto& [left, right] = bundle.children[d - u.depth()];
    value = v.bit(d) ? right : left;
  }
  return value;
}

}  // namespace mrm
