#include "mrm/arbitration.hpp"

#include <algorithm>

#include "mrm/error.hpp"

namespace mrm {

namespace {

// Thrown inside an arbitration when an agent answers with the wrong shape or
// not at all; the arbitration ends with the flagged agents as losers.
struct Forfeit {
  Liars who;
};

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

std::size_t payload_bytes(const Payload& p) {
  return std::visit(overloaded{[](const std::monostate&) -> std::size_t { return 0; },
                               [](const Bytes& b) { return b.size(); },
                               [](const Digest& d) { return d.size(); },
                               [](const DigestPair& d) { return 2 * d.first.size(); },
                               [](const std::vector<Bytes>& v) {
                                 std::size_t n = 0;
                                 for (const auto& b : v) n += b.size();
                                 return n;
                               }},
                    p);
}

bool well_formed(const Query& q, const Response& r, const TableauShape& shape) {
  if (r.oversized) return false;
  const std::size_t block = shape.block_bytes();
  return std::visit(
      overloaded{[&](const BlockValue&) {
                   const auto* b = std::get_if<Bytes>(&r.payload);
                   return b && b->size() == block;
                 },
                 [&](const RowRoot&) { return std::holds_alternative<Digest>(r.payload); },
                 [&](const NodeChildren&) { return std::holds_alternative<DigestPair>(r.payload); },
                 [&](const LastRowBlocks& q) {
                   const auto* v = std::get_if<std::vector<Bytes>>(&r.payload);
                   return v && v->size() == q.rows.size() &&
                          std::all_of(v->begin(), v->end(), [&](const Bytes& b) { return b.size() == block; });
                 }},
      q);
}

Verdict from_liars(const Liars& l) { return Verdict{!l.a, !l.b}; }

bool report_in_range(const Commitment& c, const TableauShape& shape) {
  return c.a.size() <= shape.lambda && c.t >= 1 && c.t <= shape.rows;
}

}  // namespace

std::string describe(const Query& q) {
  return std::visit(
      overloaded{[](const BlockValue& b) {
                   return "BlockValue(" + std::to_string(b.row) + "," + std::to_string(b.block) + ")";
                 },
                 [](const RowRoot& r) { return "RowRoot(" + std::to_string(r.row) + ")"; },
                 [](const NodeChildren& n) { return "NodeChildren(" + n.node.to_string() + ")"; },
                 [](const LastRowBlocks& l) {
                   std::string s = "LastRowBlocks(";
                   for (std::size_t k = 0; k < l.rows.size(); ++k) {
                     s += (k ? "," : "") + std::to_string(l.rows[k]);
                   }
                   return s + ")";
                 }},
      q);
}

void Transcript::append(TranscriptRecord record) {
  bytes_ += payload_bytes(record.a_response.payload) + payload_bytes(record.b_response.payload);
  records_.push_back(std::move(record));
}

bool check_halting_block(const MachineSpec& spec, std::span<const std::uint8_t> block) {
  bool halting = false;
  for (const Cell& c : decode_cells(block)) {
    if (!c.head) continue;
    if (*c.head >= spec.state_count()) throw Error(ErrorCode::MalformedBlock, "unknown state in block");
    halting = halting || spec.is_halting(*c.head);
  }
  return halting;
}

bool verify_input_block(const MachineSpec& spec, std::string_view input, std::size_t j,
                        std::span<const std::uint8_t> block, const TableauShape& shape) {
  if (j == 0 || j > shape.blocks_per_row()) return false;
  const Row first = initial_row(spec, spec.encode_input(input), shape.columns);
  const auto cells = std::span(first.cells).subspan((j - 1) * shape.lambda, shape.lambda);
  const Bytes expected = encode_cells(cells);
  return std::equal(expected.begin(), expected.end(), block.begin(), block.end());
}

Arbiter::Arbiter(VerifierInput verifier, const HashScheme& scheme, ProverOracle& a, ProverOracle& b)
    : verifier_(std::move(verifier)), scheme_(scheme), oracle_a_(a), oracle_b_(b) {
  verifier_.shape.validate();
}

Arbiter::Answers Arbiter::ask(const Query& q) {
  Answers ans{oracle_a_.answer(q, history_), oracle_b_.answer(q, history_)};
  transcript_.append(TranscriptRecord{transcript_.queries() + 1, q, ans.a, ans.b});
  history_.push_back(q);
  const Liars bad{!well_formed(q, ans.a, verifier_.shape), !well_formed(q, ans.b, verifier_.shape)};
  if (bad.a || bad.b) throw Forfeit{bad};
  return ans;
}

Verdict Arbiter::arbitrate(const Commitment& a, const Commitment& b) {
  if (a == b) throw Error(ErrorCode::PreconditionViolated, "arbitration needs different commitments");
  const auto& shape = verifier_.shape;
  const Liars bad{!report_in_range(a, shape), !report_in_range(b, shape)};
  if (bad.a || bad.b) return from_liars(bad);
  try {
    return a.r == b.r ? equal_roots(a, b) : different_roots(a, b);
  } catch (const Forfeit& f) {
    return from_liars(f.who);
  }
}

DivergenceResult Arbiter::first_divergence(const Digest& va, const Digest& vb, const NodeAddress& v) {
  if (va == vb) throw Error(ErrorCode::PreconditionViolated, "first_divergence needs va != vb");
  if (v.depth() > leaf_depth(verifier_.shape)) {
    throw Error(ErrorCode::PreconditionViolated, "first_divergence starts at a digest node");
  }
  try {
    return descend(va, vb, v);
  } catch (const Forfeit& f) {
    return f.who;
  }
}

DivergenceResult Arbiter::descend(const Digest& va_in, const Digest& vb_in, NodeAddress v) {
  const unsigned leaf = leaf_depth(verifier_.shape);
  Digest va = va_in, vb = vb_in;
  while (v.depth() < leaf) {
    const auto ans = ask(NodeChildren{v});
    const auto& [la, ra] = std::get<DigestPair>(ans.a.payload);
    const auto& [lb, rb] = std::get<DigestPair>(ans.b.payload);
    const Liars l{scheme_.node_hash(la, ra, &meter_) != va, scheme_.node_hash(lb, rb, &meter_) != vb};
    if (l.a || l.b) return l;
    if (la != lb) {
      v = v.child(false);
      va = la;
      vb = lb;
    } else if (ra != rb) {
      v = v.child(true);
      va = ra;
      vb = rb;
    } else {
      // Both consistent yet no child differs: only a hash collision gets here.
      return Liars{true, true};
    }
  }
  const auto [i, j] = coordinates_of(v, verifier_.shape);
  const auto ans = ask(BlockValue{i, j});
  const auto& ba = std::get<Bytes>(ans.a.payload);
  const auto& bb = std::get<Bytes>(ans.b.payload);
  const Liars l{scheme_.leaf_hash(ba, &meter_) != va, scheme_.leaf_hash(bb, &meter_) != vb};
  if (l.a || l.b) return l;
  return DivergentBlock{i, j, ba, bb};
}

Arbiter::PathCheck Arbiter::check_paths(const NodeAddress& u, const NodeAddress& v,
                                        const Digest& top_a, const Digest& top_b,
                                        const std::pair<Bytes, Bytes>* blocks) {
  const auto& shape = verifier_.shape;
  const unsigned leaf = leaf_depth(shape);
  const unsigned stop = v.depth() >= leaf ? leaf : v.depth() + 1;
  PathBundle pa{top_a, {}, std::nullopt}, pb{top_b, {}, std::nullopt};
  for (unsigned d = u.depth(); d < stop; ++d) {
    const auto ans = ask(NodeChildren{v.prefix(d)});
    pa.children.push_back(std::get<DigestPair>(ans.a.payload));
    pb.children.push_back(std::get<DigestPair>(ans.b.payload));
  }
  if (v.depth() >= leaf) {
    if (blocks) {
      pa.block = blocks->first;
      pb.block = blocks->second;
    } else {
      const auto [i, j] = coordinates_of(v, shape);
      const auto ans = ask(BlockValue{i, j});
      pa.block = std::get<Bytes>(ans.a.payload);
      pb.block = std::get<Bytes>(ans.b.payload);
    }
  }
  PathCheck out;
  out.a_ok = check_consistent_path(scheme_, pa, u, v, shape, &meter_);
  out.b_ok = check_consistent_path(scheme_, pb, u, v, shape, &meter_);
  if (v.depth() <= leaf) {
    out.a_end = path_terminal(pa, u, v);
    out.b_end = path_terminal(pb, u, v);
  }
  if (pa.block) out.a_block = *pa.block;
  if (pb.block) out.b_block = *pb.block;
  return out;
}

bool Arbiter::reports_output(const Bytes& block, const std::string& a) const {
  const auto& spec = verifier_.spec;
  try {
    if (!check_halting_block(spec, block)) return false;
  } catch (const Error&) {
    return false;
  }
  std::string text;
  for (const Cell& c : decode_cells(block)) text.push_back(spec.symbol_char(c.symbol));
  while (!text.empty() && text.back() == spec.symbol_char(spec.blank())) text.pop_back();
  return text == a;
}

Verdict Arbiter::equal_roots(const Commitment& a, const Commitment& b) {
  const auto& shape = verifier_.shape;
  if (a.t != b.t) {
    const bool a_high = a.t > b.t;
    const std::size_t tl = std::min(a.t, b.t), th = std::max(a.t, b.t);
    const auto ans = ask(LastRowBlocks{{tl, th}});
    const auto& va = std::get<std::vector<Bytes>>(ans.a.payload);
    const auto& vb = std::get<std::vector<Bytes>>(ans.b.payload);

    // Each block is trusted only after its path to the agreed root checks out.
    const std::pair<Bytes, Bytes> low_pair{va[0], vb[0]}, high_pair{va[1], vb[1]};
    const auto pl = check_paths(NodeAddress{}, address_of(tl, 1, shape), a.r, b.r, &low_pair);
    const auto ph = check_paths(NodeAddress{}, address_of(th, 1, shape), a.r, b.r, &high_pair);
    const bool ok_a = pl.a_ok && (!a_high || ph.a_ok);
    const bool ok_b = pl.b_ok && (a_high || ph.b_ok);
    if (!ok_a || !ok_b) return Verdict{ok_a, ok_b};

    const auto& high = a_high ? va : vb;
    const auto& low = a_high ? vb : va;
    auto halting = [&](const Bytes& block, bool is_a) {
      try {
        return check_halting_block(verifier_.spec, block);
      } catch (const Error&) {
        throw Forfeit{Liars{is_a, !is_a}};
      }
    };
    const Verdict high_wins{a_high, !a_high}, low_wins{!a_high, a_high};
    if (!halting(low[0], !a_high)) return high_wins;
    if (halting(high[0], a_high) || !halting(high[1], a_high)) return low_wins;
  }
  return row_root_branch(a, b, std::min(a.t, b.t));
}

Verdict Arbiter::row_root_branch(const Commitment& a, const Commitment& b, std::size_t t) {
  const auto& shape = verifier_.shape;
  const auto ans = ask(RowRoot{t});
  const auto& rta = std::get<Digest>(ans.a.payload);
  const auto& rtb = std::get<Digest>(ans.b.payload);
  if (rta == rtb) {
    // Path r_t .. r_{t,1}, and the block must actually report the output.
    const auto pc = check_paths(row_address(t, shape), address_of(t, 1, shape), rta, rtb);
    return Verdict{pc.a_ok && reports_output(pc.a_block, a.a), pc.b_ok && reports_output(pc.b_block, b.a)};
  }
  const auto pc = check_paths(NodeAddress{}, row_address(t, shape), a.r, b.r);
  return Verdict{pc.a_ok && pc.a_end == rta, pc.b_ok && pc.b_end == rtb};
}

Verdict Arbiter::different_roots(const Commitment& a, const Commitment& b) {
  const auto& shape = verifier_.shape;
  const auto result = descend(a.r, b.r, NodeAddress{});
  if (const auto* l = std::get_if<Liars>(&result)) return from_liars(*l);
  const auto& d = std::get<DivergentBlock>(result);

  if (d.row == 1) {
    return Verdict{verify_input_block(verifier_.spec, verifier_.input, d.block, d.a_block, shape),
                   verify_input_block(verifier_.spec, verifier_.input, d.block, d.b_block, shape)};
  }

  // Blocks j-1, j, j+1 of the previous row; out-of-range slots stay blank.
  const std::size_t B = shape.blocks_per_row();
  const Bytes blank = blank_block(verifier_.spec.blank(), shape.lambda);
  BlockWindow wa{blank, blank, blank}, wb{blank, blank, blank};
  std::optional<std::size_t> first_mismatch;
  for (std::size_t slot = 0; slot < 3; ++slot) {
    const std::size_t k = d.block + slot;  // block index k - 1
    if (k < 2 || k - 1 > B) continue;
    const auto ans = ask(BlockValue{d.row - 1, k - 1});
    wa[slot] = std::get<Bytes>(ans.a.payload);
    wb[slot] = std::get<Bytes>(ans.b.payload);
    if (!first_mismatch && wa[slot] != wb[slot]) first_mismatch = slot;
  }

  if (!first_mismatch) {
    Bytes expected;
    try {
      expected = local_transition(verifier_.spec, shape, wa, d.block);
    } catch (const Error&) {
      return Verdict{false, false};  // both vouch for an impossible predecessor
    }
    return Verdict{d.a_block == expected, d.b_block == expected};
  }
  const std::size_t k = d.block + *first_mismatch - 1;
  const std::pair<Bytes, Bytes> blocks{wa[*first_mismatch], wb[*first_mismatch]};
  const auto pc = check_paths(NodeAddress{}, address_of(d.row - 1, k, shape), a.r, b.r, &blocks);
  return Verdict{pc.a_ok, pc.b_ok};
}

ArbitrationResult arbitrate(const Commitment& a, const Commitment& b, ProverOracle& oracle_a,
                            ProverOracle& oracle_b, const HashScheme& scheme,
                            const VerifierInput& verifier) {
  Arbiter arbiter(verifier, scheme, oracle_a, oracle_b);
  const Verdict v = arbiter.arbitrate(a, b);
  return ArbitrationResult{v, arbiter.transcript(), arbiter.verifier_meter()};
}

}  // namespace mrm
