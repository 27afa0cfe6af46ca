#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mrm/arbitration.hpp"
#include "mrm/error.hpp"
#include "harness.hpp"
#include "mrm/strategies.hpp"

using namespace mrm;
using namespace mrm::testing;

namespace {

struct Fixture {
  MachineSpec spec = palindrome();
  std::string input = "abba";
  TableauShape shape = TableauShape::make(64, 16, 4);
  HashScheme scheme = gen_key(40, 99);
  Tableau tab = run_tableau(spec, input, shape);
  Commitment truth() const { return Commitment{tab.output(), tab.t(), build_tree(tab, scheme).root()}; }
  VerifierInput verifier() const { return VerifierInput{spec, input, shape}; }
};

}  // namespace

TEST_CASE("check_halting_block") {
  Fixture f;
  CHECK(check_halting_block(f.spec, f.tab.block_bytes(f.tab.t(), 1)));
  CHECK_FALSE(check_halting_block(f.spec, blank_block(f.spec.blank(), 4)));
  for (std::size_t j = 1; j <= f.shape.blocks_per_row(); ++j) {
    CHECK_FALSE(check_halting_block(f.spec, f.tab.block_bytes(f.tab.t() - 1, j)));
  }
  CHECK_THROWS_AS(check_halting_block(f.spec, Bytes{1, 2, 3}), Error);
  Bytes bad = blank_block(f.spec.blank(), 4);
  bad[1] = 250;
  CHECK_THROWS_AS(check_halting_block(f.spec, bad), Error);
}

TEST_CASE("verify_input_block") {
  Fixture f;
  for (std::size_t j = 1; j <= f.shape.blocks_per_row(); ++j) {
    CHECK(verify_input_block(f.spec, f.input, j, f.tab.block_bytes(1, j), f.shape));
  }
  Bytes altered = f.tab.block_bytes(1, 1);
  altered[2] = *f.spec.symbol_of('a');  // cell 2: 'b' -> 'a'
  CHECK_FALSE(verify_input_block(f.spec, f.input, 1, altered, f.shape));
  Bytes moved = f.tab.block_bytes(1, 1);
  std::swap(moved[1], moved[3]);  // head annotation onto cell 2
  CHECK_FALSE(verify_input_block(f.spec, f.input, 1, moved, f.shape));
  CHECK_FALSE(verify_input_block(f.spec, f.input, 0, f.tab.block_bytes(1, 1), f.shape));
}

TEST_CASE("first_divergence finds the row-major first differing block") {
  Fixture f;
  SUBCASE("fixed corruption at (5, 2)") {
    const auto bad = corrupt(f.tab, {{5, 2}, {7, 1}, {9, 3}});
    Scripted a(f.tab, f.scheme), b(bad, f.scheme);
    Arbiter arb(f.verifier(), f.scheme, a, b);
    const auto res = arb.first_divergence(a.tree().root(), b.tree().root(), NodeAddress{});
    REQUIRE(std::holds_alternative<DivergentBlock>(res));
    const auto& d = std::get<DivergentBlock>(res);
    CHECK(d.row == 5);
    CHECK(d.block == 2);
    CHECK(d.a_block == f.tab.block_bytes(5, 2));
    CHECK(d.b_block == bad.block_bytes(5, 2));
    CHECK(arb.transcript().queries() == leaf_depth(f.shape) + 1);
  }
  SUBCASE("random corruptions against a linear scan") {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<std::pair<std::size_t, std::size_t>> where;
      const int k = 1 + static_cast<int>(rng() % 3);
      for (int c = 0; c < k; ++c) {
        where.emplace_back(1 + rng() % f.tab.t(), 1 + rng() % f.shape.blocks_per_row());
      }
      const auto bad = corrupt(f.tab, where);
      const auto expected = linear_first_difference(f.tab, bad);
      Scripted a(f.tab, f.scheme), b(bad, f.scheme);
      if (!expected) continue;  // two edits cancelled out
      const bool swap = trial % 2;
      Arbiter arb(f.verifier(), f.scheme, swap ? b : a, swap ? a : b);
      const auto res = swap ? arb.first_divergence(b.tree().root(), a.tree().root(), NodeAddress{})
                            : arb.first_divergence(a.tree().root(), b.tree().root(), NodeAddress{});
      REQUIRE(std::holds_alternative<DivergentBlock>(res));
      CHECK(std::get<DivergentBlock>(res).row == expected->first);
      CHECK(std::get<DivergentBlock>(res).block == expected->second);
    }
  }
  SUBCASE("an inconsistent node value names its author") {
    const auto bad = corrupt(f.tab, {{3, 1}});
    auto lie = [](const Query& q, Response& r) {
      if (const auto* n = std::get_if<NodeChildren>(&q); n && n->node.depth() == 2) {
        std::get<DigestPair>(r.payload).second[0] ^= 1;
      }
    };
    Scripted a(f.tab, f.scheme), b(bad, f.scheme, lie);
    Arbiter arb(f.verifier(), f.scheme, a, b);
    const auto res = arb.first_divergence(a.tree().root(), b.tree().root(), NodeAddress{});
    REQUIRE(std::holds_alternative<Liars>(res));
    CHECK(std::get<Liars>(res) == Liars{false, true});

    Scripted a2(f.tab, f.scheme, lie), b2(bad, f.scheme, lie);
    Arbiter both(f.verifier(), f.scheme, a2, b2);
    const auto res2 = both.first_divergence(a2.tree().root(), b2.tree().root(), NodeAddress{});
    REQUIRE(std::holds_alternative<Liars>(res2));
    CHECK(std::get<Liars>(res2) == Liars{true, true});
  }
  SUBCASE("a leaf that does not hash to its block") {
    const auto bad = corrupt(f.tab, {{4, 2}});
    auto swap_block = [&](const Query& q, Response& r) {
      if (std::holds_alternative<BlockValue>(q)) std::get<Bytes>(r.payload)[0] ^= 1;
    };
    Scripted a(f.tab, f.scheme, swap_block), b(bad, f.scheme);
    Arbiter arb(f.verifier(), f.scheme, a, b);
    const auto res = arb.first_divergence(a.tree().root(), b.tree().root(), NodeAddress{});
    CHECK(std::get<Liars>(res) == Liars{true, false});
  }
  SUBCASE("a malformed answer counts as a lie") {
    const auto bad = corrupt(f.tab, {{4, 2}});
    auto mute = [](const Query&, Response& r) { r.payload = std::monostate{}; };
    Scripted a(f.tab, f.scheme), b(bad, f.scheme, mute);
    Arbiter arb(f.verifier(), f.scheme, a, b);
    const auto res = arb.first_divergence(a.tree().root(), b.tree().root(), NodeAddress{});
    CHECK(std::get<Liars>(res) == Liars{false, true});
  }
}

TEST_CASE("arbitrate: honest side beats an internally consistent wrong tree") {
  Fixture f;
  auto tau = make_strategy("tau");
  auto flip = make_strategy("flip");
  const auto ca = tau->commit(f.verifier(), f.scheme);
  const auto cb = flip->commit(f.verifier(), f.scheme);
  CHECK(ca == f.truth());
  CHECK(cb.a == "0");
  const auto res = arbitrate(ca, cb, *tau, *flip, f.scheme, f.verifier());
  CHECK(res.verdict == Verdict{true, false});
  CHECK(res.verifier_meter.hash_calls() > 0);

  const auto swapped = arbitrate(cb, ca, *flip, *tau, f.scheme, f.verifier());
  CHECK(swapped.verdict == Verdict{false, true});

  CHECK_THROWS_AS(arbitrate(ca, ca, *tau, *tau, f.scheme, f.verifier()), Error);
}

TEST_CASE("arbitrate: inflated time with the honest tree loses at the halting check") {
  Fixture f;
  auto inflate = make_strategy("inflate:3");
  auto tau = make_strategy("tau");
  const auto ca = inflate->commit(f.verifier(), f.scheme);
  const auto cb = tau->commit(f.verifier(), f.scheme);
  CHECK(ca.r == cb.r);
  CHECK(ca.t == cb.t + 3);
  const auto res = arbitrate(ca, cb, *inflate, *tau, f.scheme, f.verifier());
  CHECK(res.verdict == Verdict{false, true});
  REQUIRE(!res.transcript.records().empty());
  CHECK(std::holds_alternative<LastRowBlocks>(res.transcript.records().front().query));
  for (const auto& rec : res.transcript.records()) CHECK_FALSE(std::holds_alternative<RowRoot>(rec.query));
}

TEST_CASE("arbitrate: the low side without a halting state loses") {
  Fixture f;
  Scripted honest(f.tab, f.scheme), same(f.tab, f.scheme);
  const auto truth = f.truth();
  Commitment early = truth;
  early.t -= 2;  // same tree, claims to halt two rows early
  const auto res = arbitrate(truth, early, honest, same, f.scheme, f.verifier());
  CHECK(res.verdict == Verdict{true, false});
}

TEST_CASE("arbitrate: same tree and time, different output") {
  Fixture f;
  const auto truth = f.truth();
  Commitment wrong = truth;
  wrong.a = "0";
  SUBCASE("row roots agree: the block must report the output") {
    Scripted a(f.tab, f.scheme), b(f.tab, f.scheme);
    const auto res = arbitrate(truth, wrong, a, b, f.scheme, f.verifier());
    CHECK(res.verdict == Verdict{true, false});
    CHECK(std::holds_alternative<RowRoot>(res.transcript.records().front().query));
  }
  SUBCASE("row roots differ: the path to the root decides") {
    Scripted a(f.tab, f.scheme);
    Scripted b(f.tab, f.scheme, [](const Query& q, Response& r) {
      if (std::holds_alternative<RowRoot>(q)) std::get<Digest>(r.payload)[0] ^= 1;
    });
    const auto res = arbitrate(truth, wrong, a, b, f.scheme, f.verifier());
    CHECK(res.verdict == Verdict{true, false});
  }
}

TEST_CASE("arbitrate: first-row divergence is checked against the input") {
  Fixture f;
  const auto bad = corrupt(f.tab, {{1, 2}});
  Scripted a(f.tab, f.scheme), b(bad, f.scheme);
  const Commitment cb{bad.output(), bad.t(), b.tree().root()};
  const auto res = arbitrate(f.truth(), cb, a, b, f.scheme, f.verifier());
  CHECK(res.verdict == Verdict{true, false});
}

TEST_CASE("arbitrate: disagreement on the predecessor window") {
  // B's tree is wrong in row 6 and again in row 7, so the divergence at row 6
  // is found first; a forged predecessor would need a second consistent path.
  Fixture f;
  const auto bad = corrupt(f.tab, {{6, 1}, {7, 1}});
  Scripted a(f.tab, f.scheme), b(bad, f.scheme);
  const Commitment cb{bad.output(), bad.t(), b.tree().root()};
  const auto res = arbitrate(f.truth(), cb, a, b, f.scheme, f.verifier());
  CHECK(res.verdict == Verdict{true, false});

  // An agent that answers the window with a block it never committed to is
  // caught by the path check.
  const auto late = corrupt(f.tab, {{8, 1}});
  Scripted c(late, f.scheme, [](const Query& q, Response& r) {
    if (const auto* bv = std::get_if<BlockValue>(&q); bv && bv->row == 7) std::get<Bytes>(r.payload)[0] ^= 1;
  });
  const Commitment cc{late.output(), late.t(), c.tree().root()};
  const auto res2 = arbitrate(f.truth(), cc, a, c, f.scheme, f.verifier());
  CHECK(res2.verdict == Verdict{true, false});
}

TEST_CASE("arbitrate: malformed, absent and oversized answers forfeit") {
  Fixture f;
  const auto bad = corrupt(f.tab, {{5, 1}});
  const Commitment cb{bad.output(), bad.t(), build_tree(bad, f.scheme).root()};
  Scripted a(f.tab, f.scheme);
  Scripted mute(bad, f.scheme, [](const Query&, Response& r) { r.payload = std::monostate{}; });
  CHECK(arbitrate(f.truth(), cb, a, mute, f.scheme, f.verifier()).verdict == Verdict{true, false});
  Scripted big(bad, f.scheme, [](const Query&, Response& r) { r.oversized = true; });
  CHECK(arbitrate(f.truth(), cb, a, big, f.scheme, f.verifier()).verdict == Verdict{true, false});
  Scripted wrong_kind(bad, f.scheme, [](const Query&, Response& r) { r.payload = Digest{}; });
  CHECK(arbitrate(f.truth(), cb, a, wrong_kind, f.scheme, f.verifier()).verdict == Verdict{true, false});

  Commitment oversized = f.truth();
  oversized.a = std::string(f.shape.lambda + 1, '1');
  Scripted b(f.tab, f.scheme);
  CHECK(arbitrate(f.truth(), oversized, a, b, f.scheme, f.verifier()).verdict == Verdict{true, false});
  Commitment late = f.truth();
  late.t = f.shape.rows + 1;
  CHECK(arbitrate(late, f.truth(), a, b, f.scheme, f.verifier()).verdict == Verdict{false, true});
}

TEST_CASE("oracles see the query history, and transcripts replay byte for byte") {
  Fixture f;
  auto run = [&] {
    auto tau = make_strategy("tau");
    auto lazy = make_strategy("lazyhalt:3");
    const auto ca = tau->commit(f.verifier(), f.scheme);
    const auto cb = lazy->commit(f.verifier(), f.scheme);
    return arbitrate(ca, cb, *tau, *lazy, f.scheme, f.verifier());
  };
  const auto x = run(), y = run();
  REQUIRE(x.transcript.queries() == y.transcript.queries());
  for (std::size_t k = 0; k < x.transcript.queries(); ++k) {
    const auto& rx = x.transcript.records()[k];
    const auto& ry = y.transcript.records()[k];
    CHECK(rx.seq == k + 1);
    CHECK(describe(rx.query) == describe(ry.query));
    CHECK(rx.a_response == ry.a_response);
    CHECK(rx.b_response == ry.b_response);
  }
  CHECK(x.transcript.bytes() == y.transcript.bytes());

  const auto bad = corrupt(f.tab, {{5, 1}});
  Scripted a(f.tab, f.scheme), b(bad, f.scheme);
  const auto res = arbitrate(f.truth(), Commitment{bad.output(), bad.t(), b.tree().root()}, a, b, f.scheme,
                             f.verifier());
  CHECK(a.seen_history_ + 1 == res.transcript.queries());
}

TEST_CASE("tau wins against every library strategy, with logarithmic transcripts") {
  struct Case {
    MachineSpec spec;
    std::string input;
    TableauShape shape;
  };
  std::vector<Case> cases{{unary(), "111", TableauShape::make(64, 16, 8)},
                          {binary_add(), "0101+11", TableauShape::make(128, 16, 8)},
                          {palindrome(), "abba", TableauShape::make(64, 16, 8)}};
  for (const auto& c : cases) {
    const VerifierInput v{c.spec, c.input, c.shape};
    const auto t = run_tableau(c.spec, c.input, c.shape).t();
    const std::size_t bound = 6 * (c.shape.log_rows() + c.shape.log_blocks()) + 12;
    for (const auto& id : default_library(t)) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto scheme = gen_key(40, seed);
        auto tau = make_strategy("tau");
        auto other = make_strategy(id);
        const auto ca = tau->commit(v, scheme);
        const auto cb = other->commit(v, scheme);
        if (ca == cb) {
          CHECK(other->truthful());
          continue;
        }
        const auto res = arbitrate(ca, cb, *tau, *other, scheme, v);
        CHECK_MESSAGE(res.verdict.winner_a, c.spec.name() << " vs " << id);
        CHECK_FALSE(res.verdict.winner_b);
        CHECK(res.transcript.queries() <= bound);
      }
    }
  }
}
