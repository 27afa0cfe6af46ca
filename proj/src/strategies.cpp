#include "mrm/strategies.hpp"

#include <algorithm>
#include <charconv>

#include "mrm/error.hpp"

namespace mrm {

Response TreeResponder::answer(const Query& query) const {
  const auto& shape = tableau_.shape();
  auto in_grid = [&](std::size_t i, std::size_t j) {
    return i >= 1 && i <= shape.rows && j >= 1 && j <= shape.blocks_per_row();
  };
  if (const auto* q = std::get_if<BlockValue>(&query)) {
    if (!in_grid(q->row, q->block)) return {};
    return Response{tableau_.block_bytes(q->row, q->block)};
  }
  if (const auto* q = std::get_if<RowRoot>(&query)) {
    if (!in_grid(q->row, 1)) return {};
    return Response{tree_.row_root(q->row)};
  }
  if (const auto* q = std::get_if<NodeChildren>(&query)) {
    if (q->node.depth() >= leaf_depth(shape)) return {};
    return Response{tree_.children(q->node)};
  }
  const auto& q = std::get<LastRowBlocks>(query);
  std::vector<Bytes> blocks;
  for (std::size_t i : q.rows) {
    if (!in_grid(i, 1)) return {};
    blocks.push_back(tableau_.block_bytes(i, 1));
  }
  return Response{std::move(blocks)};
}

std::vector<Row> compute_prefix(const MachineSpec& spec, std::string_view input,
                                const TableauShape& shape, std::size_t rows, EffortMeter& meter) {
  if (rows == 0 || rows > shape.rows) {
    throw Error(ErrorCode::InvalidStrategy, "prefix length must lie in [1, T]");
  }
  std::vector<Row> out{initial_row(spec, spec.encode_input(input), shape.columns)};
  while (out.size() < rows) {
    auto next = step(spec, out.back());
    if (std::holds_alternative<Halted>(next)) {
      throw Error(ErrorCode::InvalidStrategy, "machine halts inside the prefix");
    }
    meter.add_steps(1);
    out.push_back(std::move(std::get<Row>(next)));
  }
  const auto col = head_column(out.back());
  if (col && spec.is_halting(*out.back().cells[*col - 1].head)) {
    throw Error(ErrorCode::InvalidStrategy, "machine halts inside the prefix");
  }
  return out;
}

Row fabricated_halt_row(const MachineSpec& spec, const Row& last, std::size_t lambda) {
  std::optional<State> halt;
  for (std::size_t q = 0; q < spec.state_count() && !halt; ++q) {
    if (spec.is_halting(static_cast<State>(q))) halt = static_cast<State>(q);
  }
  if (!halt) throw Error(ErrorCode::InvalidStrategy, "machine has no halting state");
  Row r = blank_row(spec.blank(), last.cells.size(), last.index + 1);
  for (std::size_t c = 0; c < std::min(lambda, r.cells.size()); ++c) r.cells[c].symbol = last.cells[c].symbol;
  r.cells[0].head = halt;
  return r;
}

namespace {

/// Base for strategies that answer from their own tree.
class TreeStrategy : public Strategy {
 public:
  Response answer(const Query& query, std::span<const Query>) override {
    if (!responder_) return {};
    meter_.add_query();
    return responder_->answer(query);
  }

 protected:
  std::optional<TreeResponder> responder_;
};

class Tau : public TreeStrategy {
 public:
  [[nodiscard]] std::string id() const override { return "tau"; }
  [[nodiscard]] bool truthful() const override { return true; }

  Commitment commit(const VerifierInput& task, const HashScheme& scheme) override {
    auto result = mrm::commit(task.spec, task.input, task.shape, scheme, meter_);
    responder_.emplace(std::move(result.tableau), std::move(result.tree));
    return result.commitment;
  }
};

/// Computes `rows` rows, then optionally appends a made-up halting row.
class Lazy : public TreeStrategy {
 public:
  Lazy(std::string name, std::size_t rows, bool fake_halt)
      : name_(std::move(name)), rows_(rows), fake_halt_(fake_halt) {}

  [[nodiscard]] std::string id() const override { return name_; }

  Commitment commit(const VerifierInput& task, const HashScheme& scheme) override {
    const auto& shape = task.shape;
    auto rows = compute_prefix(task.spec, task.input, shape, rows_, meter_);
    TreeBuilder builder(shape, task.spec.blank(), scheme, meter_);
    for (const Row& r : rows) builder.push_row(r);
    if (fake_halt_) {
      if (rows.size() == shape.rows) throw Error(ErrorCode::InvalidStrategy, "no room for a halting row");
      rows.push_back(fabricated_halt_row(task.spec, rows.back(), shape.lambda));
      builder.push_row(rows.back(), false);
    }
    const std::string a = output_of(task.spec, rows.back(), shape.lambda);
    const std::size_t t = rows.size();
    auto tree = std::move(builder).finish();
    Commitment c{a, t, tree.root()};
    responder_.emplace(Tableau(task.spec.name(), task.input, shape, task.spec.blank(), std::move(rows), a),
                       std::move(tree));
    return c;
  }

 private:
  std::string name_;
  std::size_t rows_;
  bool fake_halt_;
};

Symbol flipped(const MachineSpec& spec, Symbol s) {
  const auto zero = spec.symbol_of('0'), one = spec.symbol_of('1');
  if (zero && one) {
    if (s == *zero) return *one;
    if (s == *one) return *zero;
  }
  const std::size_t n = spec.symbol_count();
  for (std::size_t k = 1; k < n; ++k) {
    const auto c = static_cast<Symbol>((s + k) % n);
    if (c != spec.blank()) return c;
  }
  return spec.blank();
}

/// Honest run with the first output symbol changed and the tree rebuilt over
/// the altered output row.
class Flip : public TreeStrategy {
 public:
  [[nodiscard]] std::string id() const override { return "flip"; }

  Commitment commit(const VerifierInput& task, const HashScheme& scheme) override {
    auto result = mrm::commit(task.spec, task.input, task.shape, scheme, meter_);
    const auto& shape = task.shape;
    std::vector<Row> rows(result.tableau.stored_rows().begin(), result.tableau.stored_rows().end());
    Row& last = rows.back();
    last.cells[0].symbol = flipped(task.spec, last.cells[0].symbol);
    const std::string a = output_of(task.spec, last, shape.lambda);
    const std::size_t t = rows.size();
    result.tree.replace_row(t, build_row_tree(row_block_bytes(last, shape.lambda), scheme, &meter_),
                            scheme, &meter_);
    Commitment c{a, t, result.tree.root()};
    responder_.emplace(Tableau(task.spec.name(), task.input, shape, task.spec.blank(), std::move(rows), a),
                       std::move(result.tree));
    return c;
  }
};

class Inflate : public TreeStrategy {
 public:
  explicit Inflate(std::size_t delta) : delta_(delta) {}
  [[nodiscard]] std::string id() const override { return "inflate:" + std::to_string(delta_); }

  Commitment commit(const VerifierInput& task, const HashScheme& scheme) override {
    auto result = mrm::commit(task.spec, task.input, task.shape, scheme, meter_);
    if (result.commitment.t + delta_ > task.shape.rows) {
      throw Error(ErrorCode::InvalidStrategy, "inflated time exceeds T");
    }
    Commitment c = result.commitment;
    c.t += delta_;
    responder_.emplace(std::move(result.tableau), std::move(result.tree));
    return c;
  }

 private:
  std::size_t delta_;
};

/// Fixed fabricated commitment; no computation, well-formed junk answers.
class Collude : public Strategy {
 public:
  [[nodiscard]] std::string id() const override { return "collude"; }

  Commitment commit(const VerifierInput& task, const HashScheme& scheme) override {
    shape_ = task.shape;
    static constexpr std::string_view kLabel = "collude";
    const Bytes label(kLabel.begin(), kLabel.end());
    return Commitment{"", task.shape.rows, scheme.hash(label, &meter_)};
  }

  Response answer(const Query& query, std::span<const Query>) override {
    if (!shape_) return {};
    meter_.add_query();
    const Bytes zeros(shape_->block_bytes(), 0);
    if (std::holds_alternative<BlockValue>(query)) return Response{zeros};
    if (std::holds_alternative<RowRoot>(query)) return Response{Digest{}};
    if (std::holds_alternative<NodeChildren>(query)) return Response{DigestPair{}};
    return Response{std::vector<Bytes>(std::get<LastRowBlocks>(query).rows.size(), zeros)};
  }

 private:
  std::optional<TableauShape> shape_;
};

/// Truthful commitment; corrupts its k-th arbitration answer.
class ApLiar : public Tau {
 public:
  explicit ApLiar(std::size_t k) : k_(k) {}
  [[nodiscard]] std::string id() const override { return "apliar:" + std::to_string(k_); }

  Response answer(const Query& query, std::span<const Query> history) override {
    Response r = Tau::answer(query, history);
    if (++answered_ != k_) return r;
    std::visit(
        [](auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, Bytes>) {
            p[0] ^= 1;
          } else if constexpr (std::is_same_v<P, Digest>) {
            p[0] ^= 1;
          } else if constexpr (std::is_same_v<P, DigestPair>) {
            p.first[0] ^= 1;
          } else if constexpr (std::is_same_v<P, std::vector<Bytes>>) {
            if (!p.empty()) p[0][0] ^= 1;
          }
        },
        r.payload);
    return r;
  }

 private:
  std::size_t k_;
  std::size_t answered_ = 0;
};

struct ParsedId {
  std::string kind;
  std::optional<std::size_t> param;
};

ParsedId parse_id(const std::string& id) {
  const auto colon = id.find(':');
  ParsedId p{id.substr(0, colon), std::nullopt};
  if (colon == std::string::npos) return p;
  const std::string digits = id.substr(colon + 1);
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || end != digits.data() + digits.size() || value == 0) {
    throw Error(ErrorCode::InvalidStrategy, "bad parameter in strategy id '" + id + "'");
  }
  p.param = value;
  return p;
}

}  // namespace

std::unique_ptr<Strategy> make_strategy(const std::string& id) {
  const auto p = parse_id(id);
  auto need = [&](bool with_param) {
    if (p.param.has_value() != with_param) {
      throw Error(ErrorCode::InvalidStrategy, "strategy '" + id + "' " +
                                                  (with_param ? "needs" : "takes no") + " parameter");
    }
  };
  if (p.kind == "tau") return need(false), std::make_unique<Tau>();
  if (p.kind == "flip") return need(false), std::make_unique<Flip>();
  if (p.kind == "collude") return need(false), std::make_unique<Collude>();
  if (p.kind == "lazy") return need(true), std::make_unique<Lazy>(id, *p.param, false);
  if (p.kind == "lazyhalt" || p.kind == "overclaim") {
    return need(true), std::make_unique<Lazy>(id, *p.param, true);
  }
  if (p.kind == "inflate") return need(true), std::make_unique<Inflate>(*p.param);
  if (p.kind == "apliar") return need(true), std::make_unique<ApLiar>(*p.param);
  throw Error(ErrorCode::InvalidStrategy, "unknown strategy '" + id + "'");
}

bool is_strategy_id(const std::string& id) {
  try {
    (void)make_strategy(id);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> default_library(std::size_t t) {
  const std::size_t i = std::max<std::size_t>(1, t >= 2 ? (t - 2) / 2 : 0);
  const std::string n = std::to_string(i);
  return {"tau",     "lazy:" + n, "lazyhalt:" + n, "flip", "inflate:1",
          "collude", "apliar:1",  "overclaim:" + std::to_string(i + 1)};
}

}  // namespace mrm
