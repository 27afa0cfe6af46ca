#include "mrm/json_io.hpp"

#include <iomanip>
#include <sstream>

#include "mrm/error.hpp"

namespace mrm {

using nlohmann::json;

json to_json(const Commitment& c) { return json{{"a", c.a}, {"t", c.t}, {"r", to_hex(c.r)}}; }

Commitment commitment_from_json(const json& j) {
  try {
    return Commitment{j.at("a").get<std::string>(), j.at("t").get<std::size_t>(),
                      digest_from_hex(j.at("r").get<std::string>())};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("commitment: ") + e.what());
  }
}

json to_json(const EffortMeter& m) {
  return json{{"steps", m.steps()},
              {"hash_calls", m.hash_calls()},
              {"hash_units", m.hash_units()},
              {"queries", m.queries()},
              {"total", m.total()}};
}

json to_json(const Query& q) {
  if (const auto* b = std::get_if<BlockValue>(&q)) {
    return json{{"kind", "BlockValue"}, {"row", b->row}, {"block", b->block}};
  }
  if (const auto* r = std::get_if<RowRoot>(&q)) return json{{"kind", "RowRoot"}, {"row", r->row}};
  if (const auto* n = std::get_if<NodeChildren>(&q)) {
    return json{{"kind", "NodeChildren"}, {"node", n->node.to_string()}};
  }
  return json{{"kind", "LastRowBlocks"}, {"rows", std::get<LastRowBlocks>(q).rows}};
}

json to_json(const Response& r) {
  json payload = nullptr;
  if (const auto* b = std::get_if<Bytes>(&r.payload)) payload = to_hex(*b);
  if (const auto* d = std::get_if<Digest>(&r.payload)) payload = to_hex(*d);
  if (const auto* p = std::get_if<DigestPair>(&r.payload)) payload = json::array({to_hex(p->first), to_hex(p->second)});
  if (const auto* v = std::get_if<std::vector<Bytes>>(&r.payload)) {
    payload = json::array();
    for (const auto& b : *v) payload.push_back(to_hex(b));
  }
  return json{{"payload", payload}, {"oversized", r.oversized}};
}

json to_json(const Verdict& v) { return json{{"winner_a", v.winner_a}, {"winner_b", v.winner_b}}; }

json to_json(const Transcript& t) {
  json out = json::array();
  for (const auto& rec : t.records()) {
    out.push_back(json{{"seq", rec.seq},
                       {"query", to_json(rec.query)},
                       {"a_response", to_json(rec.a_response)},
                       {"b_response", to_json(rec.b_response)}});
  }
  return out;
}

json to_json(const PaymentParams& p) {
  return json{{"M_c", p.M_c},         {"M_ap", p.M_ap}, {"epsilon", p.epsilon}, {"delta", p.delta},
              {"n", p.n},             {"zeta", p.zeta}, {"b", p.b},             {"d2", p.d2},
              {"b_lower", p.b_lower()}, {"b_upper", p.b_upper()}};
}

namespace {

json agent_json(const AgentResult& a) {
  return json{{"strategy", a.strategy},
              {"commitment", to_json(a.commitment)},
              {"payment", a.payment},
              {"effort", a.meter.total()},
              {"meter", to_json(a.meter)},
              {"utility", a.utility}};
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

json to_json(const GameResult& g, const std::string& transcript_path) {
  json out{{"seed", g.seed},
           {"a", agent_json(g.a)},
           {"b", agent_json(g.b)},
           {"arbitration_used", g.arbitration_used},
           {"outcome", g.outcome}};
  if (g.arbitration) {
    out["verdict"] = to_json(g.arbitration->verdict);
    out["queries"] = g.arbitration->transcript.queries();
    out["verifier_hash_calls"] = g.arbitration->verifier_meter.hash_calls();
  }
  if (!transcript_path.empty()) out["transcript"] = transcript_path;
  return out;
}

std::string payoff_csv(const PayoffMatrix& m) {
  std::ostringstream s;
  s << "a\\b";
  for (const auto& id : m.ids) s << ',' << id;
  s << '\n';
  for (std::size_t r = 0; r < m.ids.size(); ++r) {
    s << m.ids[r];
    for (std::size_t c = 0; c < m.ids.size(); ++c) {
      s << ',' << number(m.at(r, c).mean_a) << '|' << number(m.at(r, c).mean_b);
    }
    s << '\n';
  }
  return s.str();
}

std::string nash_text(const PayoffMatrix& m, const NashReport& r) {
  std::ostringstream s;
  for (const auto& d : r.deviations) {
    s << "(" << m.ids[d.row] << ", " << m.ids[d.col] << ") unstable: "
      << (d.seat == Agent::A ? "A" : "B") << " -> " << d.to << " gains " << number(d.gain) << '\n';
  }
  const auto it = std::find(m.ids.begin(), m.ids.end(), "tau");
  if (it != m.ids.end()) {
    const auto k = static_cast<std::size_t>(it - m.ids.begin());
    s << "(tau, tau) " << (r.is_stable(k, k) ? "is a Nash equilibrium of the library" : "is NOT stable") << '\n';
  }
  return s.str();
}

}  // namespace mrm
