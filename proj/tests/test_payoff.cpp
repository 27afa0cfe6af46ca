#include <doctest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "mrm/error.hpp"
#include "mrm/json_io.hpp"
#include "mrm/payoff.hpp"

using namespace mrm;
using namespace mrm::testing;

namespace {

const GameSetup& setup() {
  static const GameSetup s = prepare_game(palindrome(), "abba", TableauShape::make(64, 16, 4));
  return s;
}

std::vector<std::string> library() {
  return default_library(run_tableau(setup().task.spec, setup().task.input, setup().task.shape).t());
}

PayoffMatrix hand_matrix(const std::vector<std::pair<double, double>>& cells) {
  PayoffMatrix m{{"x", "y"}, 1, {}};
  for (const auto& [a, b] : cells) {
    CellStats c;
    c.mean_a = a;
    c.mean_b = b;
    m.cells.push_back(c);
  }
  return m;
}

}  // namespace

TEST_CASE("trial seeds are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (std::size_t k = 0; k < 1000; ++k) seen.insert(trial_seed(42, k));
  CHECK(seen.size() == 1000);
  CHECK(trial_seed(42, 7) == trial_seed(42, 7));
  CHECK(trial_seed(42, 7) != trial_seed(43, 7));
}

TEST_CASE("parallel payoff matrix equals the serial reference") {
  const auto ids = library();
  const auto par = payoff_matrix(setup(), ids, 2, 9);
  const auto ser = payoff_matrix_serial(setup(), ids, 2, 9);
  CHECK(par == ser);
  const auto k = par.index_of("tau");
  CHECK(par.at(k, k).mean_a == setup().params.b);
  CHECK(par.at(k, k).mean_b == setup().params.b);
  CHECK(par.at(k, k).arbitrations == 0);
  CHECK(par.at(k, k).outcomes.at("O") == 2);
}

TEST_CASE("payoff matrix rejects bad inputs") {
  CHECK_THROWS_AS(payoff_matrix(setup(), {}, 1, 0), Error);
  CHECK_THROWS_AS(payoff_matrix(setup(), {"tau"}, 0, 0), Error);
  CHECK_THROWS_AS(payoff_matrix(setup(), {"tau", "nope"}, 1, 0), Error);
  CHECK_THROWS_AS(payoff_matrix(setup(), {"tau", "inflate:1000"}, 1, 0), Error);
  CHECK_THROWS_AS(PayoffMatrix{}.index_of("tau"), Error);
}

TEST_CASE("nash report on a hand-built matrix") {
  // Prisoner's dilemma shape: (y, y) is the only stable profile.
  const auto m = hand_matrix({{3, 3}, {0, 5}, {5, 0}, {1, 1}});
  const auto r = nash_report(m);
  CHECK(r.is_stable(1, 1));
  CHECK_FALSE(r.is_stable(0, 0));
  CHECK_FALSE(r.is_stable(0, 1));
  CHECK_FALSE(r.is_stable(1, 0));
  REQUIRE(r.deviations.size() == 3);
  CHECK(r.deviations[0].gain == 2);
  CHECK(r.deviations[0].to == "y");
  // Ties are not profitable deviations.
  CHECK(nash_report(hand_matrix({{1, 1}, {1, 1}, {1, 1}, {1, 1}})).deviations.empty());
}

TEST_CASE("best response against tau is a truthful strategy") {
  const auto br = best_response_check(setup(), "tau", library(), 2, 3);
  CHECK(br.utilities.size() == 8);
  CHECK(br.utilities.at("tau") == setup().params.b);
  for (const auto& id : br.best) CHECK((id == "tau" || id.rfind("apliar", 0) == 0));
  for (const auto& [id, u] : br.utilities) {
    if (id != "tau" && id.rfind("apliar", 0) != 0) CHECK(u < br.utilities.at("tau"));
  }
}

TEST_CASE("payoff csv and nash text") {
  const auto m = hand_matrix({{3, 3}, {0, 5}, {5, 0}, {1.5, 1}});
  CHECK(payoff_csv(m) == "a\\b,x,y\nx,3|3,0|5\ny,5|0,1.5|1\n");
  const auto text = nash_text(m, nash_report(m));
  CHECK(text.find("(x, x) unstable") != std::string::npos);
  CHECK(text.find("(y, y)") == std::string::npos);
}

TEST_CASE("json serialization") {
  const auto g = run_game(setup(), "tau", "flip", 5);
  const auto j = to_json(g, "transcript_5_tau_flip.json");
  CHECK(j.at("outcome") == "D");
  CHECK(j.at("arbitration_used") == true);
  CHECK(j.at("verdict") == nlohmann::json{{"winner_a", true}, {"winner_b", false}});
  CHECK(j.at("a").at("utility").get<double>() == g.a.utility);
  CHECK(j.at("a").at("effort").get<std::int64_t>() == g.a.meter.total());
  CHECK(j.at("transcript") == "transcript_5_tau_flip.json");
  CHECK(commitment_from_json(j.at("b").at("commitment")) == g.b.commitment);
  CHECK(j.at("a").at("commitment").at("r").get<std::string>().size() == 64);

  const auto t = to_json(g.arbitration->transcript);
  REQUIRE(t.is_array());
  CHECK(t.size() == g.arbitration->transcript.queries());
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t[k].at("seq") == k + 1);  // 1-based
    CHECK(t[k].contains("query"));
    CHECK(t[k].contains("a_response"));
    CHECK(t[k].contains("b_response"));
  }
  CHECK_THROWS_AS(commitment_from_json(nlohmann::json{{"a", "1"}}), Error);
  CHECK_THROWS_AS(commitment_from_json(nlohmann::json{{"a", "1"}, {"t", 3}, {"r", "zz"}}), Error);
}
