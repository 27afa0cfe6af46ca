#pragma once

#include <json.hpp>
#include <string>

#include "mrm/arbitration.hpp"
#include "mrm/commitment.hpp"
#include "mrm/mechanism.hpp"
#include "mrm/payoff.hpp"

namespace mrm {

nlohmann::json to_json(const Commitment& c);  // {a, t, r: hex}
Commitment commitment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EffortMeter& m);
nlohmann::json to_json(const Query& q);
nlohmann::json to_json(const Response& r);
nlohmann::json to_json(const Verdict& v);  // {winner_a, winner_b}
/// Array of {seq, query, a_response, b_response}.
nlohmann::json to_json(const Transcript& t);
nlohmann::json to_json(const PaymentParams& p);
/// Payments, efforts, utilities and the outcome label; the transcript is
/// referenced by path, not embedded.
nlohmann::json to_json(const GameResult& g, const std::string& transcript_path = "");

/// Matrix as CSV: header row of ids, then one row per seat-A strategy with
/// cells "uA|uB".
std::string payoff_csv(const PayoffMatrix& m);
/// One line per unstable profile, then a verdict line for (tau, tau).
std::string nash_text(const PayoffMatrix& m, const NashReport& r);

}  // namespace mrm
