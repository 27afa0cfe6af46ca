#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrm/arbitration.hpp"
#include "mrm/commitment.hpp"
#include "mrm/strategies.hpp"

namespace mrm {

/// Payment rule d1(t) = M(t) + b, d2 = 2(M_c + M_ap) + 2b, with b chosen
/// inside the interval that makes truth-telling the only equilibrium.
struct PaymentParams {
  double M_c = 0;
  double M_ap = 0;
  double epsilon = 0;
  double delta = 0;
  double n = 0;
  double zeta = 0;  // 2^((n - 15) / 2)
  double b = 0;
  double d2 = 0;

  [[nodiscard]] double M_star() const { return M_c + M_ap; }
  /// Agreement payment for a reported time whose schedule value is M(t).
  [[nodiscard]] double d1(std::int64_t M_t) const { return static_cast<double>(M_t) + b; }
  [[nodiscard]] double b_lower() const;
  [[nodiscard]] double b_upper() const;
};

inline constexpr double kDefaultEpsilon = 1.0 / 1024;
inline constexpr double kDefaultDelta = 1.0 / 1024;
inline constexpr double kSecurityConstant = 15;

/// Smallest n (exclusive) accepted for a given M_c + M_ap.
double n_threshold(double M_star);

/// EmptyInterval if n <= 2 log2(M_c + M_ap) + 15 or the b interval is empty;
/// InvalidChoice if a given b lies outside it. Without b, the geometric
/// midpoint of the interval is used, rounded to a whole cost unit when that
/// stays inside.
PaymentParams select_params(double M_c, double M_ap, double epsilon, double delta, double n,
                            std::optional<double> b = std::nullopt);

/// Throws PreconditionViolated naming the first inequality that fails.
void check_params(const PaymentParams& p);

/// Everything fixed before a game: the task, its honest cost schedule and the
/// payment rule.
struct GameSetup {
  VerifierInput task;
  CostSchedule schedule;
  PaymentParams params;

  [[nodiscard]] unsigned key_bits() const;
};

/// Both commitments and, if they differ, the arbitration.
struct Play {
  Commitment a, b;
  std::int64_t commit_effort_a = 0, commit_effort_b = 0;
  std::optional<ArbitrationResult> arbitration;
};

Play play(const VerifierInput& task, Strategy& a, Strategy& b, const HashScheme& scheme);

/// Worst arbitration effort of tau against every listed strategy, both seats.
std::int64_t calibrate_M_ap(const VerifierInput& task, const std::vector<std::string>& library,
                            std::uint64_t seed = 0);

struct SetupOptions {
  double epsilon = kDefaultEpsilon;
  double delta = kDefaultDelta;
  std::optional<double> n;  // default: ceil(n_threshold) + 6
  std::optional<double> b;
  std::vector<std::string> library;  // default: default_library(t)
};

GameSetup prepare_game(const MachineSpec& spec, std::string input, TableauShape shape,
                       const SetupOptions& options = {});

struct AgentResult {
  std::string strategy;
  Commitment commitment;
  double payment = 0;
  EffortMeter meter;
  double utility = 0;  // payment - meter.total()
};

struct GameResult {
  std::uint64_t seed = 0;
  AgentResult a, b;
  bool arbitration_used = false;
  std::optional<ArbitrationResult> arbitration;
  std::string outcome;
};

GameResult run_game(const GameSetup& setup, const std::string& a_id, const std::string& b_id,
                    std::uint64_t seed);

/// Outcome label: O, A1-A3, B, C, D, E, F, G, H1-H3. `full_effort_x` says
/// whether agent x spent at least the honest commitment effort.
std::string classify_outcome(const Commitment& a, const Commitment& b, const Commitment& truth,
                             const std::optional<Verdict>& verdict, bool full_effort_a = true,
                             bool full_effort_b = true);

}  // namespace mrm
