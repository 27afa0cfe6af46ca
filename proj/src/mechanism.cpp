#include "mrm/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "mrm/error.hpp"

namespace mrm {

double PaymentParams::b_lower() const {
  return (2 * delta * M_star() + epsilon * M_c / (1 - epsilon)) / (1 - 2 * delta);
}

double PaymentParams::b_upper() const { return (zeta - 2 * M_star()) / 2; }

double n_threshold(double M_star) { return 2 * std::log2(M_star) + kSecurityConstant; }

PaymentParams select_params(double M_c, double M_ap, double epsilon, double delta, double n,
                            std::optional<double> b) {
  if (!(M_c > 0) || !(M_ap >= 0)) throw Error(ErrorCode::PreconditionViolated, "need M_c > 0 and M_ap >= 0");
  if (!(epsilon > 0 && epsilon < 1)) throw Error(ErrorCode::PreconditionViolated, "epsilon must lie in (0, 1)");
  if (!(delta >= 0 && delta < 0.5)) throw Error(ErrorCode::PreconditionViolated, "delta must lie in [0, 1/2)");
  PaymentParams p;
  p.M_c = M_c;
  p.M_ap = M_ap;
  p.epsilon = epsilon;
  p.delta = delta;
  p.n = n;
  if (!(n > n_threshold(p.M_star()))) {
    throw Error(ErrorCode::EmptyInterval, "security parameter too small for M_c + M_ap");
  }
  p.zeta = std::exp2((n - kSecurityConstant) / 2);
  const double lo = p.b_lower(), hi = p.b_upper();
  if (!(lo < hi)) throw Error(ErrorCode::EmptyInterval, "no admissible surplus b");
  if (b) {
    if (!(lo < *b && *b < hi)) throw Error(ErrorCode::InvalidChoice, "b outside the admissible interval");
    p.b = *b;
  } else {
    const double mid = std::sqrt(lo * hi);
    const double whole = std::round(mid);
    p.b = lo < whole && whole < hi ? whole : mid;
  }
  p.d2 = 2 * p.M_star() + 2 * p.b;
  check_params(p);
  return p;
}

void check_params(const PaymentParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::PreconditionViolated, what);
  };
  require(p.b_lower() > 0, "lower bound on b must be positive");
  require(p.b > p.b_lower(), "b must exceed its lower bound");
  require(p.b < p.b_upper(), "b must stay below (zeta - 2 M*) / 2");
  require(p.zeta > p.d2, "zeta must exceed d2");
  require(p.d2 == 2 * p.M_star() + 2 * p.b, "d2 must equal 2 M* + 2 b");
  require(p.d2 >= 2 * (p.M_c + p.b), "d2 must be at least 2 d1(T)");
}

unsigned GameSetup::key_bits() const {
  return static_cast<unsigned>(std::max(16.0, std::ceil(params.n)));
}

Play play(const VerifierInput& task, Strategy& a, Strategy& b, const HashScheme& scheme) {
  Play p;
  p.a = a.commit(task, scheme);
  p.commit_effort_a = a.meter().total();
  p.b = b.commit(task, scheme);
  p.commit_effort_b = b.meter().total();
  if (p.a != p.b) p.arbitration = arbitrate(p.a, p.b, a, b, scheme, task);
  return p;
}

std::int64_t calibrate_M_ap(const VerifierInput& task, const std::vector<std::string>& library,
                            std::uint64_t seed) {
  const auto scheme = gen_key(HashScheme::kKeyBytes * 8, seed);
  std::int64_t worst = 0;
  for (const auto& id : library) {
    for (bool tau_first : {true, false}) {
      auto tau = make_strategy("tau");
      auto other = make_strategy(id);
      Strategy& a = tau_first ? *tau : *other;
      Strategy& b = tau_first ? *other : *tau;
      const auto p = play(task, a, b, scheme);
      const std::int64_t answered = CostModel::kQuery * tau->meter().queries();
      if (p.arbitration) worst = std::max(worst, answered);
    }
  }
  return worst;
}

GameSetup prepare_game(const MachineSpec& spec, std::string input, TableauShape shape,
                       const SetupOptions& options) {
  const Tableau honest = run_tableau(spec, input, shape);
  const auto schedule = CostSchedule::for_tableau(honest);
  VerifierInput task{spec, std::move(input), shape};
  const auto library = options.library.empty() ? default_library(honest.t()) : options.library;
  const auto M_ap = static_cast<double>(calibrate_M_ap(task, library));
  const auto M_c = static_cast<double>(schedule.M_c());
  const double n = options.n.value_or(std::ceil(n_threshold(M_c + M_ap)) + 6);
  auto params = select_params(M_c, M_ap, options.epsilon, options.delta, n, options.b);
  return GameSetup{std::move(task), schedule, params};
}

GameResult run_game(const GameSetup& setup, const std::string& a_id, const std::string& b_id,
                    std::uint64_t seed) {
  const auto scheme = gen_key(setup.key_bits(), seed);
  auto sa = make_strategy(a_id);
  auto sb = make_strategy(b_id);
  auto p = play(setup.task, *sa, *sb, scheme);

  Commitment truth;
  if (sa->truthful()) {
    truth = p.a;
  } else if (sb->truthful()) {
    truth = p.b;
  } else {
    EffortMeter scratch;
    truth = commit(setup.task.spec, setup.task.input, setup.task.shape, scheme, scratch).commitment;
  }

  GameResult r;
  r.seed = seed;
  r.a = AgentResult{a_id, p.a, 0, sa->meter(), 0};
  r.b = AgentResult{b_id, p.b, 0, sb->meter(), 0};
  const auto& params = setup.params;
  if (!p.arbitration) {
    const std::size_t t = p.a.t;
    const double pay = t >= 1 && t <= setup.task.shape.rows ? params.d1(setup.schedule.M(t)) : 0;
    r.a.payment = r.b.payment = pay;
  } else {
    r.arbitration_used = true;
    r.a.payment = p.arbitration->verdict.winner_a ? params.d2 : 0;
    r.b.payment = p.arbitration->verdict.winner_b ? params.d2 : 0;
  }
  r.a.utility = r.a.payment - static_cast<double>(r.a.meter.total());
  r.b.utility = r.b.payment - static_cast<double>(r.b.meter.total());

  const std::int64_t honest_commit = setup.schedule.M(truth.t);
  std::optional<Verdict> verdict;
  if (p.arbitration) verdict = p.arbitration->verdict;
  r.outcome = classify_outcome(p.a, p.b, truth, verdict, p.commit_effort_a >= honest_commit,
                               p.commit_effort_b >= honest_commit);
  r.arbitration = std::move(p.arbitration);
  return r;
}

std::string classify_outcome(const Commitment& a, const Commitment& b, const Commitment& truth,
                             const std::optional<Verdict>& verdict, bool full_effort_a,
                             bool full_effort_b) {
  if (!verdict) {
    if (a != truth) return "B";
    if (full_effort_a && full_effort_b) return "O";
    if (full_effort_a) return "A1";
    if (full_effort_b) return "A2";
    return "A3";
  }
  const bool honest_a = a == truth, honest_b = b == truth;
  const bool wa = verdict->winner_a, wb = verdict->winner_b;
  if (wa && !wb) return honest_a ? "D" : "C";
  if (!wa && wb) return honest_b ? "F" : "E";
  if (!wa && !wb) return "G";
  if (honest_a && !honest_b) return "H1";
  if (honest_b && !honest_a) return "H2";
  return "H3";
}

}  // namespace mrm
