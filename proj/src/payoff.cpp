#include "mrm/payoff.hpp"

#include <algorithm>
#include <exception>

#include "mrm/error.hpp"

namespace mrm {

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  // splitmix64 finalizer over (base, trial)
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t PayoffMatrix::index_of(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw Error(ErrorCode::InvalidStrategy, "strategy '" + id + "' not in matrix");
  return static_cast<std::size_t>(it - ids.begin());
}

namespace {

struct Sample {
  double ua = 0, ub = 0;
  std::string outcome;
  bool arbitrated = false;
  std::size_t queries = 0;
  std::int64_t verifier_hashes = 0;
};

Sample sample_game(const GameSetup& setup, const std::string& a, const std::string& b, std::uint64_t seed) {
  const auto g = run_game(setup, a, b, seed);
  Sample s{g.a.utility, g.b.utility, g.outcome, g.arbitration_used, 0, 0};
  if (g.arbitration) {
    s.queries = g.arbitration->transcript.queries();
    s.verifier_hashes = g.arbitration->verifier_meter.hash_calls();
  }
  return s;
}

PayoffMatrix reduce(const std::vector<std::string>& ids, std::size_t trials, const std::vector<Sample>& samples) {
  PayoffMatrix m{ids, trials, std::vector<CellStats>(ids.size() * ids.size())};
  for (std::size_t cell = 0; cell < m.cells.size(); ++cell) {
    CellStats& c = m.cells[cell];
    double sa = 0, sb = 0;
    for (std::size_t k = 0; k < trials; ++k) {
      const Sample& s = samples[cell * trials + k];
      sa += s.ua;
      sb += s.ub;
      ++c.outcomes[s.outcome];
      c.arbitrations += s.arbitrated ? 1 : 0;
      c.max_queries = std::max(c.max_queries, s.queries);
      c.max_verifier_hash_calls = std::max(c.max_verifier_hash_calls, s.verifier_hashes);
    }
    c.mean_a = sa / static_cast<double>(trials);
    c.mean_b = sb / static_cast<double>(trials);
  }
  return m;
}

void check_inputs(const std::vector<std::string>& ids, std::size_t trials) {
  if (ids.empty()) throw Error(ErrorCode::PreconditionViolated, "empty strategy library");
  if (trials == 0) throw Error(ErrorCode::PreconditionViolated, "trials must be at least 1");
  for (const auto& id : ids) {
    if (!is_strategy_id(id)) throw Error(ErrorCode::InvalidStrategy, "unknown strategy '" + id + "'");
  }
}

}  // namespace

PayoffMatrix payoff_matrix_serial(const GameSetup& setup, const std::vector<std::string>& ids,
                                  std::size_t trials, std::uint64_t base_seed) {
  check_inputs(ids, trials);
  const std::size_t n = ids.size();
  std::vector<Sample> samples(n * n * trials);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const std::size_t cell = k / trials;
    samples[k] = sample_game(setup, ids[cell / n], ids[cell % n], trial_seed(base_seed, k % trials));
  }
  return reduce(ids, trials, samples);
}

PayoffMatrix payoff_matrix(const GameSetup& setup, const std::vector<std::string>& ids,
                           std::size_t trials, std::uint64_t base_seed) {
  check_inputs(ids, trials);
  const std::size_t n = ids.size();
  std::vector<Sample> samples(n * n * trials);
  std::vector<std::exception_ptr> errors(samples.size());
  const auto total = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const std::size_t cell = idx / trials;
    try {
      samples[idx] = sample_game(setup, ids[cell / n], ids[cell % n], trial_seed(base_seed, idx % trials));
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reduce(ids, trials, samples);
}

bool NashReport::is_stable(std::size_t row, std::size_t col) const {
  return std::none_of(deviations.begin(), deviations.end(),
                      [&](const Deviation& d) { return d.row == row && d.col == col; });
}

NashReport nash_report(const PayoffMatrix& m) {
  NashReport report;
  const std::size_t n = m.ids.size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::optional<Deviation> best;
      auto consider = [&](Agent seat, std::size_t to, double gain) {
        if (gain > 0 && (!best || gain > best->gain)) best = Deviation{r, c, seat, m.ids[to], gain};
      };
      for (std::size_t k = 0; k < n; ++k) {
        consider(Agent::A, k, m.at(k, c).mean_a - m.at(r, c).mean_a);
        consider(Agent::B, k, m.at(r, k).mean_b - m.at(r, c).mean_b);
      }
      if (best) report.deviations.push_back(*best);
    }
  }
  return report;
}

BestResponse best_response_check(const GameSetup& setup, const std::string& opponent,
                                 const std::vector<std::string>& candidates, std::size_t trials,
                                 std::uint64_t base_seed) {
  check_inputs(candidates, trials);
  BestResponse out;
  double top = 0;
  for (const auto& id : candidates) {
    double sum = 0;
    for (std::size_t k = 0; k < trials; ++k) {
      sum += run_game(setup, id, opponent, trial_seed(base_seed, k)).a.utility;
    }
    const double mean = sum / static_cast<double>(trials);
    out.utilities[id] = mean;
    if (out.best.empty() || mean > top) {
      out.best = {id};
      top = mean;
    } else if (mean == top) {
      out.best.push_back(id);
    }
  }
  return out;
}

}  // namespace mrm
