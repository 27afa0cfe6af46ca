// mrm: command-line driver for commitments, games, payoff matrices and the
// verifier-cost benchmark.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mrm/error.hpp"
#include "mrm/json_io.hpp"
#include "mrm/mechanism.hpp"
#include "mrm/payoff.hpp"
#include "mrm/program.hpp"

namespace fs = std::filesystem;
using namespace mrm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitProtocol = 3;

struct RunConfig {
  std::string program;
  std::string input;
  std::size_t T = 64;
  std::size_t S = 16;
  std::size_t lambda = 8;
  std::string hash = "sha256";
  std::optional<double> n;
  double epsilon = kDefaultEpsilon;
  double delta = kDefaultDelta;
  std::optional<double> b;
  std::string a_strategy = "tau";
  std::string b_strategy = "tau";
  std::vector<std::string> library;
  std::uint64_t seed = 0;
  std::size_t trials = 50;
  std::string out;
};

/// Raised for violated verifier bounds in `bench`.
struct ProtocolFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  MachineSpec spec;
  TableauShape shape;
};

Loaded load(const RunConfig& c) {
  if (c.program.empty()) throw Error(ErrorCode::PreconditionViolated, "--program is required");
  if (c.hash != "sha256") throw Error(ErrorCode::PreconditionViolated, "unsupported hash '" + c.hash + "'");
  MachineSpec spec = [&] {
    try {
      return load_program(c.program);
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(e.code(), c.program + ": " + what.substr(to_string(e.code()).size() + 2));
    }
  }();
  return {std::move(spec), TableauShape::make(c.T, c.S, c.lambda)};
}

SetupOptions setup_options(const RunConfig& c) {
  SetupOptions o;
  o.epsilon = c.epsilon;
  o.delta = c.delta;
  o.n = c.n;
  o.b = c.b;
  o.library = c.library;
  return o;
}

std::string file_safe(std::string id) {
  std::replace(id.begin(), id.end(), ':', '-');
  return id;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::PreconditionViolated, "cannot write " + path.string());
  f << text;
}

/// Prints to stdout, and also to out/<name> when an output directory is set.
void emit(const RunConfig& c, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!c.out.empty()) write_file(fs::path(c.out) / name, text);
}

int cmd_commit(const RunConfig& c) {
  const auto [spec, shape] = load(c);
  const auto scheme = gen_key(c.n ? static_cast<unsigned>(std::ceil(*c.n)) : 256, c.seed);
  EffortMeter meter;
  const auto result = commit(spec, c.input, shape, scheme, meter);
  auto j = to_json(result.commitment);
  j["effort"] = to_json(meter);
  j["M_t"] = CostSchedule::for_tableau(result.tableau).M(result.commitment.t);
  emit(c, "commit_" + std::to_string(c.seed) + ".json", j.dump(2) + "\n");
  return 0;
}

int cmd_game(const RunConfig& c) {
  const auto [spec, shape] = load(c);
  const auto setup = prepare_game(spec, c.input, shape, setup_options(c));
  const auto g = run_game(setup, c.a_strategy, c.b_strategy, c.seed);
  const std::string stem =
      std::to_string(c.seed) + "_" + file_safe(c.a_strategy) + "_" + file_safe(c.b_strategy);
  std::string transcript_path;
  if (g.arbitration) {
    const fs::path p = fs::path(c.out.empty() ? "." : c.out) / ("transcript_" + stem + ".json");
    write_file(p, to_json(g.arbitration->transcript).dump(2) + "\n");
    transcript_path = p.string();
  }
  auto j = to_json(g, transcript_path);
  j["params"] = to_json(setup.params);
  emit(c, "game_" + stem + ".json", j.dump(2) + "\n");
  return 0;
}

int cmd_arbitrate(const RunConfig& c) {
  const auto [spec, shape] = load(c);
  const VerifierInput task{spec, c.input, shape};
  const auto scheme = gen_key(c.n ? static_cast<unsigned>(std::ceil(*c.n)) : 256, c.seed);
  auto a = make_strategy(c.a_strategy);
  auto b = make_strategy(c.b_strategy);
  const auto p = play(task, *a, *b, scheme);
  nlohmann::json j{{"a", to_json(p.a)}, {"b", to_json(p.b)}, {"arbitration_used", p.arbitration.has_value()}};
  if (p.arbitration) {
    j["verdict"] = to_json(p.arbitration->verdict);
    j["queries"] = p.arbitration->transcript.queries();
    j["verifier_hash_calls"] = p.arbitration->verifier_meter.hash_calls();
    j["transcript"] = to_json(p.arbitration->transcript);
  }
  const std::string stem =
      std::to_string(c.seed) + "_" + file_safe(c.a_strategy) + "_" + file_safe(c.b_strategy);
  emit(c, "arbitrate_" + stem + ".json", j.dump(2) + "\n");
  return 0;
}

int cmd_payoff(const RunConfig& c) {
  const auto [spec, shape] = load(c);
  const auto setup = prepare_game(spec, c.input, shape, setup_options(c));
  const auto ids = c.library.empty() ? default_library(run_tableau(spec, c.input, shape).t()) : c.library;
  const auto m = payoff_matrix(setup, ids, c.trials, c.seed);
  const auto report = nash_report(m);
  emit(c, "payoff.csv", payoff_csv(m));
  std::cout << '\n';
  emit(c, "nash.txt", nash_text(m, report));
  return 0;
}

struct BenchRow {
  std::size_t T, S, B;
  std::size_t max_queries = 0;
  std::int64_t max_hashes = 0;
  std::size_t bound = 0;
};

BenchRow bench_size(const MachineSpec& spec, const std::string& input, TableauShape shape,
                    std::uint64_t seed) {
  const VerifierInput task{spec, input, shape};
  const auto ids = default_library(run_tableau(spec, input, shape).t());
  const auto scheme = gen_key(256, seed);
  BenchRow row{shape.rows, shape.columns, shape.blocks_per_row()};
  row.bound = 6 * (shape.log_rows() + shape.log_blocks()) + 12;
  for (const auto& x : ids) {
    for (const auto& y : ids) {
      auto a = make_strategy(x);
      auto b = make_strategy(y);
      const auto p = play(task, *a, *b, scheme);
      if (!p.arbitration) continue;
      row.max_queries = std::max(row.max_queries, p.arbitration->transcript.queries());
      row.max_hashes = std::max(row.max_hashes, p.arbitration->verifier_meter.hash_calls());
    }
  }
  return row;
}

int cmd_bench(const RunConfig& c) {
  const auto [spec, base] = load(c);
  std::vector<TableauShape> grid;
  for (std::size_t T = 64; T <= 4096; T *= 2) grid.push_back(TableauShape::make(T, 128, base.lambda));
  for (std::size_t S = 256; S <= 1024; S *= 2) grid.push_back(TableauShape::make(256, S, base.lambda));

  std::ostringstream table;
  table << "T,S,B,max_queries,max_verifier_hashes,bound\n";
  bool ok = true;
  for (const auto& shape : grid) {
    const auto r = bench_size(spec, c.input, shape, c.seed);
    table << r.T << ',' << r.S << ',' << r.B << ',' << r.max_queries << ',' << r.max_hashes << ','
          << r.bound << '\n';
    ok = ok && r.max_queries <= r.bound;
  }
  emit(c, "bench.csv", table.str());
  if (!ok) throw ProtocolFailure("query count exceeded 6(log T + log B) + 12");
  return 0;
}

int exit_code(ErrorCode code) {
  return code == ErrorCode::ProtocolViolation ? kExitProtocol : kExitConfig;
}

void add_common(CLI::App& app, RunConfig& c) {
  app.add_option("--program", c.program, "machine description file");
  app.add_option("--input", c.input, "input string");
  app.add_option("--T", c.T, "time bound (rounded up to a power of two)");
  app.add_option("--S", c.S, "space bound (rounded up to a power of two)");
  app.add_option("--lambda", c.lambda, "block width in cells");
  app.add_option("--hash", c.hash, "hash family")->check(CLI::IsMember({"sha256"}));
  app.add_option("--n", c.n, "security parameter");
  app.add_option("--epsilon", c.epsilon, "guess-probability bound");
  app.add_option("--delta", c.delta, "double-win bound");
  app.add_option("--b", c.b, "surplus b (default: geometric midpoint of the interval)");
  app.add_option("--a,--a-strategy", c.a_strategy, "strategy of agent A");
  app.add_option("--b-strategy", c.b_strategy, "strategy of agent B");
  app.add_option("--library", c.library, "strategy library (comma separated)")->delimiter(',');
  app.add_option("--seed", c.seed, "key / trial seed");
  app.add_option("--trials", c.trials, "trials per payoff cell")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Merkle-tree refereed computation: commitments, games and payoffs"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1);
  RunConfig config;
  add_common(app, config);
  app.fallthrough();

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"commit", "honest commitment and its effort", cmd_commit},
      {"game", "one game: commitments, arbitration, payments", cmd_game},
      {"arbitrate", "commitments and arbitration only", cmd_arbitrate},
      {"payoff", "payoff matrix over a strategy library with a Nash report", cmd_payoff},
      {"bench", "verifier cost over a grid of T and S", cmd_bench},
  };
  for (const auto& cmd : commands) app.add_subcommand(cmd.name, cmd.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& cmd : commands) {
      if (app.got_subcommand(cmd.name)) return cmd.run(config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const ProtocolFailure& e) {
    std::cerr << "protocol violation: " << e.what() << '\n';
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
