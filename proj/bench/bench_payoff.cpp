#include <benchmark/benchmark.h>

#include "mrm/payoff.hpp"
#include "mrm/program.hpp"

namespace {

const mrm::GameSetup& setup() {
  static const mrm::GameSetup s = mrm::prepare_game(
      mrm::load_program(MRM_PROGRAMS_DIR "/palindrome.tm"), "abbbba", mrm::TableauShape::make(128, 32, 4));
  return s;
}

std::vector<std::string> library() {
  const auto& t = setup().task;
  return mrm::default_library(mrm::run_tableau(t.spec, t.input, t.shape).t());
}

void BM_PayoffSerial(benchmark::State& state) {
  const auto ids = library();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrm::payoff_matrix_serial(setup(), ids, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_PayoffParallel(benchmark::State& state) {
  const auto ids = library();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrm::payoff_matrix(setup(), ids, static_cast<std::size_t>(state.range(0)), 1));
  }
}

void BM_HonestCommit(benchmark::State& state) {
  const auto spec = mrm::load_program(MRM_PROGRAMS_DIR "/palindrome.tm");
  const auto shape = mrm::TableauShape::make(static_cast<std::size_t>(state.range(0)), 128, 8);
  const auto scheme = mrm::gen_key(256, 1);
  for (auto _ : state) {
    mrm::EffortMeter meter;
    benchmark::DoNotOptimize(mrm::commit(spec, "abbbbbba", shape, scheme, meter));
  }
}

}  // namespace

BENCHMARK(BM_PayoffSerial)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PayoffParallel)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HonestCommit)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
