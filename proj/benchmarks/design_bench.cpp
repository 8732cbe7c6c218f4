#include <benchmark/benchmark.h>

#include <string>

#include "gridjam/attack_design.hpp"
#include "gridjam/case_io.hpp"
#include "gridjam/harness.hpp"
#include "gridjam/oracle.hpp"

using namespace gridjam;

namespace {

MeasurementGraph scenario_graph(const char* file, double phasors, double secure,
                                std::uint64_t seed) {
  Grid grid = parse_topology(std::string(GRIDJAM_DATA_DIR) + "/" + file);
  Rng rng(seed);
  Scenario s = random_scenario(grid, phasors, secure, rng);
  return to_graph(build_system(grid, s.measurements));
}

// range(0): secure fraction in percent; range(1): 0 finite beta, 1 infinite.
void BM_DesignJamming57(benchmark::State& state) {
  MeasurementGraph g = scenario_graph("ieee57.txt", 1.0, state.range(0) / 100.0, 3);
  CostParams p;
  p.p_jam = 0.25;
  p.beta_mode = state.range(1) ? BetaMode::Infinite : BetaMode::Finite;
  for (auto _ : state) benchmark::DoNotOptimize(design_jamming_attack(g, p));
}
BENCHMARK(BM_DesignJamming57)
    ->ArgsProduct({{0, 20, 40}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_GlobalMinCut(benchmark::State& state) {
  const char* file = state.range(0) == 14 ? "ieee14.txt" : "ieee57.txt";
  MeasurementGraph g = scenario_graph(file, 0.6, 0.2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(global_min_cut(g));
}
BENCHMARK(BM_GlobalMinCut)->Arg(14)->Arg(57)->Unit(benchmark::kMicrosecond);

void BM_OracleIeee14(benchmark::State& state) {
  MeasurementGraph g = scenario_graph("ieee14.txt", 0.6, 0.2, 7);
  CostParams p;
  p.p_jam = 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimal(g, p));
}
BENCHMARK(BM_OracleIeee14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
