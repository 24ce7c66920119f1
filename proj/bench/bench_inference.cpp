#include "pcl/gai.hpp"
#include "pcl/harness.hpp"
#include "pcl/inference.hpp"
#include "pcl/problems.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace pcl;

namespace {

const char* kProblems[] = {"grid", "training", "hotel-small", "hotel"};

std::vector<double> random_weights(const ProblemModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> w(m.num_features());
  for (auto& v : w) v = normal(rng);
  return w;
}

void BM_PartInference(benchmark::State& state) {
  auto m = load_problem(kProblems[state.range(0)]);
  auto mode = static_cast<InferenceMode>(state.range(1));
  auto w = random_weights(m, 1);
  auto d = default_decomposition(m);
  std::mt19937_64 rng(2);
  auto x = random_feasible_configuration(m, rng, 20);
  std::size_t p = 0;
  for (auto _ : state) {
    InferenceRequest req{&m, w, d.J_of_part(p), p, x, mode};
    benchmark::DoNotOptimize(infer_part(req));
    p = (p + 1) % m.num_parts();
  }
  state.SetLabel(std::string(kProblems[state.range(0)]) + "/" + mode_name(mode));
}
BENCHMARK(BM_PartInference)->ArgsProduct({{0, 1, 2, 3}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_FullInference(benchmark::State& state) {
  auto m = load_problem(kProblems[state.range(0)]);
  auto mode = static_cast<InferenceMode>(state.range(1));
  auto w = random_weights(m, 3);
  for (auto _ : state) benchmark::DoNotOptimize(infer_full(m, w, mode));
  state.SetLabel(std::string(kProblems[state.range(0)]) + "/" + mode_name(mode));
}
// Exhaustive full inference is only tractable on the grid and the reduced hotel.
BENCHMARK(BM_FullInference)
    ->Args({0, 0})
    ->Args({0, 1})
    ->Args({0, 2})
    ->Args({2, 0})
    ->Args({2, 1})
    ->Args({2, 2})
    ->Args({3, 2})
    ->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& state) {
  auto m = build_grid();
  ExperimentConfig cfg;
  cfg.users = 20;
  cfg.iterations = 100;
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(m, cfg));
  state.SetLabel(cfg.threads == 1 ? "serial" : "openmp");
}
BENCHMARK(BM_Experiment)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
