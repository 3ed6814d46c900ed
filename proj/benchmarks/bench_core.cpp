#include <npg/exact_oracle.hpp>
#include <npg/mc_sampling.hpp>
#include <npg/npg_driver.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace npg;

void BM_EvaluatePolicy(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const FiniteMdp mdp = generate_random_mdp(S, 5, 0.9, 1);
  const PolicyTable pi = PolicyTable::uniform(S, 5);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(mdp, pi));
}
BENCHMARK(BM_EvaluatePolicy)->Arg(20)->Arg(100)->Arg(400);

void BM_PairVisitation(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const FiniteMdp mdp = generate_random_mdp(S, 5, 0.9, 2);
  const PolicyTable pi = PolicyTable::uniform(S, 5);
  const StateActionDistribution nu = uniform_state_action(S, 5);
  for (auto _ : state) benchmark::DoNotOptimize(state_action_visitation_tilde(mdp, pi, nu));
}
BENCHMARK(BM_PairVisitation)->Arg(20)->Arg(100);

void BM_RolloutSampler(benchmark::State& state) {
  const FiniteMdp mdp = generate_random_mdp(20, 5, 0.9, 3);
  const RolloutSampler sampler(mdp, PolicyTable::uniform(20, 5), uniform_state_action(20, 5));
  const int workers = static_cast<int>(state.range(0));
  std::uint64_t first = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(draw_samples(sampler, true, 1, 0, first, 10000, workers));
    first += 10000;
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RolloutSampler)->Arg(1)->Arg(4)->UseRealTime();

void BM_QnpgSgd(benchmark::State& state) {
  const FiniteMdp mdp = generate_random_mdp(10, 4, 0.9, 4);
  const FeatureMap features = FeatureMap::gaussian(10, 4, 8, 5);
  SgdConfig config;
  config.n_steps = 5000;
  std::uint64_t iteration = 0;
  for (auto _ : state) {
    config.iteration = iteration++;
    benchmark::DoNotOptimize(
        qnpg_sgd(mdp, Vector::Zero(8), features, uniform_state_action(10, 4), config));
  }
}
BENCHMARK(BM_QnpgSgd);

void BM_ExactRun(benchmark::State& state) {
  const FiniteMdp mdp = generate_random_mdp(20, 5, 0.9, 6);
  RunOptions options;
  options.rho = StateDistribution::uniform(20);
  options.nu = uniform_state_action(20, 5);
  options.schedule = StepSchedule::geometric(default_eta0(5, 0.9), 0.9);
  options.iterations = 30;
  for (auto _ : state) benchmark::DoNotOptimize(run(mdp, FeatureMap::one_hot(20, 5), options));
}
BENCHMARK(BM_ExactRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
