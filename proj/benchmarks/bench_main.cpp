// Microbenchmarks for the planning and agent hot paths. Build with
// -DLMDPLAB_BUILD_BENCHMARKS=ON (requires google-benchmark) and run
// ./benchmarks/lmdplab_benchmarks; standard google-benchmark flags apply.

#include <benchmark/benchmark.h>

#include <memory>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/belief_planner.hpp"
#include "lmdplab/elimination.hpp"
#include "lmdplab/function_class.hpp"
#include "lmdplab/general_optimistic.hpp"
#include "lmdplab/instances.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/optimistic.hpp"
#include "lmdplab/planning.hpp"
#include "lmdplab/rng.hpp"

namespace {

using namespace lmdplab;

TabularMdp random_chain(int num_states, int num_actions, int horizon) {
  // Wide chains need a small perturbation budget: a flat Dirichlet row over S
  // states tops out near ln(S)/S, which must cover delta/2.
  return make_random_comm(num_states, num_actions, 1, 0.05, 7, horizon).mdps[0];
}

void BM_BackwardInduction(benchmark::State& state) {
  const TabularMdp mdp =
      random_chain(static_cast<int>(state.range(0)), 2, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_induction(mdp).v1());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_BackwardInduction)->Args({5, 1024})->Args({20, 1024})->Args({5, 8192});

void BM_RelativeValueIteration(benchmark::State& state) {
  const TabularMdp mdp = random_chain(static_cast<int>(state.range(0)), 2, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(relative_value_iteration(mdp).gain);
  }
}
BENCHMARK(BM_RelativeValueIteration)->Arg(5)->Arg(20)->Arg(50);

void BM_Diameter(benchmark::State& state) {
  const TabularMdp mdp = random_chain(static_cast<int>(state.range(0)), 2, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diameter(mdp));
  }
}
BENCHMARK(BM_Diameter)->Arg(5)->Arg(20)->Arg(50);

void BM_BeliefSolve(benchmark::State& state) {
  const LatentMdp lm = make_random_comm(3, 2, 2, 0.4, 11, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dr_optimal(lm).average_value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BeliefSolve)->Arg(6)->Arg(8)->Arg(10);

void BM_BeliefSolveNeedle(benchmark::State& state) {
  const LatentMdp lm = make_prop1(3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dr_optimal(lm).average_value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BeliefSolveNeedle)->Arg(256)->Arg(1024)->Arg(4096);

// Full-episode throughput of the three adaptive agents on the scaling-study
// class shape (M=5, S=5, A=2, separation 0.3). Items processed = env steps.
void BM_EpisodeGainGreedy(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  auto shared = std::make_shared<const LatentMdp>(make_random_comm(5, 2, 5, 0.3, 21, horizon));
  const auto proto = make_optimistic_elimination(shared);
  std::uint64_t episode = 0;
  for (auto _ : state) {
    auto agent = proto->clone(derive_seed(1, 2, episode));
    benchmark::DoNotOptimize(
        rollout_real(shared->mdps[0], *agent, derive_seed(3, 4, episode), 0).total_reward());
    ++episode;
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_EpisodeGainGreedy)->Arg(1024)->Arg(8192);

void BM_EpisodeSwitchFrugal(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  auto shared = std::make_shared<const LatentMdp>(make_random_comm(5, 2, 5, 0.3, 21, horizon));
  const auto proto = make_general_optimistic(shared, 1.0);
  std::uint64_t episode = 0;
  for (auto _ : state) {
    auto agent = proto->clone(derive_seed(1, 2, episode));
    benchmark::DoNotOptimize(
        rollout_real(shared->mdps[0], *agent, derive_seed(3, 4, episode), 0).total_reward());
    ++episode;
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_EpisodeSwitchFrugal)->Arg(1024)->Arg(8192);

void BM_EpisodeSeparated(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  auto shared = std::make_shared<const LatentMdp>(make_random_comm(5, 2, 5, 0.3, 21, horizon));
  const auto config =
      std::make_shared<const SeparatedEliminationConfig>(make_separated_config(shared, 0.01));
  std::uint64_t episode = 0;
  for (auto _ : state) {
    auto agent = make_separated_elimination(config, derive_seed(1, 2, episode));
    benchmark::DoNotOptimize(
        rollout_real(shared->mdps[0], *agent, derive_seed(3, 4, episode), 0).total_reward());
    ++episode;
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_EpisodeSeparated)->Arg(1024)->Arg(8192);

void BM_EluderGreedy(benchmark::State& state) {
  const LatentMdp lm = make_random_comm(5, 2, 5, 0.3, 21, 8192);
  const FunctionClassF f = build_function_class(lm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eluder_dimension_greedy(f, 1.0 / 8192));
  }
}
BENCHMARK(BM_EluderGreedy);

}  // namespace
