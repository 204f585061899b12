#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmdplab/instances.hpp"

namespace lmdplab {

// One experiment grid: a benchmark family (or a pre-built class file), one
// policy, a list of horizons and a number of independent repetitions.
struct ExperimentConfig {
  InstanceSpec instance;
  std::string instance_path;  // optional lmdp-v1 file; overrides `instance`
  std::string policy = "alg3";  // alg1|alg3|alg4|dr_exact|markov_opt|uniform_random
  double c0 = 1.0;              // probe-budget scale for alg1
  double c = 1.0;               // confidence-radius scale for alg4
  std::vector<int> horizons;
  int num_seeds = 1;
  long episodes = 1;            // episodes per (horizon, seed, environment member)
  std::uint64_t master_seed = 1;
  int mstar = -1;               // evaluate against this member only; -1 = every member
  std::size_t max_nodes = 1'000'000;  // dr_exact planning budget
  std::string output_path;      // CSV destination ("" = caller decides)
  std::string trace_path;       // JSONL trace ("" = no tracing; forces one worker)

  void validate() const;
};

// One grid cell: the policy evaluated on one (horizon, seed) draw of the
// family. The headline gap is against the member the policy handles worst;
// gap_mean_avg averages over members.
struct SweepRow {
  std::string family;
  int num_members = 0;
  int num_states = 0;
  int num_actions = 0;
  double diameter = 0.0;     // max member diameter (inf when not communicating)
  double separation = 0.0;   // pairwise kernel separation (0 for a single member)
  int horizon = 0;
  std::string policy;
  int seed_index = 0;
  double gap_mean = 0.0;
  double ci_halfwidth = 0.0;
  double vstar = 0.0;
  double eliminations = 0.0;     // mean per episode
  double switches = 0.0;         // mean per episode
  double mstar_survived = 0.0;   // fraction of episodes whose environment member survived
  double gap_mean_avg = 0.0;
  int worst_member = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Leading schema column "v1"; fixed header; floats in shortest round-trip
  // form. Byte-identical for a given config regardless of worker count.
  std::string to_csv() const;
};

// Runs the grid with a worker pool (LMDP_LAB_WORKERS overrides the hardware
// default). Every seed is derived from (master_seed, horizon, seed_index,
// member, episode), never from scheduling order.
SweepResult run_sweep(const ExperimentConfig& cfg);

}  // namespace lmdplab
