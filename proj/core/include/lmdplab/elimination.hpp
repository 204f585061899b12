#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// Precomputed per-class data for the separated elimination agent ("alg1").
// Built once and shared by every clone.
struct SeparatedEliminationConfig {
  std::shared_ptr<const LatentMdp> lmdp;
  double c0 = 1.0;
  std::vector<AvgSolution> avg;                     // gain-optimal solution per member
  std::vector<std::vector<HittingSolution>> travel;  // [member][target]: fastest-route policies
  double separation = 0.0;                          // pairwise L1 separation of the class
  double diameter_bound = 0.0;                      // max member diameter
  long samples_per_round = 0;                       // probes collected before each elimination
  long travel_budget = 0;                           // 2 * ceil(diameter_bound) steps per leg
};

// Requires every member communicating and separation > 0. The per-round
// sample budget is max(1, ceil(c0 * ln^2(S*M*H) * ln(M*H) / separation^4)).
SeparatedEliminationConfig make_separated_config(std::shared_ptr<const LatentMdp> lmdp,
                                                 double c0 = 1.0);

// Two-stage agent: while at least two members survive, repeatedly pick a
// random surviving pair, walk to the (state, action) where their kernels
// disagree most (rotating through the survivors' fastest-route policies,
// one bounded leg each), collect the round's probe samples there, and
// eliminate the pair member whose kernel explains the samples worse (by
// log-likelihood ratio; a member assigning zero probability to an observed
// outcome loses immediately). Once one member survives, play its
// gain-optimal stationary policy.
std::unique_ptr<HistoryPolicy> make_separated_elimination(
    std::shared_ptr<const SeparatedEliminationConfig> config, std::uint64_t seed);

// Convenience: build the config and the agent in one call.
std::unique_ptr<HistoryPolicy> make_separated_elimination(std::shared_ptr<const LatentMdp> lmdp,
                                                          double c0, std::uint64_t seed);

}  // namespace lmdplab
