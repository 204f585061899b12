#pragma once

#include <cstdint>
#include <vector>

#include "lmdplab/mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// A finite family of tabular MDPs over a shared (states, actions, horizon,
// start state, reward table), together with a prior weight per member. One
// member is drawn per episode and stays hidden from the acting policy.
struct LatentMdp {
  std::vector<TabularMdp> mdps;
  std::vector<double> weights;

  int num_members() const { return static_cast<int>(mdps.size()); }
  int num_states() const { return mdps.empty() ? 0 : mdps.front().num_states; }
  int num_actions() const { return mdps.empty() ? 0 : mdps.front().num_actions; }
  int horizon() const { return mdps.empty() ? 0 : mdps.front().horizon; }
  int start_state() const { return mdps.empty() ? -1 : mdps.front().start_state; }

  // Every member valid; identical shapes, horizon, start state and reward
  // table across members; weights nonnegative and summing to 1 (1e-12).
  void validate() const;
};

// Uniform-weight wrapper over a list of members.
LatentMdp make_uniform_latent(std::vector<TabularMdp> mdps);

struct Trajectory {
  int latent_index = -1;            // member that generated the episode
  std::vector<int> states;          // s_1..s_{H+1}
  std::vector<int> actions;         // a_1..a_H
  std::vector<double> rewards;      // r_1..r_H
  double total_reward() const;
};

// One posterior update step: posterior[i] ∝ belief[i] * P_i(next | state, action),
// marginal = sum of the unnormalized mass (the probability of `next` under the
// belief-mixture kernel). Throws ValidationError when the marginal is zero,
// i.e. the observation is impossible under every positively-weighted member.
// Planner and executor both route through this function so that repeated
// updates reproduce bit-identical belief vectors.
struct BeliefUpdate {
  std::vector<double> posterior;
  double marginal = 0.0;
};
BeliefUpdate update_belief(const LatentMdp& lmdp, const std::vector<double>& belief, int state,
                           int action, int next);

// Posterior over members given an observed prefix (states has one more entry
// than actions), computed in log space from the prior weights. Members that
// assign zero probability to any observed transition get posterior 0.
std::vector<double> bayes_posterior(const LatentMdp& lmdp, const std::vector<int>& states,
                                    const std::vector<int>& actions);

// Roll one episode of `policy` against a fixed environment `mdp` using a
// dedicated environment RNG seeded with `env_seed`. The policy is reset at
// the start. `latent_index` is only recorded in the trajectory.
Trajectory rollout_real(const TabularMdp& mdp, HistoryPolicy& policy, std::uint64_t env_seed,
                        int latent_index = -1);

// Draw a member from the prior with the episode RNG, then roll the policy
// against it with the same RNG stream.
Trajectory sample_episode(const LatentMdp& lmdp, HistoryPolicy& policy, std::uint64_t seed);

}  // namespace lmdplab
