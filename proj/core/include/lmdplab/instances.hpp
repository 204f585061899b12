#pragma once

#include <cstdint>
#include <string>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/mdp.hpp"

namespace lmdplab {

// Declarative description of a benchmark instance, round-trippable through
// config files and the CLI. Field meaning is family-specific; unused fields
// are ignored by the builder.
struct InstanceSpec {
  std::string family;             // prop1 | two_state | jao_tree | prop5_bandit | random_comm
  int num_members = 2;            // M
  int num_states = 5;             // S
  int num_actions = 2;            // A
  int horizon = 1000;             // H
  double delta = 0.1;             // base transition rate
  double eps = 0.05;              // advantage of the distinguished action
  double delta_target = 0.0;      // requested pairwise separation (random_comm)
  double diameter_target = 0.0;   // if > 0, reject instances whose diameter exceeds it
  std::uint64_t seed = 0;         // generator kernel seed (random families)

  void validate() const;          // family known, parameters in range
};

LatentMdp build_instance(const InstanceSpec& spec);

// Needle-in-a-haystack family: M arms behind a one-way gate. Arm states are
// laid out as 3 states per arm after the hub (state 0); member i makes arm
// i's gate lead to the rewarding absorbing state and every other arm's gate
// lead to the dead absorbing state. Member i's optimal value is H-2, no
// member is recoverable after a wrong first choice, and every member has
// unbounded diameter.
LatentMdp make_prop1(int num_members, int horizon);

// Two-state chain used for closed-form gain checks: states {0,1}, reward
// equals the current state, action 1 moves 0 -> 1 with probability
// delta + eps (action 0 with delta), and both actions move 1 -> 0 with
// probability delta. Gain (delta+eps)/(2*delta+eps), diameter 1/delta.
TabularMdp make_two_state(double delta, double eps, int horizon = 1000);

// Tree-of-chains family: an A-ary tree with S gadget leaves, each paired
// with a rewarding state. Every (leaf, action) slot is a candidate location
// of the advantaged edge; member i upgrades slot i's transition rate from
// delta to delta + eps. All members share gain structure with the two-state
// chain; pairwise separation is exactly 2*eps. Requires num_actions >= 2,
// num_members <= S * A and eps <= delta.
LatentMdp make_jao_tree(int num_gadgets, int num_actions, int num_members, double delta,
                        double eps, int horizon = 1000);

// Two-action bandit family with 4H+5 members encoded as a 2-state MDP
// (reward equals the current state; each action jumps to state 1 with the
// member's success rate for that action, from either state). Action 0
// succeeds with rate 1/2 for every member; action 1 succeeds with rate
// 1/2 - p_i < 1/4 for all members except the last, where it succeeds with
// rate 1. The prior-optimal policy provably avoids action 1, which costs
// about H/2 reward against the last member.
LatentMdp make_prop5_bandit(int horizon);

// Random communicating family: a smoothed random base kernel (every entry
// at least 0.05/S) shared by all members, with member m moving
// delta_target/2 probability mass inside one member-distinct row, giving
// exact pairwise separation delta_target. Draws are retried until every
// member is communicating and the separation checks out. Requires
// S * A >= M.
LatentMdp make_random_comm(int num_states, int num_actions, int num_members, double delta_target,
                           std::uint64_t seed, int horizon = 1000);

}  // namespace lmdplab
