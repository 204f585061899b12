#pragma once

#include <vector>

#include "lmdplab/mdp.hpp"

namespace lmdplab {

// Exact finite-horizon optimum: V over steps 1..H+1 (terminal row ≡ 0),
// Q over steps 1..H, and the deterministic step-dependent optimal policy.
// All argmax ties break toward the lowest action index.
struct PlanSolution {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<double> values;    // flat (H+1)*S; row h-1 holds V*_h
  std::vector<double> q_values;  // flat H*S*A
  std::vector<int> policy;       // flat H*S

  double value(int h, int s) const {  // h in 1..H+1
    return values[static_cast<std::size_t>(h - 1) * num_states + s];
  }
  double q(int h, int s, int a) const {  // h in 1..H
    return q_values[(static_cast<std::size_t>(h - 1) * num_states + s) * num_actions + a];
  }
  int action(int h, int s) const {  // h in 1..H
    return policy[static_cast<std::size_t>(h - 1) * num_states + s];
  }
  double v1() const { return value(1, start_state); }

  int start_state = 0;
};

// Exact dynamic programming over the horizon. Input must be valid.
PlanSolution backward_induction(const TabularMdp& mdp);

// Exact value of a deterministic step-dependent policy (flat H*S action
// table) from the start state, via forward occupancy propagation.
// Throws ValidationError on an out-of-range action index.
double evaluate_markov_policy(const TabularMdp& mdp, const std::vector<int>& policy_hs);

// Same for a stationary policy (one action per state, repeated every step).
double evaluate_stationary_policy(const TabularMdp& mdp, const std::vector<int>& policy_s);

}  // namespace lmdplab
