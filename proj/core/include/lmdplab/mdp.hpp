#pragma once

#include <span>
#include <vector>

namespace lmdplab {

// One finite tabular environment: S states, A actions, an S×A×S transition
// tensor, an S×A reward table with entries in [0,1], an episode horizon, and
// a fixed start state. Immutable by convention after construction; every
// planner/simulator treats it as read-only shared data.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int start_state = 0;
  std::vector<double> transitions;  // flat S*A*S, row-major (s, a, s')
  std::vector<double> rewards;      // flat S*A

  double p(int s, int a, int s2) const {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2];
  }
  double& p(int s, int a, int s2) {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2];
  }
  std::span<const double> row(int s, int a) const {
    return {transitions.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  double r(int s, int a) const {
    return rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
  double& r(int s, int a) {
    return rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
};

// Convenience constructor: zero-filled tables of the right shape.
TabularMdp make_empty_mdp(int num_states, int num_actions, int horizon, int start_state);

// Throws ValidationError naming the first offending row/entry if any model
// invariant fails: row sums within 1e-12 of 1, probabilities in [0,1],
// rewards in [0,1], start state in range, shapes consistent.
void validate(const TabularMdp& mdp);

}  // namespace lmdplab
