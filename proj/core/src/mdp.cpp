#include "lmdplab/mdp.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "lmdplab/errors.hpp"

namespace lmdplab {

namespace {
constexpr double kRowSumTol = 1e-12;
}

TabularMdp make_empty_mdp(int num_states, int num_actions, int horizon, int start_state) {
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.horizon = horizon;
  mdp.start_state = start_state;
  mdp.transitions.assign(
      static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  mdp.rewards.assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
  return mdp;
}

void validate(const TabularMdp& mdp) {
  if (mdp.num_states <= 0 || mdp.num_actions <= 0) {
    throw ValidationError("model must have at least one state and one action");
  }
  if (mdp.horizon <= 0) {
    throw ValidationError("horizon must be positive, got " + std::to_string(mdp.horizon));
  }
  if (mdp.start_state < 0 || mdp.start_state >= mdp.num_states) {
    throw ValidationError("start_state " + std::to_string(mdp.start_state) +
                          " out of range [0, " + std::to_string(mdp.num_states) + ")");
  }
  const std::size_t want_t =
      static_cast<std::size_t>(mdp.num_states) * mdp.num_actions * mdp.num_states;
  if (mdp.transitions.size() != want_t) {
    throw ValidationError("transition tensor has " + std::to_string(mdp.transitions.size()) +
                          " entries, expected " + std::to_string(want_t));
  }
  const std::size_t want_r = static_cast<std::size_t>(mdp.num_states) * mdp.num_actions;
  if (mdp.rewards.size() != want_r) {
    throw ValidationError("reward table has " + std::to_string(mdp.rewards.size()) +
                          " entries, expected " + std::to_string(want_r));
  }
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        const double v = mdp.p(s, a, s2);
        if (v < 0.0 || v > 1.0) {
          throw ValidationError("probability " + std::to_string(v) + " out of [0,1] at (s=" +
                                std::to_string(s) + ", a=" + std::to_string(a) +
                                ", s'=" + std::to_string(s2) + ")");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        throw ValidationError("transition row (s=" + std::to_string(s) + ", a=" +
                              std::to_string(a) + ") sums to " + std::to_string(sum));
      }
      const double rw = mdp.r(s, a);
      if (rw < 0.0 || rw > 1.0) {
        throw ValidationError("reward " + std::to_string(rw) + " out of [0,1] at (s=" +
                              std::to_string(s) + ", a=" + std::to_string(a) + ")");
      }
    }
  }
}

}  // namespace lmdplab
