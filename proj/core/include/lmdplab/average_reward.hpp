#pragma once

#include <limits>
#include <vector>

#include "lmdplab/mdp.hpp"

namespace lmdplab {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();
inline bool is_unbounded(double d) { return !(d < kUnbounded); }

// Infinite-horizon average-reward optimum of one communicating MDP: the
// state-independent optimal gain, the relative-value (bias) vector anchored
// at min = 0, the stationary greedy policy, the diameter, and the final
// span residual of the iteration.
struct AvgSolution {
  double gain = 0.0;
  std::vector<double> bias;  // S, min entry 0
  std::vector<int> policy;   // S, ties toward lowest action
  double diameter = kUnbounded;
  double residual = 0.0;
  long iterations = 0;
};

// Relative value iteration with span-seminorm stopping (span of successive
// differences ≤ tol). Runs on the half-self-loop damped kernel so periodic
// chains converge too: the damping leaves the gain, the greedy policy, and
// the fixed-point residual unchanged and only rescales the bias, which is
// rescaled back before returning. Fills `diameter` via diameter().
// Throws UnboundedSpanError after `max_sweeps` sweeps without convergence
// (the signature of a non-communicating input with state-dependent gain).
AvgSolution relative_value_iteration(const TabularMdp& mdp, double tol = 1e-10,
                                     long max_sweeps = 10'000'000);

// Minimum expected hitting times onto `target` over stationary policies,
// via stochastic-shortest-path value iteration (target absorbing, unit step
// cost), and the greedy travel policy attaining them. Unreachable states get
// kUnbounded times; the travel policy defaults to action 0 there.
struct HittingSolution {
  std::vector<double> time;  // S; time[target] == 0
  std::vector<int> policy;   // S; argmin action, ties toward lowest
};
HittingSolution min_hitting_times(const TabularMdp& mdp, int target, double tol = 1e-10);

// max over ordered pairs s ≠ s' of the minimum expected hitting time;
// kUnbounded when some pair is unreachable (non-communicating chain).
double diameter(const TabularMdp& mdp, double tol = 1e-10);

}  // namespace lmdplab
