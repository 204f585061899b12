#pragma once

#include <cstdint>

#include "lmdplab/mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// Monte-Carlo estimate of the optimality gap of a policy against a fixed
// realized environment: (optimal start value) - (mean policy return).
struct GapEstimate {
  double gap_mean = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 * sample standard error of the mean
  double vstar = 0.0;         // optimal finite-horizon start value of the environment
  double mean_return = 0.0;
  long episodes = 0;
};

// Each episode clones the prototype with a seed derived from (seed, episode)
// and rolls it against `environment` with an independently derived
// environment seed, so estimates are reproducible and worker-order free.
GapEstimate gap_monte_carlo(const TabularMdp& environment, const HistoryPolicy& prototype,
                            long episodes, std::uint64_t seed);

}  // namespace lmdplab
