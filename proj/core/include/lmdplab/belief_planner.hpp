#pragma once

#include <cstddef>
#include <memory>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

struct DrSolveLimits {
  // Upper bound on reachable (step, state, belief) nodes before the solver
  // gives up with a LimitError.
  std::size_t max_nodes = 1'000'000;
};

struct DrSolution {
  std::unique_ptr<HistoryPolicy> policy;  // exact prior-optimal agent ("dr_exact")
  double average_value = 0.0;             // prior-weighted expected return of that agent
  std::size_t node_count = 0;             // nodes in the solved belief graph
};

// Exact finite-horizon planning on the belief MDP induced by the latent
// class: enumerate reachable (state, posterior) pairs level by level, then
// run backward induction over them. Posteriors are deduplicated by rounding
// each coordinate to 1e-9, and both the solver and the returned agent update
// posteriors through update_belief from the pooled canonical vector, so the
// agent's lookups always land on solved nodes when the episode is generated
// by any positively-weighted member. Action ties break toward the lowest
// index. Throws LimitError when the reachable graph exceeds
// limits.max_nodes.
DrSolution solve_dr_optimal(const LatentMdp& lmdp, const DrSolveLimits& limits = {});

}  // namespace lmdplab
