#pragma once

#include <cstdint>
#include <memory>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// General optimistic agent ("alg4"): follow the gain-optimal stationary
// policy of the believed member; every step appends (state, action, next,
// believed member's bias) to a staging buffer and computes an importance
// score
//   sup_{f1,f2} ||f1-f2||^2_staged / (||f1-f2||^2_committed + alpha)
// over the class of one-step bias-prediction functions, with
// alpha = 4*diameter^2 + 1. Once the score reaches 1 the staged records are
// committed, the member minimizing the committed squared prediction error
// is refit, the confidence set is rebuilt with radius
// beta = c * diameter^2 * ln(horizon * members^2), and play switches to the
// highest-gain member in the set (the refit member always qualifies, so the
// set is never empty). With a single member the score is identically zero
// and the agent never switches. Requires every member communicating.
// Deterministic; the clone seed is ignored.
std::unique_ptr<HistoryPolicy> make_general_optimistic(std::shared_ptr<const LatentMdp> lmdp,
                                                       double c = 1.0);

}  // namespace lmdplab
