#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// Running deviation statistic for a window of (state, action, next) records
// under a candidate kernel: sum over records of
//   E_{s' ~ P(state, action)}[bias(s')] - bias(next).
// Under the true kernel this is a martingale with increments bounded by the
// bias span.
double deviation_statistic(const TabularMdp& mdp, const std::vector<double>& bias,
                           const std::vector<std::array<int, 3>>& window);

// Elimination threshold for a window of `window_len` records:
//   diameter * sqrt(2 * window_len * ln(2 * horizon * num_members)).
double deviation_threshold(double diameter, long window_len, int horizon, int num_members);

// Optimistic elimination agent ("alg3"): always follow the gain-optimal
// stationary policy of the surviving member with the highest gain (lowest
// index on ties), accumulate the deviation statistic of that member's
// kernel over the steps since it was adopted, and eliminate it when the
// statistic exceeds the threshold for the window length. If every member
// gets eliminated the agent keeps the last one and raises the fallback
// flag. Requires every member communicating. Deterministic; the clone seed
// is ignored.
std::unique_ptr<HistoryPolicy> make_optimistic_elimination(std::shared_ptr<const LatentMdp> lmdp);

}  // namespace lmdplab
