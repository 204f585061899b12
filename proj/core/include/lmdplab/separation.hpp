#pragma once

#include <utility>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/mdp.hpp"

namespace lmdplab {

// L1 distance between the transition rows of two MDPs at (state, action).
double l1_row_distance(const TabularMdp& a, const TabularMdp& b, int state, int action);

// The (state, action) pair maximizing the L1 row distance between two
// members, plus that distance. Ties break toward the lexicographically
// smallest (state, action).
struct InformativePair {
  int state = 0;
  int action = 0;
  double distance = 0.0;
};
InformativePair most_informative_pair(const TabularMdp& a, const TabularMdp& b);

// min over unordered member pairs of max over (state, action) of the L1 row
// distance. Requires at least two members. Zero means two members coincide.
double separation_delta(const LatentMdp& lmdp);

}  // namespace lmdplab
