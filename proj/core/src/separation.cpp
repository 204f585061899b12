#include "lmdplab/separation.hpp"

#include <cmath>
#include <limits>

#include "lmdplab/errors.hpp"

namespace lmdplab {

double l1_row_distance(const TabularMdp& a, const TabularMdp& b, int state, int action) {
  const auto ra = a.row(state, action);
  const auto rb = b.row(state, action);
  double d = 0.0;
  for (std::size_t s2 = 0; s2 < ra.size(); ++s2) d += std::abs(ra[s2] - rb[s2]);
  return d;
}

InformativePair most_informative_pair(const TabularMdp& a, const TabularMdp& b) {
  if (a.num_states != b.num_states || a.num_actions != b.num_actions) {
    throw ValidationError("informative pair: mismatched shapes");
  }
  InformativePair best;
  best.distance = -1.0;
  for (int s = 0; s < a.num_states; ++s) {
    for (int act = 0; act < a.num_actions; ++act) {
      const double d = l1_row_distance(a, b, s, act);
      if (d > best.distance) best = {s, act, d};
    }
  }
  return best;
}

double separation_delta(const LatentMdp& lmdp) {
  const int m = lmdp.num_members();
  if (m < 2) throw ValidationError("separation: needs at least two members");
  double delta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const InformativePair p =
          most_informative_pair(lmdp.mdps[static_cast<std::size_t>(i)], lmdp.mdps[static_cast<std::size_t>(j)]);
      delta = std::min(delta, p.distance);
    }
  }
  return delta;
}

}  // namespace lmdplab
