#include "lmdplab/gap.hpp"

#include <cmath>

#include "lmdplab/errors.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/planning.hpp"
#include "lmdplab/rng.hpp"

namespace lmdplab {

GapEstimate gap_monte_carlo(const TabularMdp& environment, const HistoryPolicy& prototype,
                            long episodes, std::uint64_t seed) {
  if (episodes <= 0) throw ValidationError("gap estimate: episodes must be positive");
  validate(environment);

  GapEstimate out;
  out.episodes = episodes;
  out.vstar = backward_induction(environment).v1();

  double sum = 0.0;
  double sum_sq = 0.0;
  for (long ep = 0; ep < episodes; ++ep) {
    const std::uint64_t ep_index = static_cast<std::uint64_t>(ep);
    auto agent = prototype.clone(derive_seed(seed, ep_index, 1));
    const Trajectory traj = rollout_real(environment, *agent, derive_seed(seed, ep_index, 0));
    const double ret = traj.total_reward();
    sum += ret;
    sum_sq += ret * ret;
  }
  const double n = static_cast<double>(episodes);
  out.mean_return = sum / n;
  out.gap_mean = out.vstar - out.mean_return;
  if (episodes > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    out.ci_halfwidth = 1.96 * std::sqrt(var / n);
  }
  return out;
}

}  // namespace lmdplab
