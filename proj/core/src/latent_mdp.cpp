#include "lmdplab/latent_mdp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lmdplab/errors.hpp"
#include "lmdplab/rng.hpp"

namespace lmdplab {

void LatentMdp::validate() const {
  if (mdps.empty()) throw ValidationError("latent mdp: needs at least one member");
  if (weights.size() != mdps.size()) {
    throw ValidationError("latent mdp: weights size " + std::to_string(weights.size()) +
                          " != member count " + std::to_string(mdps.size()));
  }
  const TabularMdp& ref = mdps.front();
  double wsum = 0.0;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    const TabularMdp& m = mdps[i];
    lmdplab::validate(m);
    if (m.num_states != ref.num_states || m.num_actions != ref.num_actions) {
      throw ValidationError("latent mdp: member " + std::to_string(i) + " has mismatched shape");
    }
    if (m.horizon != ref.horizon) {
      throw ValidationError("latent mdp: member " + std::to_string(i) + " has mismatched horizon");
    }
    if (m.start_state != ref.start_state) {
      throw ValidationError("latent mdp: member " + std::to_string(i) +
                            " has mismatched start state");
    }
    if (m.rewards != ref.rewards) {
      throw ValidationError("latent mdp: member " + std::to_string(i) +
                            " has a different reward table (rewards must be shared)");
    }
    if (!(weights[i] >= 0.0)) {
      throw ValidationError("latent mdp: weight " + std::to_string(i) + " is negative or NaN");
    }
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw ValidationError("latent mdp: weights sum to " + std::to_string(wsum) + ", expected 1");
  }
}

LatentMdp make_uniform_latent(std::vector<TabularMdp> mdps) {
  LatentMdp out;
  const std::size_t n = mdps.size();
  if (n == 0) throw ValidationError("latent mdp: needs at least one member");
  out.mdps = std::move(mdps);
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  return out;
}

double Trajectory::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

BeliefUpdate update_belief(const LatentMdp& lmdp, const std::vector<double>& belief, int state,
                           int action, int next) {
  const int m = lmdp.num_members();
  if (static_cast<int>(belief.size()) != m) {
    throw ValidationError("belief update: belief size != member count");
  }
  BeliefUpdate out;
  out.posterior.assign(belief.size(), 0.0);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double w = belief[static_cast<std::size_t>(i)] * lmdp.mdps[static_cast<std::size_t>(i)].p(state, action, next);
    out.posterior[static_cast<std::size_t>(i)] = w;
    sum += w;
  }
  if (sum <= 0.0) {
    throw ValidationError("belief update: observation has zero probability under the belief");
  }
  for (double& w : out.posterior) w /= sum;
  out.marginal = sum;
  return out;
}

std::vector<double> bayes_posterior(const LatentMdp& lmdp, const std::vector<int>& states,
                                    const std::vector<int>& actions) {
  if (states.size() != actions.size() + 1) {
    throw ValidationError("posterior: states must have exactly one more entry than actions");
  }
  const int m = lmdp.num_members();
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  std::vector<double> logw(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double w = lmdp.weights[static_cast<std::size_t>(i)];
    logw[static_cast<std::size_t>(i)] = w > 0.0 ? std::log(w) : kMinusInf;
  }
  for (std::size_t t = 0; t < actions.size(); ++t) {
    for (int i = 0; i < m; ++i) {
      if (logw[static_cast<std::size_t>(i)] == kMinusInf) continue;
      const double p = lmdp.mdps[static_cast<std::size_t>(i)].p(states[t], actions[t], states[t + 1]);
      logw[static_cast<std::size_t>(i)] = p > 0.0 ? logw[static_cast<std::size_t>(i)] + std::log(p) : kMinusInf;
    }
  }
  double best = kMinusInf;
  for (double v : logw) best = std::max(best, v);
  if (best == kMinusInf) {
    throw ValidationError("posterior: observed prefix impossible under every member");
  }
  std::vector<double> post(static_cast<std::size_t>(m), 0.0);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    if (logw[static_cast<std::size_t>(i)] == kMinusInf) continue;
    const double v = std::exp(logw[static_cast<std::size_t>(i)] - best);
    post[static_cast<std::size_t>(i)] = v;
    sum += v;
  }
  for (double& v : post) v /= sum;
  return post;
}

namespace {

Trajectory rollout_with_rng(const TabularMdp& mdp, HistoryPolicy& policy, Rng& rng,
                            int latent_index) {
  Trajectory traj;
  traj.latent_index = latent_index;
  traj.states.reserve(static_cast<std::size_t>(mdp.horizon) + 1);
  traj.actions.reserve(static_cast<std::size_t>(mdp.horizon));
  traj.rewards.reserve(static_cast<std::size_t>(mdp.horizon));

  policy.reset();
  int s = mdp.start_state;
  traj.states.push_back(s);
  policy.observe(s, std::nullopt);
  for (int h = 1; h <= mdp.horizon; ++h) {
    const int a = policy.act(s);
    if (a < 0 || a >= mdp.num_actions) {
      throw ValidationError("rollout: policy chose action " + std::to_string(a) +
                            " outside [0, " + std::to_string(mdp.num_actions) + ")");
    }
    const double r = mdp.r(s, a);
    const int next = static_cast<int>(sample_discrete(mdp.row(s, a), rng));
    traj.actions.push_back(a);
    traj.rewards.push_back(r);
    traj.states.push_back(next);
    policy.observe(next, r);
    s = next;
  }
  return traj;
}

}  // namespace

Trajectory rollout_real(const TabularMdp& mdp, HistoryPolicy& policy, std::uint64_t env_seed,
                        int latent_index) {
  Rng rng(env_seed);
  return rollout_with_rng(mdp, policy, rng, latent_index);
}

Trajectory sample_episode(const LatentMdp& lmdp, HistoryPolicy& policy, std::uint64_t seed) {
  Rng rng(seed);
  const int latent = static_cast<int>(sample_discrete(lmdp.weights, rng));
  return rollout_with_rng(lmdp.mdps[static_cast<std::size_t>(latent)], policy, rng, latent);
}

}  // namespace lmdplab
