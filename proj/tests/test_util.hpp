#pragma once

// Shared fixtures and slow reference implementations used as independent
// oracles by the tests. Everything here favours obviousness over speed:
// exhaustive enumeration, dense linear solves, and recursion over raw
// histories. None of it shares code paths with the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/mdp.hpp"
#include "lmdplab/rng.hpp"

namespace testutil {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

// Random dense MDP whose every row mixes a random distribution with the
// uniform one, so each entry is at least 0.1/S and the chain is irreducible
// (hence communicating) under any policy.
inline lmdplab::TabularMdp random_mdp(int S, int A, int H, std::uint64_t seed) {
  lmdplab::Rng rng(seed);
  lmdplab::TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.start_state = 0;
  mdp.transitions.assign(static_cast<std::size_t>(S) * A * S, 0.0);
  mdp.rewards.assign(static_cast<std::size_t>(S) * A, 0.0);
  std::vector<double> raw(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double total = 0.0;
      for (int s2 = 0; s2 < S; ++s2) {
        raw[static_cast<std::size_t>(s2)] = 0.05 + lmdplab::next_unit(rng);
        total += raw[static_cast<std::size_t>(s2)];
      }
      double acc = 0.0;
      for (int s2 = 0; s2 < S - 1; ++s2) {
        const double p = 0.9 * raw[static_cast<std::size_t>(s2)] / total + 0.1 / S;
        mdp.p(s, a, s2) = p;
        acc += p;
      }
      mdp.p(s, a, S - 1) = 1.0 - acc;
      mdp.r(s, a) = lmdplab::next_unit(rng);
    }
  }
  return mdp;
}

// Random latent class: members share the rewards of the first draw but get
// independent kernels.
inline lmdplab::LatentMdp random_latent(int M, int S, int A, int H, std::uint64_t seed) {
  std::vector<lmdplab::TabularMdp> members;
  members.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    members.push_back(random_mdp(S, A, H, lmdplab::derive_seed(seed, 0x7e57, static_cast<std::uint64_t>(m))));
    if (m > 0) members.back().rewards = members.front().rewards;
  }
  return lmdplab::make_uniform_latent(std::move(members));
}

// Two-member, two-state, two-action class with pairwise separation exactly
// 0.5 concentrated at the single cell (state 1, action 0); both members
// communicate and the class horizon is H. Reward is 1 in state 1, 0 in
// state 0. Member gains: 0.75 (member 0) and 12/19 ≈ 0.6316 (member 1), so
// a gain-greedy scheme starts by trusting member 0.
inline lmdplab::LatentMdp probe_pair(int H) {
  auto row = [](lmdplab::TabularMdp& m, int s, int a, double p0, double p1) {
    m.p(s, a, 0) = p0;
    m.p(s, a, 1) = p1;
  };
  std::vector<lmdplab::TabularMdp> members(2);
  for (auto& m : members) {
    m.num_states = 2;
    m.num_actions = 2;
    m.horizon = H;
    m.start_state = 0;
    m.transitions.assign(8, 0.0);
    m.rewards = {0.0, 0.0, 1.0, 1.0};
    row(m, 0, 0, 0.4, 0.6);
    row(m, 0, 1, 0.4, 0.6);
    row(m, 1, 1, 0.35, 0.65);
  }
  row(members[0], 1, 0, 0.2, 0.8);
  row(members[1], 1, 0, 0.45, 0.55);
  return lmdplab::make_uniform_latent(std::move(members));
}

// ---------------------------------------------------------------------------
// Dense linear algebra (Gaussian elimination with partial pivoting)
// ---------------------------------------------------------------------------

inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (std::size_t c = row + 1; c < n; ++c) acc -= a[row][c] * x[c];
    x[row] = acc / a[row][row];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Finite-horizon oracles
// ---------------------------------------------------------------------------

// Value of a fixed step-dependent policy from the start state, computed by
// backward recursion (the library evaluates forward through occupancies).
inline double policy_value_backward(const lmdplab::TabularMdp& mdp, const std::vector<int>& policy_hs) {
  const int S = mdp.num_states;
  std::vector<double> v(static_cast<std::size_t>(S), 0.0);
  std::vector<double> next(static_cast<std::size_t>(S), 0.0);
  for (int h = mdp.horizon; h >= 1; --h) {
    for (int s = 0; s < S; ++s) {
      const int a = policy_hs[static_cast<std::size_t>(h - 1) * S + s];
      double acc = mdp.r(s, a);
      for (int s2 = 0; s2 < S; ++s2) acc += mdp.p(s, a, s2) * next[static_cast<std::size_t>(s2)];
      v[static_cast<std::size_t>(s)] = acc;
    }
    std::swap(v, next);
  }
  return next[static_cast<std::size_t>(mdp.start_state)];
}

// Optimal finite-horizon value by enumerating every deterministic Markov
// policy. Only usable when A^(H*S) is tiny.
inline double brute_force_optimal(const lmdplab::TabularMdp& mdp, std::vector<int>* best_policy = nullptr) {
  const int cells = mdp.horizon * mdp.num_states;
  long combos = 1;
  for (int i = 0; i < cells; ++i) {
    combos *= mdp.num_actions;
    if (combos > 2'000'000) throw std::runtime_error("brute_force_optimal: too many policies");
  }
  std::vector<int> policy(static_cast<std::size_t>(cells), 0);
  double best = -kInf;
  for (long code = 0; code < combos; ++code) {
    long rem = code;
    for (int i = 0; i < cells; ++i) {
      policy[static_cast<std::size_t>(i)] = static_cast<int>(rem % mdp.num_actions);
      rem /= mdp.num_actions;
    }
    const double val = policy_value_backward(mdp, policy);
    if (val > best) {
      best = val;
      if (best_policy != nullptr) *best_policy = policy;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Prior-averaged (latent) value oracle
// ---------------------------------------------------------------------------

// Expectimax over raw histories: at every node the member posterior is
// recomputed from scratch out of the full prefix, with no quantisation and
// no node pooling. Exponential in the horizon; keep (A*S)^H small.
inline double dr_expectimax_node(const lmdplab::LatentMdp& lm, std::vector<int>& states,
                                 std::vector<int>& actions) {
  const int M = lm.num_members();
  const int S = lm.num_states();
  const int A = lm.num_actions();
  const int h = static_cast<int>(actions.size()) + 1;
  const int s = states.back();
  if (h > lm.horizon()) return 0.0;

  std::vector<double> w(lm.weights);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    for (int m = 0; m < M; ++m) {
      w[static_cast<std::size_t>(m)] *=
          lm.mdps[static_cast<std::size_t>(m)].p(states[t], actions[t], states[t + 1]);
    }
  }
  double z = 0.0;
  for (double wm : w) z += wm;

  double best = -kInf;
  for (int a = 0; a < A; ++a) {
    double val = lm.mdps[0].r(s, a);
    for (int s2 = 0; s2 < S; ++s2) {
      double mass = 0.0;
      for (int m = 0; m < M; ++m) {
        mass += w[static_cast<std::size_t>(m)] * lm.mdps[static_cast<std::size_t>(m)].p(s, a, s2);
      }
      const double prob = mass / z;
      if (prob <= 0.0) continue;
      states.push_back(s2);
      actions.push_back(a);
      val += prob * dr_expectimax_node(lm, states, actions);
      states.pop_back();
      actions.pop_back();
    }
    best = std::max(best, val);
  }
  return best;
}

inline double brute_force_dr_value(const lmdplab::LatentMdp& lm) {
  std::vector<int> states = {lm.start_state()};
  std::vector<int> actions;
  return dr_expectimax_node(lm, states, actions);
}

// ---------------------------------------------------------------------------
// Average-reward oracles
// ---------------------------------------------------------------------------

// Exact gain of a stationary policy on an irreducible chain, via the
// stationary distribution (linear solve).
inline double stationary_gain_exact(const lmdplab::TabularMdp& mdp, const std::vector<int>& policy) {
  const int S = mdp.num_states;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(S),
                                     std::vector<double>(static_cast<std::size_t>(S), 0.0));
  std::vector<double> b(static_cast<std::size_t>(S), 0.0);
  // Rows 0..S-2: (P^T - I) pi = 0. Last row: sum pi = 1.
  for (int i = 0; i < S - 1; ++i) {
    for (int j = 0; j < S; ++j) {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          mdp.p(j, policy[static_cast<std::size_t>(j)], i) - (i == j ? 1.0 : 0.0);
    }
  }
  for (int j = 0; j < S; ++j) a[static_cast<std::size_t>(S - 1)][static_cast<std::size_t>(j)] = 1.0;
  b[static_cast<std::size_t>(S - 1)] = 1.0;
  const std::vector<double> pi = solve_linear(std::move(a), std::move(b));
  double gain = 0.0;
  for (int s = 0; s < S; ++s) {
    gain += pi[static_cast<std::size_t>(s)] * mdp.r(s, policy[static_cast<std::size_t>(s)]);
  }
  return gain;
}

// Enumerates all A^S stationary policies; returns the best exact gain.
inline double best_stationary_gain(const lmdplab::TabularMdp& mdp) {
  const int S = mdp.num_states;
  long combos = 1;
  for (int s = 0; s < S; ++s) {
    combos *= mdp.num_actions;
    if (combos > 1'000'000) throw std::runtime_error("best_stationary_gain: too many policies");
  }
  std::vector<int> policy(static_cast<std::size_t>(S), 0);
  double best = -kInf;
  for (long code = 0; code < combos; ++code) {
    long rem = code;
    for (int s = 0; s < S; ++s) {
      policy[static_cast<std::size_t>(s)] = static_cast<int>(rem % mdp.num_actions);
      rem /= mdp.num_actions;
    }
    best = std::max(best, stationary_gain_exact(mdp, policy));
  }
  return best;
}

// Expected steps to reach `target` from `start` under a fixed stationary
// policy: exact linear solve restricted to the states that can reach the
// target in the policy's transition graph; infinity when `start` cannot.
inline double policy_hitting_time(const lmdplab::TabularMdp& mdp, const std::vector<int>& policy,
                                  int target, int start) {
  if (start == target) return 0.0;
  const int S = mdp.num_states;
  // Backward reachability to the target along positive-probability edges.
  std::vector<char> reach(static_cast<std::size_t>(S), 0);
  reach[static_cast<std::size_t>(target)] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (int s = 0; s < S; ++s) {
      if (reach[static_cast<std::size_t>(s)] != 0) continue;
      for (int s2 = 0; s2 < S; ++s2) {
        if (reach[static_cast<std::size_t>(s2)] != 0 &&
            mdp.p(s, policy[static_cast<std::size_t>(s)], s2) > 0.0) {
          reach[static_cast<std::size_t>(s)] = 1;
          grew = true;
          break;
        }
      }
    }
  }
  if (reach[static_cast<std::size_t>(start)] == 0) return kInf;
  // Mass can still leak to non-reaching states, making the hitting time
  // infinite even from reaching states; detect that leak directly.
  std::vector<int> idx(static_cast<std::size_t>(S), -1);
  std::vector<int> order;
  for (int s = 0; s < S; ++s) {
    if (s != target && reach[static_cast<std::size_t>(s)] != 0) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(order.size());
      order.push_back(s);
    }
  }
  const std::size_t n = order.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = order[i];
    for (int s2 = 0; s2 < S; ++s2) {
      const double p = mdp.p(s, policy[static_cast<std::size_t>(s)], s2);
      if (p <= 0.0) continue;
      if (reach[static_cast<std::size_t>(s2)] == 0) return kInf;
      if (s2 != target) a[i][static_cast<std::size_t>(idx[static_cast<std::size_t>(s2)])] -= p;
    }
    a[i][i] += 1.0;
  }
  const std::vector<double> h = solve_linear(std::move(a), std::move(b));
  return h[static_cast<std::size_t>(idx[static_cast<std::size_t>(start)])];
}

// Minimal expected hitting time over all stationary policies (enumeration).
inline double exact_min_hitting(const lmdplab::TabularMdp& mdp, int target, int start) {
  const int S = mdp.num_states;
  long combos = 1;
  for (int s = 0; s < S; ++s) {
    combos *= mdp.num_actions;
    if (combos > 1'000'000) throw std::runtime_error("exact_min_hitting: too many policies");
  }
  std::vector<int> policy(static_cast<std::size_t>(S), 0);
  double best = kInf;
  for (long code = 0; code < combos; ++code) {
    long rem = code;
    for (int s = 0; s < S; ++s) {
      policy[static_cast<std::size_t>(s)] = static_cast<int>(rem % mdp.num_actions);
      rem /= mdp.num_actions;
    }
    best = std::min(best, policy_hitting_time(mdp, policy, target, start));
  }
  return best;
}

inline double exact_diameter(const lmdplab::TabularMdp& mdp) {
  double worst = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int t = 0; t < mdp.num_states; ++t) {
      if (s == t) continue;
      worst = std::max(worst, exact_min_hitting(mdp, t, s));
    }
  }
  return worst;
}

}  // namespace testutil
