#include "lmdplab/average_reward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmdplab/errors.hpp"

namespace lmdplab {

namespace {

// Damping weight for the self-loop kernel mix. See header: keeps the gain,
// greedy policy, and Bellman residual intact while making every chain
// aperiodic; the transformed bias is 1/kDamping times the original.
constexpr double kDamping = 0.5;

// Hitting-time values above this are treated as numerically divergent.
constexpr double kTimeCeiling = 1e12;
constexpr long kSspSweepCap = 10'000'000;

// Largest set W of states from which some stationary policy reaches `target`
// with probability one, by the standard two-level fixpoint: repeatedly keep
// only states that can make positive progress toward the target through
// actions whose whole support stays inside the candidate set.
std::vector<char> almost_sure_reach_set(const TabularMdp& mdp, int target) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  std::vector<char> in_w(S, 1);
  while (true) {
    // Grow R = states reaching target through W-supported actions.
    std::vector<char> in_r(S, 0);
    in_r[target] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int s = 0; s < S; ++s) {
        if (in_r[s] || !in_w[s]) continue;
        for (int a = 0; a < A; ++a) {
          const auto row = mdp.row(s, a);
          bool support_ok = true;
          double mass_to_r = 0.0;
          for (int s2 = 0; s2 < S; ++s2) {
            if (row[s2] <= 0.0) continue;
            if (!in_w[s2]) {
              support_ok = false;
              break;
            }
            if (in_r[s2]) mass_to_r += row[s2];
          }
          if (support_ok && mass_to_r > 0.0) {
            in_r[s] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    if (in_r == in_w) return in_w;
    in_w = in_r;
  }
}

}  // namespace

HittingSolution min_hitting_times(const TabularMdp& mdp, int target, double tol) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  HittingSolution out;
  out.time.assign(S, 0.0);
  out.policy.assign(S, 0);
  if (S == 1) return out;

  const std::vector<char> in_w = almost_sure_reach_set(mdp, target);

  std::vector<double> t(S, 0.0), t_next(S, 0.0);
  for (long sweep = 0; sweep < kSspSweepCap; ++sweep) {
    double max_change = 0.0;
    for (int s = 0; s < S; ++s) {
      if (s == target || !in_w[s]) {
        t_next[s] = 0.0;
        continue;
      }
      double best = kUnbounded;
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.row(s, a);
        double acc = 1.0;
        bool allowed = true;
        for (int s2 = 0; s2 < S; ++s2) {
          const double p = row[s2];
          if (p <= 0.0) continue;
          if (!in_w[s2]) {  // stepping outside W forfeits sure arrival
            allowed = false;
            break;
          }
          if (s2 != target) acc += p * t[s2];
        }
        if (allowed && acc < best) best = acc;
      }
      t_next[s] = best;
      max_change = std::max(max_change, std::abs(t_next[s] - t[s]));
    }
    t.swap(t_next);
    if (max_change <= tol) break;
    if (*std::max_element(t.begin(), t.end()) > kTimeCeiling) break;
  }

  for (int s = 0; s < S; ++s) {
    if (s == target) {
      out.time[s] = 0.0;
      continue;
    }
    if (!in_w[s] || t[s] > kTimeCeiling) {
      out.time[s] = kUnbounded;
      continue;
    }
    out.time[s] = t[s];
    // Greedy travel action at the converged values, lowest index on ties.
    double best = kUnbounded;
    int best_a = 0;
    for (int a = 0; a < A; ++a) {
      const auto row = mdp.row(s, a);
      double acc = 1.0;
      bool allowed = true;
      for (int s2 = 0; s2 < S; ++s2) {
        const double p = row[s2];
        if (p <= 0.0) continue;
        if (!in_w[s2]) {
          allowed = false;
          break;
        }
        if (s2 != target) acc += p * t[s2];
      }
      if (allowed && acc < best) {
        best = acc;
        best_a = a;
      }
    }
    out.policy[s] = best_a;
  }
  return out;
}

double diameter(const TabularMdp& mdp, double tol) {
  double worst = 0.0;
  for (int target = 0; target < mdp.num_states; ++target) {
    const HittingSolution hit = min_hitting_times(mdp, target, tol);
    for (int s = 0; s < mdp.num_states; ++s) {
      if (s == target) continue;
      if (is_unbounded(hit.time[s])) return kUnbounded;
      worst = std::max(worst, hit.time[s]);
    }
  }
  return worst;
}

AvgSolution relative_value_iteration(const TabularMdp& mdp, double tol, long max_sweeps) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;

  std::vector<double> v(S, 0.0), w(S, 0.0);
  std::vector<int> greedy(S, 0);
  double span = kUnbounded;
  double gain = 0.0;
  long sweeps = 0;

  for (sweeps = 1; sweeps <= max_sweeps; ++sweeps) {
    double diff_min = kUnbounded, diff_max = -kUnbounded;
    for (int s = 0; s < S; ++s) {
      double best = -kUnbounded;
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.row(s, a);
        double acc = 0.0;
        for (int s2 = 0; s2 < S; ++s2) acc += row[s2] * v[s2];
        const double q = mdp.r(s, a) + kDamping * v[s] + (1.0 - kDamping) * acc;
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      w[s] = best;
      greedy[s] = best_a;
      const double d = best - v[s];
      diff_min = std::min(diff_min, d);
      diff_max = std::max(diff_max, d);
    }
    span = diff_max - diff_min;
    gain = 0.5 * (diff_max + diff_min);
    // Re-anchor at state 0 to stop the raw values from drifting upward.
    const double ref = w[0];
    for (int s = 0; s < S; ++s) v[s] = w[s] - ref;
    if (span <= tol) break;
  }
  if (span > tol) {
    throw UnboundedSpanError(
        "relative value iteration did not contract (span " + std::to_string(span) + " after " +
            std::to_string(max_sweeps) + " sweeps); the chain is likely non-communicating",
        max_sweeps, span);
  }

  AvgSolution out;
  out.gain = gain;
  out.iterations = sweeps;
  out.policy = greedy;

  // Undo the damping's bias scale-up (transformed bias = original / (1-τ)),
  // then anchor the bias at min = 0.
  out.bias.assign(S, 0.0);
  for (int s = 0; s < S; ++s) out.bias[s] = v[s] * (1.0 - kDamping);
  const double lo = *std::min_element(out.bias.begin(), out.bias.end());
  for (double& b : out.bias) b -= lo;

  // Bellman residual of the returned (gain, bias) on the undamped model.
  double resid = 0.0;
  for (int s = 0; s < S; ++s) {
    double best = -kUnbounded;
    for (int a = 0; a < A; ++a) {
      const auto row = mdp.row(s, a);
      double acc = mdp.r(s, a);
      for (int s2 = 0; s2 < S; ++s2) acc += row[s2] * out.bias[s2];
      best = std::max(best, acc);
    }
    resid = std::max(resid, std::abs(best - out.bias[s] - out.gain));
  }
  out.residual = resid;

  out.diameter = diameter(mdp, tol);
  return out;
}

}  // namespace lmdplab
