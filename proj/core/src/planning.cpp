#include "lmdplab/planning.hpp"

#include <string>

#include "lmdplab/errors.hpp"

namespace lmdplab {

PlanSolution backward_induction(const TabularMdp& mdp) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const int H = mdp.horizon;

  PlanSolution out;
  out.num_states = S;
  out.num_actions = A;
  out.horizon = H;
  out.start_state = mdp.start_state;
  out.values.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
  out.q_values.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  out.policy.assign(static_cast<std::size_t>(H) * S, 0);

  for (int h = H; h >= 1; --h) {
    const double* next = out.values.data() + static_cast<std::size_t>(h) * S;
    double* cur = out.values.data() + static_cast<std::size_t>(h - 1) * S;
    for (int s = 0; s < S; ++s) {
      double best = -1.0;
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.r(s, a);
        const auto row = mdp.row(s, a);
        for (int s2 = 0; s2 < S; ++s2) q += row[s2] * next[s2];
        out.q_values[(static_cast<std::size_t>(h - 1) * S + s) * A + a] = q;
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      cur[s] = best;
      out.policy[static_cast<std::size_t>(h - 1) * S + s] = best_a;
    }
  }
  return out;
}

namespace {

double evaluate_with_action_lookup(const TabularMdp& mdp,
                                   const std::vector<int>& table,
                                   bool stationary) {
  const int S = mdp.num_states;
  const int H = mdp.horizon;
  std::vector<double> occ(S, 0.0), next(S, 0.0);
  occ[mdp.start_state] = 1.0;
  double total = 0.0;
  for (int h = 1; h <= H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double mass = occ[s];
      if (mass == 0.0) continue;
      const int a = stationary ? table[s] : table[static_cast<std::size_t>(h - 1) * S + s];
      if (a < 0 || a >= mdp.num_actions) {
        throw ValidationError("policy action " + std::to_string(a) + " out of range at (h=" +
                              std::to_string(h) + ", s=" + std::to_string(s) + ")");
      }
      total += mass * mdp.r(s, a);
      const auto row = mdp.row(s, a);
      for (int s2 = 0; s2 < S; ++s2) next[s2] += mass * row[s2];
    }
    occ.swap(next);
  }
  return total;
}

}  // namespace

double evaluate_markov_policy(const TabularMdp& mdp, const std::vector<int>& policy_hs) {
  if (policy_hs.size() != static_cast<std::size_t>(mdp.horizon) * mdp.num_states) {
    throw ValidationError("policy table has " + std::to_string(policy_hs.size()) +
                          " entries, expected H*S = " +
                          std::to_string(static_cast<std::size_t>(mdp.horizon) * mdp.num_states));
  }
  return evaluate_with_action_lookup(mdp, policy_hs, /*stationary=*/false);
}

double evaluate_stationary_policy(const TabularMdp& mdp, const std::vector<int>& policy_s) {
  if (policy_s.size() != static_cast<std::size_t>(mdp.num_states)) {
    throw ValidationError("stationary policy has " + std::to_string(policy_s.size()) +
                          " entries, expected S = " + std::to_string(mdp.num_states));
  }
  return evaluate_with_action_lookup(mdp, policy_s, /*stationary=*/true);
}

}  // namespace lmdplab
