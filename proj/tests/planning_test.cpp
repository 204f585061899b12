#include <doctest.h>

#include <cmath>
#include <vector>

#include "lmdplab/errors.hpp"
#include "lmdplab/instances.hpp"
#include "lmdplab/planning.hpp"
#include "lmdplab/rng.hpp"
#include "test_util.hpp"

using namespace lmdplab;

namespace {

// Deterministic 2-state toggle: action 0 stays, action 1 moves; reward is 1
// only in state 1. From state 0 with horizon 3 the best plan is
// move, stay, stay -> 0 + 1 + 1 = 2.
TabularMdp toggle_mdp(int horizon) {
  TabularMdp m;
  m.num_states = 2;
  m.num_actions = 2;
  m.horizon = horizon;
  m.start_state = 0;
  m.transitions.assign(8, 0.0);
  m.p(0, 0, 0) = 1.0;
  m.p(0, 1, 1) = 1.0;
  m.p(1, 0, 1) = 1.0;
  m.p(1, 1, 0) = 1.0;
  m.rewards = {0.0, 0.0, 1.0, 1.0};
  return m;
}

}  // namespace

TEST_CASE("backward induction solves a deterministic toggle chain exactly") {
  const TabularMdp m = toggle_mdp(3);
  const PlanSolution plan = backward_induction(m);
  CHECK(plan.v1() == 2.0);
  CHECK(plan.action(1, 0) == 1);  // move into the rewarding state
  CHECK(plan.action(2, 1) == 0);  // then stay
  CHECK(plan.value(4, 0) == 0.0);
  CHECK(plan.value(4, 1) == 0.0);
  // One step left in state 0: both actions pay 0 now and nothing later.
  CHECK(plan.value(3, 0) == 0.0);
  CHECK(plan.value(3, 1) == 1.0);
}

TEST_CASE("backward induction matches exhaustive policy enumeration") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const TabularMdp m = testutil::random_mdp(3, 2, 3, seed);
    validate(m);
    std::vector<int> best_policy;
    const double best = testutil::brute_force_optimal(m, &best_policy);
    const PlanSolution plan = backward_induction(m);
    CHECK(plan.v1() == doctest::Approx(best).epsilon(1e-12));
    // The planner's own policy must achieve its claimed value under the
    // independent backward evaluator as well.
    CHECK(testutil::policy_value_backward(m, plan.policy) == doctest::Approx(plan.v1()).epsilon(1e-12));
  }
}

TEST_CASE("values, q-values, and policy are mutually consistent") {
  const TabularMdp m = testutil::random_mdp(4, 3, 6, 77);
  const PlanSolution plan = backward_induction(m);
  for (int h = 1; h <= m.horizon; ++h) {
    for (int s = 0; s < m.num_states; ++s) {
      double best_q = -testutil::kInf;
      int best_a = -1;
      for (int a = 0; a < m.num_actions; ++a) {
        // Recompute Q from the stored next-step values.
        double q = m.r(s, a);
        for (int s2 = 0; s2 < m.num_states; ++s2) q += m.p(s, a, s2) * plan.value(h + 1, s2);
        CHECK(plan.q(h, s, a) == doctest::Approx(q).epsilon(1e-12));
        if (q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      CHECK(plan.value(h, s) == doctest::Approx(best_q).epsilon(1e-12));
      // Ties break toward the lowest index, so the stored action never
      // exceeds the first argmax and achieves the same Q.
      CHECK(plan.action(h, s) <= best_a);
      CHECK(plan.q(h, s, plan.action(h, s)) == doctest::Approx(best_q).epsilon(1e-12));
    }
  }
}

TEST_CASE("argmax ties break toward the lowest action") {
  // Duplicate the action set: actions 0 and 1 are byte-identical, so every
  // optimal cell is a tie and the policy must be identically 0.
  TabularMdp m = testutil::random_mdp(3, 1, 4, 5);
  TabularMdp dup = m;
  dup.num_actions = 2;
  dup.transitions.clear();
  dup.rewards.clear();
  for (int s = 0; s < m.num_states; ++s) {
    for (int rep = 0; rep < 2; ++rep) {
      for (int s2 = 0; s2 < m.num_states; ++s2) dup.transitions.push_back(m.p(s, 0, s2));
      dup.rewards.push_back(m.r(s, 0));
    }
  }
  validate(dup);
  const PlanSolution plan = backward_induction(dup);
  for (int a : plan.policy) CHECK(a == 0);
}

TEST_CASE("evaluate_markov_policy agrees with the backward evaluator") {
  const TabularMdp m = testutil::random_mdp(4, 3, 5, 21);
  Rng rng(9);
  std::vector<int> policy(static_cast<std::size_t>(m.horizon * m.num_states));
  for (int& a : policy) a = next_index(rng, m.num_actions);
  CHECK(evaluate_markov_policy(m, policy) ==
        doctest::Approx(testutil::policy_value_backward(m, policy)).epsilon(1e-12));
}

TEST_CASE("evaluate_stationary_policy equals the replicated markov policy") {
  const TabularMdp m = testutil::random_mdp(4, 2, 7, 31);
  const std::vector<int> stationary = {1, 0, 1, 0};
  std::vector<int> replicated;
  for (int h = 0; h < m.horizon; ++h) {
    replicated.insert(replicated.end(), stationary.begin(), stationary.end());
  }
  CHECK(evaluate_stationary_policy(m, stationary) ==
        doctest::Approx(evaluate_markov_policy(m, replicated)).epsilon(1e-12));
}

TEST_CASE("evaluating the optimal policy reproduces the optimal value") {
  const TabularMdp m = testutil::random_mdp(5, 3, 9, 44);
  const PlanSolution plan = backward_induction(m);
  CHECK(evaluate_markov_policy(m, plan.policy) == doctest::Approx(plan.v1()).epsilon(1e-12));
}

TEST_CASE("evaluate_markov_policy rejects out-of-range actions") {
  const TabularMdp m = testutil::random_mdp(3, 2, 2, 1);
  std::vector<int> policy(static_cast<std::size_t>(m.horizon * m.num_states), 0);
  policy[0] = 2;  // only actions 0 and 1 exist; cell (h=1, start) is occupied
  CHECK_THROWS_AS(evaluate_markov_policy(m, policy), ValidationError);
}

TEST_CASE("model validation names broken invariants") {
  TabularMdp m = toggle_mdp(3);
  CHECK_NOTHROW(validate(m));

  TabularMdp bad_row = m;
  bad_row.p(0, 0, 0) = 0.5;  // row now sums to 0.5
  CHECK_THROWS_AS(validate(bad_row), ValidationError);

  TabularMdp bad_reward = m;
  bad_reward.r(1, 1) = 1.5;
  CHECK_THROWS_AS(validate(bad_reward), ValidationError);

  TabularMdp bad_start = m;
  bad_start.start_state = 2;
  CHECK_THROWS_AS(validate(bad_start), ValidationError);

  TabularMdp bad_shape = m;
  bad_shape.transitions.pop_back();
  CHECK_THROWS_AS(validate(bad_shape), ValidationError);

  TabularMdp bad_horizon = m;
  bad_horizon.horizon = 0;
  CHECK_THROWS_AS(validate(bad_horizon), ValidationError);

  TabularMdp negative_prob = m;
  negative_prob.p(0, 0, 0) = -0.25;
  negative_prob.p(0, 0, 1) = 1.25;
  CHECK_THROWS_AS(validate(negative_prob), ValidationError);
}

TEST_CASE("needle family plans to its documented optimum") {
  // Each member of the gated-arms family pays H-2 when the right arm is
  // known: one step to the gate, one through it, reward afterwards.
  for (int m_count = 2; m_count <= 4; ++m_count) {
    for (int horizon = 4; horizon <= 8; ++horizon) {
      const LatentMdp family = make_prop1(m_count, horizon);
      for (const TabularMdp& member : family.mdps) {
        CHECK(backward_induction(member).v1() == horizon - 2.0);
      }
    }
  }
}
