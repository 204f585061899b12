#include "lmdplab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/errors.hpp"
#include "lmdplab/rng.hpp"
#include "lmdplab/separation.hpp"

namespace lmdplab {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void set_row(TabularMdp& mdp, int s, int a, const std::vector<double>& row) {
  std::copy(row.begin(), row.end(),
            mdp.transitions.begin() +
                (static_cast<std::size_t>(s) * mdp.num_actions + a) * mdp.num_states);
}

void set_deterministic(TabularMdp& mdp, int s, int a, int target) {
  auto base = mdp.transitions.begin() +
              (static_cast<std::size_t>(s) * mdp.num_actions + a) * mdp.num_states;
  std::fill(base, base + mdp.num_states, 0.0);
  *(base + target) = 1.0;
}

}  // namespace

LatentMdp make_prop1(int num_members, int horizon) {
  require(num_members >= 1, "prop1: needs at least one member");
  require(horizon >= 2, "prop1: horizon must be at least 2");
  const int m_count = num_members;
  const int S = 3 * m_count + 1;
  const int A = m_count;

  TabularMdp shape = make_empty_mdp(S, A, horizon, 0);
  // Shared structure: hub routing, absorbing outcome states, rewards.
  for (int i = 0; i < m_count; ++i) {
    const int gate = 1 + 3 * i;
    const int good = 2 + 3 * i;
    const int dead = 3 + 3 * i;
    set_deterministic(shape, 0, i, gate);
    for (int a = 0; a < A; ++a) {
      set_deterministic(shape, good, a, good);
      set_deterministic(shape, dead, a, dead);
      shape.rewards[static_cast<std::size_t>(good) * A + a] = 1.0;
    }
  }

  std::vector<TabularMdp> members;
  members.reserve(static_cast<std::size_t>(m_count));
  for (int member = 0; member < m_count; ++member) {
    TabularMdp m = shape;
    for (int i = 0; i < m_count; ++i) {
      const int gate = 1 + 3 * i;
      const int target = (i == member) ? 2 + 3 * i : 3 + 3 * i;
      for (int a = 0; a < A; ++a) set_deterministic(m, gate, a, target);
    }
    validate(m);
    members.push_back(std::move(m));
  }
  return make_uniform_latent(std::move(members));
}

TabularMdp make_two_state(double delta, double eps, int horizon) {
  require(delta > 0.0, "two_state: delta must be positive");
  require(eps >= 0.0, "two_state: eps must be nonnegative");
  require(delta + eps <= 1.0, "two_state: delta + eps must not exceed 1");
  require(horizon >= 1, "two_state: horizon must be positive");

  TabularMdp m = make_empty_mdp(2, 2, horizon, 0);
  set_row(m, 0, 0, {1.0 - delta, delta});
  set_row(m, 0, 1, {1.0 - delta - eps, delta + eps});
  set_row(m, 1, 0, {delta, 1.0 - delta});
  set_row(m, 1, 1, {delta, 1.0 - delta});
  m.rewards = {0.0, 0.0, 1.0, 1.0};
  validate(m);
  return m;
}

LatentMdp make_jao_tree(int num_gadgets, int num_actions, int num_members, double delta,
                        double eps, int horizon) {
  const int S = num_gadgets;
  const int A = num_actions;
  const int M = num_members;
  require(S >= 1, "jao_tree: needs at least one gadget");
  require(A >= 2, "jao_tree: needs at least two actions");
  require(M >= 1, "jao_tree: needs at least one member");
  require(M <= S * A, "jao_tree: num_members must not exceed num_gadgets * num_actions");
  require(delta > 0.0, "jao_tree: delta must be positive");
  require(eps >= 0.0 && eps <= delta, "jao_tree: requires 0 <= eps <= delta");
  require(delta + eps <= 1.0, "jao_tree: delta + eps must not exceed 1");
  require(horizon >= 1, "jao_tree: horizon must be positive");

  // Smallest heap-indexed A-ary tree with at least S leaves. A node is
  // internal iff it has a child inside the array; with T nodes there are
  // ceil((T-1)/A) internal nodes.
  int tree_size = 1;
  auto leaf_count = [&](int t) { return t - (t - 1 + A - 1) / A; };
  while (leaf_count(tree_size) < S) ++tree_size;
  const int T = tree_size;
  const int num_internal = (T - 1 + A - 1) / A;

  const int total_states = T + S;
  TabularMdp shape = make_empty_mdp(total_states, A, horizon, 0);

  // Gadget leaves are the first S leaves in index (BFS) order.
  std::vector<int> gadget_leaf;
  gadget_leaf.reserve(static_cast<std::size_t>(S));
  for (int j = num_internal; j < T && static_cast<int>(gadget_leaf.size()) < S; ++j) {
    gadget_leaf.push_back(j);
  }

  // Internal routing: action a at internal node j descends to child A*j+1+a
  // when it exists, otherwise returns to the root.
  for (int j = 0; j < num_internal; ++j) {
    for (int a = 0; a < A; ++a) {
      const int child = A * j + 1 + a;
      set_deterministic(shape, j, a, child < T ? child : 0);
    }
  }
  // Non-gadget leaves bounce back to the root.
  for (int j = num_internal; j < T; ++j) {
    const bool is_gadget =
        std::find(gadget_leaf.begin(), gadget_leaf.end(), j) != gadget_leaf.end();
    if (is_gadget) continue;
    for (int a = 0; a < A; ++a) set_deterministic(shape, j, a, 0);
  }
  // Reward states: action 0 drifts back down to the paired leaf at rate
  // delta; every other action exits to the root immediately.
  for (int k = 0; k < S; ++k) {
    const int r = T + k;
    const int leaf = gadget_leaf[static_cast<std::size_t>(k)];
    std::vector<double> drift(static_cast<std::size_t>(total_states), 0.0);
    drift[static_cast<std::size_t>(leaf)] = delta;
    drift[static_cast<std::size_t>(r)] = 1.0 - delta;
    set_row(shape, r, 0, drift);
    for (int a = 1; a < A; ++a) set_deterministic(shape, r, a, 0);
    for (int a = 0; a < A; ++a) shape.rewards[static_cast<std::size_t>(r) * A + a] = 1.0;
  }

  std::vector<TabularMdp> members;
  members.reserve(static_cast<std::size_t>(M));
  for (int member = 0; member < M; ++member) {
    TabularMdp m = shape;
    for (int k = 0; k < S; ++k) {
      const int leaf = gadget_leaf[static_cast<std::size_t>(k)];
      const int r = T + k;
      for (int a = 0; a < A; ++a) {
        const int slot = k * A + a;
        const double up = (slot == member) ? delta + eps : delta;
        std::vector<double> row(static_cast<std::size_t>(total_states), 0.0);
        row[static_cast<std::size_t>(r)] = up;
        row[static_cast<std::size_t>(leaf)] = 1.0 - up;
        set_row(m, leaf, a, row);
      }
    }
    validate(m);
    members.push_back(std::move(m));
  }
  return make_uniform_latent(std::move(members));
}

LatentMdp make_prop5_bandit(int horizon) {
  require(horizon >= 2, "prop5_bandit: horizon must be at least 2");
  const int M = 4 * horizon + 5;

  TabularMdp shape = make_empty_mdp(2, 2, horizon, 0);
  shape.rewards = {0.0, 0.0, 1.0, 1.0};

  auto with_rates = [&](double mu0, double mu1) {
    TabularMdp m = shape;
    for (int s = 0; s < 2; ++s) {
      set_row(m, s, 0, {1.0 - mu0, mu0});
      set_row(m, s, 1, {1.0 - mu1, mu1});
    }
    validate(m);
    return m;
  };

  std::vector<TabularMdp> members;
  members.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M - 1; ++i) {
    const double p = 0.25 + (static_cast<double>(i) + 1.0) * 0.25 / static_cast<double>(M);
    require(p > 0.25 && p < 0.5, "prop5_bandit: internal rate outside (1/4, 1/2)");
    members.push_back(with_rates(0.5, 0.5 - p));
  }
  members.push_back(with_rates(0.5, 1.0));
  return make_uniform_latent(std::move(members));
}

LatentMdp make_random_comm(int num_states, int num_actions, int num_members, double delta_target,
                           std::uint64_t seed, int horizon) {
  const int S = num_states;
  const int A = num_actions;
  const int M = num_members;
  require(S >= 2, "random_comm: needs at least two states");
  require(A >= 1, "random_comm: needs at least one action");
  require(M >= 1, "random_comm: needs at least one member");
  require(S * A >= M, "random_comm: needs num_states * num_actions >= num_members");
  require(delta_target > 0.0 && delta_target < 2.0, "random_comm: delta_target must be in (0, 2)");
  require(horizon >= 1, "random_comm: horizon must be positive");

  const double half = delta_target / 2.0;
  constexpr int kMaxRetries = 100;

  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    TabularMdp base = make_empty_mdp(S, A, horizon, 0);
    // Smoothed random rows: 95% a flat-Dirichlet draw, 5% uniform, so every
    // entry is at least 0.05/S and every member is communicating.
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        std::vector<double> gamma(static_cast<std::size_t>(S));
        double total = 0.0;
        for (int s2 = 0; s2 < S; ++s2) {
          const double e = -std::log1p(-next_unit(rng));
          gamma[static_cast<std::size_t>(s2)] = e;
          total += e;
        }
        std::vector<double> row(static_cast<std::size_t>(S));
        double row_sum = 0.0;
        for (int s2 = 0; s2 < S; ++s2) {
          const double dir = total > 0.0 ? gamma[static_cast<std::size_t>(s2)] / total
                                         : 1.0 / static_cast<double>(S);
          double v = 0.95 * dir + 0.05 / static_cast<double>(S);
          row[static_cast<std::size_t>(s2)] = v;
          row_sum += v;
        }
        for (double& v : row) v /= row_sum;
        set_row(base, s, a, row);
      }
    }
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        base.rewards[static_cast<std::size_t>(s) * A + a] = next_unit(rng);
      }
    }

    // Assign one distinct row per member via a shuffled list of (s, a) pairs.
    std::vector<int> cells(static_cast<std::size_t>(S * A));
    std::iota(cells.begin(), cells.end(), 0);
    for (std::size_t i = cells.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_index(rng, i));
      std::swap(cells[i - 1], cells[j]);
    }

    bool feasible = true;
    std::vector<TabularMdp> members;
    members.reserve(static_cast<std::size_t>(M));
    for (int member = 0; member < M && feasible; ++member) {
      const int cell = cells[static_cast<std::size_t>(member)];
      const int s = cell / A;
      const int a = cell % A;
      TabularMdp m = base;
      auto row = m.row(s, a);
      std::size_t hi = 0;
      std::size_t lo = 0;
      for (std::size_t s2 = 1; s2 < row.size(); ++s2) {
        if (row[s2] > row[hi]) hi = s2;
        if (row[s2] < row[lo]) lo = s2;
      }
      const std::size_t offset = (static_cast<std::size_t>(s) * A + a) * S;
      if (row[hi] - half < 0.0 || row[lo] + half > 1.0 || hi == lo) {
        feasible = false;
        break;
      }
      m.transitions[offset + hi] -= half;
      m.transitions[offset + lo] += half;
      validate(m);
      members.push_back(std::move(m));
    }
    if (!feasible) continue;

    LatentMdp lmdp = make_uniform_latent(std::move(members));
    if (M >= 2 && separation_delta(lmdp) < 0.9 * delta_target) continue;
    bool communicating = true;
    for (const TabularMdp& m : lmdp.mdps) {
      if (is_unbounded(diameter(m))) {
        communicating = false;
        break;
      }
    }
    if (!communicating) continue;
    return lmdp;
  }
  throw ValidationError("random_comm: no feasible draw after " + std::to_string(kMaxRetries) +
                        " attempts; lower delta_target or change the shape");
}

void InstanceSpec::validate() const {
  static const char* kFamilies[] = {"prop1", "two_state", "jao_tree", "prop5_bandit",
                                    "random_comm"};
  bool known = false;
  for (const char* f : kFamilies) known = known || family == f;
  if (!known) {
    throw ValidationError("instance spec: unknown family '" + family +
                          "' (expected prop1|two_state|jao_tree|prop5_bandit|random_comm)");
  }
  if (horizon < 1) throw ValidationError("instance spec: horizon must be positive");
  if (family == "prop1") {
    if (num_members < 1) throw ValidationError("instance spec: prop1 needs num_members >= 1");
    if (horizon < 2) throw ValidationError("instance spec: prop1 needs horizon >= 2");
  } else if (family == "two_state") {
    if (!(delta > 0.0) || eps < 0.0 || delta + eps > 1.0) {
      throw ValidationError("instance spec: two_state needs delta > 0, eps >= 0, delta+eps <= 1");
    }
  } else if (family == "jao_tree") {
    if (num_actions < 2) throw ValidationError("instance spec: jao_tree needs num_actions >= 2");
    if (num_members > num_states * num_actions) {
      throw ValidationError("instance spec: jao_tree needs num_members <= S*A");
    }
    if (!(delta > 0.0) || eps < 0.0 || eps > delta || delta + eps > 1.0) {
      throw ValidationError("instance spec: jao_tree needs 0 < delta, 0 <= eps <= delta");
    }
  } else if (family == "prop5_bandit") {
    if (horizon < 2) throw ValidationError("instance spec: prop5_bandit needs horizon >= 2");
  } else if (family == "random_comm") {
    if (num_states < 2) throw ValidationError("instance spec: random_comm needs num_states >= 2");
    if (num_states * num_actions < num_members) {
      throw ValidationError("instance spec: random_comm needs S*A >= num_members");
    }
    if (!(delta_target > 0.0) || delta_target >= 2.0) {
      throw ValidationError("instance spec: random_comm needs delta_target in (0, 2)");
    }
  }
}

LatentMdp build_instance(const InstanceSpec& spec) {
  spec.validate();
  LatentMdp out;
  if (spec.family == "prop1") {
    out = make_prop1(spec.num_members, spec.horizon);
  } else if (spec.family == "two_state") {
    out = make_uniform_latent({make_two_state(spec.delta, spec.eps, spec.horizon)});
  } else if (spec.family == "jao_tree") {
    out = make_jao_tree(spec.num_states, spec.num_actions, spec.num_members, spec.delta, spec.eps,
                        spec.horizon);
  } else if (spec.family == "prop5_bandit") {
    out = make_prop5_bandit(spec.horizon);
  } else {
    out = make_random_comm(spec.num_states, spec.num_actions, spec.num_members, spec.delta_target,
                           spec.seed, spec.horizon);
  }
  if (spec.diameter_target > 0.0) {
    for (std::size_t i = 0; i < out.mdps.size(); ++i) {
      const double d = diameter(out.mdps[i]);
      if (is_unbounded(d) || d > spec.diameter_target + 1e-9) {
        throw ValidationError("instance spec: member " + std::to_string(i) +
                              " has diameter above the requested ceiling");
      }
    }
  }
  return out;
}

}  // namespace lmdplab
