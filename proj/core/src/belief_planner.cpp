#include "lmdplab/belief_planner.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmdplab/errors.hpp"

namespace lmdplab {
namespace {

constexpr double kQuantum = 1e9;  // posterior coordinates rounded to 1e-9

std::vector<long long> quantize(const std::vector<double>& belief) {
  std::vector<long long> key(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i) key[i] = std::llround(belief[i] * kQuantum);
  return key;
}

struct KeyHash {
  std::size_t operator()(const std::vector<long long>& key) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (long long v : key) {
      std::uint64_t x = static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      x ^= x >> 30;
      x *= 0xBF58476D1CE4E5B9ull;
      x ^= x >> 27;
      h ^= x;
    }
    return static_cast<std::size_t>(h);
  }
};

std::uint64_t node_key(int state, int belief_index) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(state)) << 32) |
         static_cast<std::uint32_t>(belief_index);
}

// Solved belief graph shared between the solver and all agent clones.
struct BeliefTable {
  LatentMdp lmdp;
  std::vector<std::vector<double>> beliefs;  // canonical pooled posteriors
  std::unordered_map<std::vector<long long>, int, KeyHash> pool;
  // Per level h in 1..H: map (state, belief index) -> node id, and the
  // chosen action per node id.
  std::vector<std::unordered_map<std::uint64_t, int>> level;
  std::vector<std::vector<int>> action;
  std::size_t node_count = 0;

  int intern_belief(const std::vector<double>& b) {
    auto key = quantize(b);
    auto it = pool.find(key);
    if (it != pool.end()) return it->second;
    const int idx = static_cast<int>(beliefs.size());
    beliefs.push_back(b);
    pool.emplace(std::move(key), idx);
    return idx;
  }
};

class BeliefAgent final : public HistoryPolicy {
public:
  explicit BeliefAgent(std::shared_ptr<const BeliefTable> table) : tbl_(std::move(table)) {}

  void reset() override {
    h_ = 1;
    belief_idx_ = 0;
    state_ = tbl_->lmdp.start_state();
    last_action_ = -1;
  }

  void observe(int state, std::optional<double> reward) override {
    if (!reward.has_value()) {
      if (state != tbl_->lmdp.start_state()) {
        throw ValidationError("belief agent: episode must start at the planned start state");
      }
      state_ = state;
      return;
    }
    if (last_action_ < 0) {
      throw ValidationError("belief agent: observed a transition before acting");
    }
    if (h_ < horizon()) {
      const BeliefUpdate upd = update_belief(
          tbl_->lmdp, tbl_->beliefs[static_cast<std::size_t>(belief_idx_)], state_, last_action_,
          state);
      const auto it = tbl_->pool.find(quantize(upd.posterior));
      if (it == tbl_->pool.end()) {
        throw ValidationError(
            "belief agent: observation leads outside the solved belief graph (episode not "
            "generated by a positively-weighted member?)");
      }
      belief_idx_ = it->second;
    }
    state_ = state;
    ++h_;
  }

  int act(int state) override {
    if (h_ > horizon()) {
      throw ValidationError("belief agent: episode is longer than the planned horizon");
    }
    const auto& lvl = tbl_->level[static_cast<std::size_t>(h_)];
    const auto it = lvl.find(node_key(state, belief_idx_));
    if (it == lvl.end()) {
      throw ValidationError("belief agent: current (state, posterior) was never planned for");
    }
    const int a = tbl_->action[static_cast<std::size_t>(h_)][static_cast<std::size_t>(it->second)];
    last_action_ = a;
    if (trace_ != nullptr) {
      const auto& b = tbl_->beliefs[static_cast<std::size_t>(belief_idx_)];
      int support = 0;
      int mode = 0;
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] > 0.0) ++support;
        if (b[i] > b[static_cast<std::size_t>(mode)]) mode = static_cast<int>(i);
      }
      trace({h_, "belief", support, mode, b[static_cast<std::size_t>(mode)], 0.0, false});
    }
    return a;
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t) const override {
    return std::make_unique<BeliefAgent>(tbl_);
  }

  std::string name() const override { return "dr_exact"; }

  PolicyStats stats() const override {
    PolicyStats out;
    const auto& b = tbl_->beliefs[static_cast<std::size_t>(belief_idx_)];
    int mode = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] > 0.0) out.surviving.push_back(static_cast<int>(i));
      if (b[i] > b[static_cast<std::size_t>(mode)]) mode = static_cast<int>(i);
    }
    out.chosen_member = mode;
    out.eliminations = tbl_->lmdp.num_members() - static_cast<int>(out.surviving.size());
    return out;
  }

private:
  int horizon() const { return tbl_->lmdp.horizon(); }

  std::shared_ptr<const BeliefTable> tbl_;
  long h_ = 1;
  int belief_idx_ = 0;
  int state_ = 0;
  int last_action_ = -1;
};

}  // namespace

DrSolution solve_dr_optimal(const LatentMdp& lmdp, const DrSolveLimits& limits) {
  lmdp.validate();
  const int S = lmdp.num_states();
  const int A = lmdp.num_actions();
  const int H = lmdp.horizon();
  const int M = lmdp.num_members();

  auto tbl = std::make_shared<BeliefTable>();
  tbl->lmdp = lmdp;
  tbl->level.resize(static_cast<std::size_t>(H) + 1);
  tbl->action.resize(static_cast<std::size_t>(H) + 1);

  // Node payloads per level, kept only while solving.
  std::vector<std::vector<std::pair<int, int>>> nodes(static_cast<std::size_t>(H) + 1);

  auto add_node = [&](int h, int state, int belief_idx) -> int {
    auto& lvl = tbl->level[static_cast<std::size_t>(h)];
    const std::uint64_t key = node_key(state, belief_idx);
    const auto it = lvl.find(key);
    if (it != lvl.end()) return it->second;
    if (tbl->node_count >= limits.max_nodes) {
      throw LimitError("belief planner: reachable graph exceeds " +
                           std::to_string(limits.max_nodes) + " nodes",
                       tbl->node_count);
    }
    const int id = static_cast<int>(nodes[static_cast<std::size_t>(h)].size());
    nodes[static_cast<std::size_t>(h)].emplace_back(state, belief_idx);
    lvl.emplace(key, id);
    ++tbl->node_count;
    return id;
  };

  const int root_belief = tbl->intern_belief(lmdp.weights);
  add_node(1, lmdp.start_state(), root_belief);

  // Forward reachability, level by level. Children are generated in
  // (action, next state) order from the pooled canonical posterior, so node
  // ids and pool ids are reproducible.
  for (int h = 1; h < H; ++h) {
    const auto& cur = nodes[static_cast<std::size_t>(h)];
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const auto [s, bidx] = cur[idx];
      // Copy: intern_belief below may grow tbl->beliefs and invalidate
      // references into it.
      const std::vector<double> b = tbl->beliefs[static_cast<std::size_t>(bidx)];
      for (int a = 0; a < A; ++a) {
        for (int s2 = 0; s2 < S; ++s2) {
          double marginal = 0.0;
          for (int i = 0; i < M; ++i) {
            marginal += b[static_cast<std::size_t>(i)] *
                        lmdp.mdps[static_cast<std::size_t>(i)].p(s, a, s2);
          }
          if (marginal <= 0.0) continue;
          const BeliefUpdate upd = update_belief(lmdp, b, s, a, s2);
          add_node(h + 1, s2, tbl->intern_belief(upd.posterior));
        }
      }
    }
  }

  // Backward induction over the reachable graph.
  std::vector<double> next_values;  // values at level h+1
  for (int h = H; h >= 1; --h) {
    const auto& cur = nodes[static_cast<std::size_t>(h)];
    std::vector<double> values(cur.size(), 0.0);
    auto& actions = tbl->action[static_cast<std::size_t>(h)];
    actions.assign(cur.size(), 0);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const auto [s, bidx] = cur[idx];
      const auto& b = tbl->beliefs[static_cast<std::size_t>(bidx)];
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = lmdp.mdps.front().r(s, a);
        if (h < H) {
          for (int s2 = 0; s2 < S; ++s2) {
            double marginal = 0.0;
            for (int i = 0; i < M; ++i) {
              marginal += b[static_cast<std::size_t>(i)] *
                          lmdp.mdps[static_cast<std::size_t>(i)].p(s, a, s2);
            }
            if (marginal <= 0.0) continue;
            const BeliefUpdate upd = update_belief(lmdp, b, s, a, s2);
            const int child_belief = tbl->pool.at(quantize(upd.posterior));
            const int child =
                tbl->level[static_cast<std::size_t>(h) + 1].at(node_key(s2, child_belief));
            q += marginal * next_values[static_cast<std::size_t>(child)];
          }
        }
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      values[idx] = best;
      actions[idx] = best_a;
    }
    next_values = std::move(values);
  }

  DrSolution out;
  out.average_value = next_values.front();
  out.node_count = tbl->node_count;
  out.policy = std::make_unique<BeliefAgent>(std::move(tbl));
  out.policy->reset();
  return out;
}

}  // namespace lmdplab
