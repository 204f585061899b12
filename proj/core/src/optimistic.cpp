#include "lmdplab/optimistic.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/errors.hpp"

namespace lmdplab {
namespace {

struct OptimisticTable {
  std::shared_ptr<const LatentMdp> lmdp;
  std::vector<AvgSolution> avg;
  double diameter_bound = 0.0;
};

std::shared_ptr<const OptimisticTable> build_table(std::shared_ptr<const LatentMdp> lmdp) {
  if (!lmdp) throw ValidationError("optimistic elimination: null class");
  lmdp->validate();
  auto tbl = std::make_shared<OptimisticTable>();
  tbl->lmdp = std::move(lmdp);
  const int m = tbl->lmdp->num_members();
  tbl->avg.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    AvgSolution sol = relative_value_iteration(tbl->lmdp->mdps[static_cast<std::size_t>(i)]);
    if (is_unbounded(sol.diameter)) {
      throw ValidationError("optimistic elimination: member " + std::to_string(i) +
                            " is not communicating");
    }
    tbl->diameter_bound = std::max(tbl->diameter_bound, sol.diameter);
    tbl->avg.push_back(std::move(sol));
  }
  return tbl;
}

class OptimisticAgent final : public HistoryPolicy {
public:
  explicit OptimisticAgent(std::shared_ptr<const OptimisticTable> tbl) : tbl_(std::move(tbl)) {
    OptimisticAgent::reset();
  }

  void reset() override {
    h_ = 1;
    alive_.assign(static_cast<std::size_t>(tbl_->lmdp->num_members()), 1);
    eliminations_ = 0;
    switches_ = 0;
    fallback_ = false;
    statistic_ = 0.0;
    window_len_ = 0;
    pending_ = false;
    switched_ = false;
    current_ = best_alive();
  }

  void observe(int state, std::optional<double> reward) override {
    if (!reward.has_value()) {
      prev_state_ = state;
      return;
    }
    ++h_;
    if (pending_ && !fallback_) {
      const AvgSolution& sol = tbl_->avg[static_cast<std::size_t>(current_)];
      const TabularMdp& kernel = tbl_->lmdp->mdps[static_cast<std::size_t>(current_)];
      const auto row = kernel.row(prev_state_, pending_action_);
      double expected = 0.0;
      for (std::size_t s2 = 0; s2 < row.size(); ++s2) expected += row[s2] * sol.bias[s2];
      statistic_ += expected - sol.bias[static_cast<std::size_t>(state)];
      ++window_len_;
      const double threshold = deviation_threshold(tbl_->diameter_bound, window_len_,
                                                   tbl_->lmdp->horizon(),
                                                   tbl_->lmdp->num_members());
      if (std::abs(statistic_) > threshold) {
        if (alive_count() == 1) {
          fallback_ = true;  // nothing left to switch to; keep the last member
        } else {
          alive_[static_cast<std::size_t>(current_)] = 0;
          ++eliminations_;
          current_ = best_alive();
          ++switches_;
          switched_ = true;
        }
        statistic_ = 0.0;
        window_len_ = 0;
      }
    }
    pending_ = false;
    prev_state_ = state;
  }

  int act(int state) override {
    pending_ = true;
    pending_action_ =
        tbl_->avg[static_cast<std::size_t>(current_)].policy[static_cast<std::size_t>(state)];
    prev_state_ = state;
    if (trace_ != nullptr) {
      trace({h_, "optimistic", alive_count(), current_, statistic_,
             deviation_threshold(tbl_->diameter_bound, window_len_, tbl_->lmdp->horizon(),
                                 tbl_->lmdp->num_members()),
             switched_});
      switched_ = false;
    }
    return pending_action_;
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t) const override {
    return std::make_unique<OptimisticAgent>(tbl_);
  }

  std::string name() const override { return "alg3"; }

  PolicyStats stats() const override {
    PolicyStats out;
    out.eliminations = eliminations_;
    out.switches = switches_;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (alive_[i] != 0) out.surviving.push_back(static_cast<int>(i));
    }
    out.chosen_member = current_;
    out.fallback = fallback_;
    return out;
  }

private:
  int alive_count() const {
    int n = 0;
    for (char a : alive_) n += a != 0;
    return n;
  }

  // Highest gain among surviving members, lowest index on ties.
  int best_alive() const {
    int best = -1;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (alive_[i] == 0) continue;
      if (best < 0 || tbl_->avg[i].gain > tbl_->avg[static_cast<std::size_t>(best)].gain) {
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  std::shared_ptr<const OptimisticTable> tbl_;
  long h_ = 1;
  std::vector<char> alive_;
  int current_ = 0;
  int prev_state_ = 0;
  int pending_action_ = 0;
  bool pending_ = false;
  double statistic_ = 0.0;
  long window_len_ = 0;
  int eliminations_ = 0;
  int switches_ = 0;
  bool fallback_ = false;
  bool switched_ = false;
};

}  // namespace

double deviation_statistic(const TabularMdp& mdp, const std::vector<double>& bias,
                           const std::vector<std::array<int, 3>>& window) {
  if (static_cast<int>(bias.size()) != mdp.num_states) {
    throw ValidationError("deviation statistic: bias size != num_states");
  }
  double sum = 0.0;
  for (const auto& rec : window) {
    const auto row = mdp.row(rec[0], rec[1]);
    double expected = 0.0;
    for (std::size_t s2 = 0; s2 < row.size(); ++s2) expected += row[s2] * bias[s2];
    sum += expected - bias[static_cast<std::size_t>(rec[2])];
  }
  return sum;
}

double deviation_threshold(double diameter, long window_len, int horizon, int num_members) {
  return diameter * std::sqrt(2.0 * static_cast<double>(window_len) *
                              std::log(2.0 * horizon * num_members));
}

std::unique_ptr<HistoryPolicy> make_optimistic_elimination(std::shared_ptr<const LatentMdp> lmdp) {
  return std::make_unique<OptimisticAgent>(build_table(std::move(lmdp)));
}

}  // namespace lmdplab
