#include "lmdplab/general_optimistic.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/errors.hpp"

namespace lmdplab {
namespace {

// Shared, immutable per-class precomputation. The prediction table stores,
// for every member m and every (state, action, bias-of-member) triple, the
// expected next-step bias under m's kernel.
struct GeneralTable {
  std::shared_ptr<const LatentMdp> lmdp;
  std::vector<AvgSolution> avg;
  double diameter_bound = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> predictions;  // [m][(s*A + a)*M + bias_index]
  int num_members = 0;

  double prediction(int m, int s, int a, int bias_index) const {
    const int A = lmdp->num_actions();
    const std::size_t cols =
        static_cast<std::size_t>(lmdp->num_states()) * A * num_members;
    return predictions[static_cast<std::size_t>(m) * cols +
                       (static_cast<std::size_t>(s) * A + a) * num_members + bias_index];
  }
};

std::shared_ptr<const GeneralTable> build_table(std::shared_ptr<const LatentMdp> lmdp, double c) {
  if (!lmdp) throw ValidationError("general optimistic: null class");
  lmdp->validate();
  if (!(c > 0.0)) throw ValidationError("general optimistic: c must be positive");

  auto tbl = std::make_shared<GeneralTable>();
  tbl->lmdp = std::move(lmdp);
  const int M = tbl->lmdp->num_members();
  const int S = tbl->lmdp->num_states();
  const int A = tbl->lmdp->num_actions();
  tbl->num_members = M;
  tbl->avg.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    AvgSolution sol = relative_value_iteration(tbl->lmdp->mdps[static_cast<std::size_t>(i)]);
    if (is_unbounded(sol.diameter)) {
      throw ValidationError("general optimistic: member " + std::to_string(i) +
                            " is not communicating");
    }
    tbl->diameter_bound = std::max(tbl->diameter_bound, sol.diameter);
    tbl->avg.push_back(std::move(sol));
  }
  const double d2 = tbl->diameter_bound * tbl->diameter_bound;
  tbl->alpha = 4.0 * d2 + 1.0;
  // A finite class is 0-covered by its own members, so the member count
  // bounds the covering number at the planning resolution.
  tbl->beta = c * d2 * std::log(static_cast<double>(tbl->lmdp->horizon()) * M);

  tbl->predictions.resize(static_cast<std::size_t>(M) * S * A * M);
  std::size_t pos = 0;
  for (int m = 0; m < M; ++m) {
    const TabularMdp& kernel = tbl->lmdp->mdps[static_cast<std::size_t>(m)];
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto row = kernel.row(s, a);
        for (int bi = 0; bi < M; ++bi) {
          const auto& bias = tbl->avg[static_cast<std::size_t>(bi)].bias;
          double dot = 0.0;
          for (std::size_t s2 = 0; s2 < row.size(); ++s2) dot += row[s2] * bias[s2];
          tbl->predictions[pos++] = dot;
        }
      }
    }
  }
  return tbl;
}

class GeneralOptimisticAgent final : public HistoryPolicy {
public:
  explicit GeneralOptimisticAgent(std::shared_ptr<const GeneralTable> tbl) : tbl_(std::move(tbl)) {
    GeneralOptimisticAgent::reset();
  }

  void reset() override {
    const int m = tbl_->num_members;
    h_ = 1;
    pair_committed_.assign(static_cast<std::size_t>(m) * m, 0.0);
    pair_staged_.assign(static_cast<std::size_t>(m) * m, 0.0);
    fit_committed_.assign(static_cast<std::size_t>(m), 0.0);
    fit_staged_.assign(static_cast<std::size_t>(m), 0.0);
    in_set_.assign(static_cast<std::size_t>(m), 1);
    switches_ = 0;
    score_ = 0.0;
    pending_ = false;
    switched_ = false;
    current_ = best_in_set();
  }

  void observe(int state, std::optional<double> reward) override {
    if (!reward.has_value()) {
      prev_state_ = state;
      return;
    }
    ++h_;
    if (pending_) {
      stage_record(prev_state_, pending_action_, state);
      score_ = importance_score();
      if (score_ >= 1.0) commit_and_refit();
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
      int in_set = 0;
      for (char v : in_set_) in_set += v != 0;
      trace({h_, "general", in_set, current_, score_, 1.0, switched_});
      switched_ = false;
    }
    return pending_action_;
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t) const override {
    return std::make_unique<GeneralOptimisticAgent>(tbl_);
  }

  std::string name() const override { return "alg4"; }

  PolicyStats stats() const override {
    PolicyStats out;
    out.switches = switches_;
    for (std::size_t i = 0; i < in_set_.size(); ++i) {
      if (in_set_[i] != 0) out.surviving.push_back(static_cast<int>(i));
    }
    out.eliminations = tbl_->num_members - static_cast<int>(out.surviving.size());
    out.chosen_member = current_;
    return out;
  }

private:
  std::size_t pair_index(int m1, int m2) const {
    return static_cast<std::size_t>(m1) * tbl_->num_members + m2;
  }

  int best_in_set() const {
    int best = -1;
    for (std::size_t i = 0; i < in_set_.size(); ++i) {
      if (in_set_[i] == 0) continue;
      if (best < 0 || tbl_->avg[i].gain > tbl_->avg[static_cast<std::size_t>(best)].gain) {
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void stage_record(int s, int a, int next) {
    const int m = tbl_->num_members;
    const int bias_index = current_;
    const double target =
        tbl_->avg[static_cast<std::size_t>(bias_index)].bias[static_cast<std::size_t>(next)];
    scratch_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      scratch_[static_cast<std::size_t>(i)] = tbl_->prediction(i, s, a, bias_index);
      const double resid = scratch_[static_cast<std::size_t>(i)] - target;
      fit_staged_[static_cast<std::size_t>(i)] += resid * resid;
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double diff =
            scratch_[static_cast<std::size_t>(i)] - scratch_[static_cast<std::size_t>(j)];
        pair_staged_[pair_index(i, j)] += diff * diff;
      }
    }
  }

  double importance_score() const {
    const int m = tbl_->num_members;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const std::size_t k = pair_index(i, j);
        best = std::max(best, pair_staged_[k] / (pair_committed_[k] + tbl_->alpha));
      }
    }
    return best;
  }

  void commit_and_refit() {
    const int m = tbl_->num_members;
    for (std::size_t k = 0; k < pair_committed_.size(); ++k) {
      pair_committed_[k] += pair_staged_[k];
      pair_staged_[k] = 0.0;
    }
    int fit = 0;
    for (int i = 0; i < m; ++i) {
      fit_committed_[static_cast<std::size_t>(i)] += fit_staged_[static_cast<std::size_t>(i)];
      fit_staged_[static_cast<std::size_t>(i)] = 0.0;
      if (fit_committed_[static_cast<std::size_t>(i)] < fit_committed_[static_cast<std::size_t>(fit)]) {
        fit = i;
      }
    }
    for (int i = 0; i < m; ++i) {
      const std::size_t k = i < fit ? pair_index(i, fit) : pair_index(fit, i);
      const double dist = i == fit ? 0.0 : pair_committed_[k];
      in_set_[static_cast<std::size_t>(i)] = dist <= tbl_->beta ? 1 : 0;
    }
    current_ = best_in_set();
    ++switches_;
    switched_ = true;
  }

  std::shared_ptr<const GeneralTable> tbl_;
  long h_ = 1;
  std::vector<double> pair_committed_;
  std::vector<double> pair_staged_;
  std::vector<double> fit_committed_;
  std::vector<double> fit_staged_;
  std::vector<double> scratch_;
  std::vector<char> in_set_;
  int current_ = 0;
  int prev_state_ = 0;
  int pending_action_ = 0;
  bool pending_ = false;
  double score_ = 0.0;
  int switches_ = 0;
  bool switched_ = false;
};

}  // namespace

std::unique_ptr<HistoryPolicy> make_general_optimistic(std::shared_ptr<const LatentMdp> lmdp,
                                                       double c) {
  return std::make_unique<GeneralOptimisticAgent>(build_table(std::move(lmdp), c));
}

}  // namespace lmdplab
