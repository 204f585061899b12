#include "lmdplab/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lmdplab/errors.hpp"
#include "lmdplab/rng.hpp"
#include "lmdplab/separation.hpp"

namespace lmdplab {
namespace {

class SeparatedEliminationAgent final : public HistoryPolicy {
public:
  SeparatedEliminationAgent(std::shared_ptr<const SeparatedEliminationConfig> cfg,
                            std::uint64_t seed)
      : cfg_(std::move(cfg)), seed_(seed), rng_(seed) {
    SeparatedEliminationAgent::reset();
  }

  void reset() override {
    rng_.seed(seed_);
    h_ = 1;
    eliminations_ = 0;
    switched_ = false;
    awaiting_sample_ = false;
    const int m = cfg_->lmdp->num_members();
    surviving_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) surviving_[static_cast<std::size_t>(i)] = i;
    start_round();
  }

  void observe(int state, std::optional<double> reward) override {
    if (!reward.has_value()) return;
    ++h_;
    if (stage_two_) return;
    if (awaiting_sample_) {
      awaiting_sample_ = false;
      ++counts_[static_cast<std::size_t>(state)];
      ++collected_;
      advance_rotation();
      if (collected_ >= cfg_->samples_per_round) finish_round();
    }
  }

  int act(int state) override {
    if (stage_two_) {
      emit_trace("exploit", survivor());
      return cfg_->avg[static_cast<std::size_t>(survivor())]
          .policy[static_cast<std::size_t>(state)];
    }
    if (state == probe_state_) {
      awaiting_sample_ = true;
      emit_trace("probe", -1);
      return probe_action_;
    }
    if (window_left_ <= 0) advance_rotation();
    const int guide = surviving_[static_cast<std::size_t>(rotation_)];
    --window_left_;
    emit_trace("travel", -1);
    return cfg_->travel[static_cast<std::size_t>(guide)][static_cast<std::size_t>(probe_state_)]
        .policy[static_cast<std::size_t>(state)];
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t seed) const override {
    return std::make_unique<SeparatedEliminationAgent>(cfg_, seed);
  }

  std::string name() const override { return "alg1"; }

  PolicyStats stats() const override {
    PolicyStats out;
    out.eliminations = eliminations_;
    out.surviving = surviving_;
    out.chosen_member = stage_two_ ? survivor() : -1;
    return out;
  }

private:
  int survivor() const { return surviving_.front(); }

  void emit_trace(const char* phase, int chosen) {
    if (trace_ == nullptr) return;
    trace({h_, phase, static_cast<int>(surviving_.size()), chosen,
           static_cast<double>(collected_), static_cast<double>(cfg_->samples_per_round),
           switched_});
    switched_ = false;
  }

  void advance_rotation() {
    rotation_ = (rotation_ + 1) % static_cast<int>(surviving_.size());
    window_left_ = cfg_->travel_budget;
  }

  void start_round() {
    if (surviving_.size() == 1) {
      stage_two_ = true;
      switched_ = true;
      return;
    }
    stage_two_ = false;
    const std::size_t n = surviving_.size();
    const std::size_t i = static_cast<std::size_t>(next_index(rng_, n));
    std::size_t j = static_cast<std::size_t>(next_index(rng_, n - 1));
    if (j >= i) ++j;
    pair_a_ = surviving_[i];
    pair_b_ = surviving_[j];
    const InformativePair cell =
        most_informative_pair(cfg_->lmdp->mdps[static_cast<std::size_t>(pair_a_)],
                              cfg_->lmdp->mdps[static_cast<std::size_t>(pair_b_)]);
    probe_state_ = cell.state;
    probe_action_ = cell.action;
    counts_.assign(static_cast<std::size_t>(cfg_->lmdp->num_states()), 0);
    collected_ = 0;
    rotation_ = 0;
    window_left_ = cfg_->travel_budget;
    awaiting_sample_ = false;
  }

  void finish_round() {
    const TabularMdp& ma = cfg_->lmdp->mdps[static_cast<std::size_t>(pair_a_)];
    const TabularMdp& mb = cfg_->lmdp->mdps[static_cast<std::size_t>(pair_b_)];
    // A member that assigns zero probability to an observed outcome is
    // ruled out directly; otherwise the empirical log-likelihood ratio
    // decides (the first member loses ties at exactly zero evidence toward
    // the second staying, matching the asymmetric test order).
    bool drop_b = false;
    double log_ratio = 0.0;
    for (std::size_t s2 = 0; s2 < counts_.size(); ++s2) {
      if (counts_[s2] == 0) continue;
      const double pa = ma.p(probe_state_, probe_action_, static_cast<int>(s2));
      const double pb = mb.p(probe_state_, probe_action_, static_cast<int>(s2));
      if (pb == 0.0) {
        drop_b = true;
        break;
      }
      if (pa == 0.0) {
        log_ratio = -std::numeric_limits<double>::infinity();
        continue;
      }
      log_ratio += static_cast<double>(counts_[s2]) * (std::log(pa) - std::log(pb));
    }
    const int eliminated = (drop_b || log_ratio >= 0.0) ? pair_b_ : pair_a_;
    surviving_.erase(std::find(surviving_.begin(), surviving_.end(), eliminated));
    ++eliminations_;
    switched_ = true;
    start_round();
  }

  std::shared_ptr<const SeparatedEliminationConfig> cfg_;
  std::uint64_t seed_ = 0;
  Rng rng_;
  long h_ = 1;

  std::vector<int> surviving_;
  bool stage_two_ = false;
  int pair_a_ = 0;
  int pair_b_ = 0;
  int probe_state_ = 0;
  int probe_action_ = 0;
  std::vector<long> counts_;
  long collected_ = 0;
  int rotation_ = 0;
  long window_left_ = 0;
  bool awaiting_sample_ = false;
  int eliminations_ = 0;
  bool switched_ = false;
};

}  // namespace

SeparatedEliminationConfig make_separated_config(std::shared_ptr<const LatentMdp> lmdp,
                                                 double c0) {
  if (!lmdp) throw ValidationError("separated elimination: null class");
  lmdp->validate();
  if (!(c0 > 0.0)) throw ValidationError("separated elimination: c0 must be positive");

  SeparatedEliminationConfig cfg;
  cfg.lmdp = lmdp;
  cfg.c0 = c0;

  const int m = lmdp->num_members();
  const int s_count = lmdp->num_states();
  cfg.avg.reserve(static_cast<std::size_t>(m));
  cfg.travel.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const TabularMdp& member = lmdp->mdps[static_cast<std::size_t>(i)];
    AvgSolution sol = relative_value_iteration(member);
    if (is_unbounded(sol.diameter)) {
      throw ValidationError("separated elimination: member " + std::to_string(i) +
                            " is not communicating");
    }
    cfg.diameter_bound = std::max(cfg.diameter_bound, sol.diameter);
    cfg.avg.push_back(std::move(sol));
    std::vector<HittingSolution> routes;
    routes.reserve(static_cast<std::size_t>(s_count));
    for (int target = 0; target < s_count; ++target) {
      routes.push_back(min_hitting_times(member, target));
    }
    cfg.travel.push_back(std::move(routes));
  }

  if (m >= 2) {
    cfg.separation = separation_delta(*lmdp);
    if (!(cfg.separation > 0.0)) {
      throw ValidationError("separated elimination: class has zero separation");
    }
    const double smh = std::log(static_cast<double>(s_count) * m * lmdp->horizon());
    const double mh = std::log(static_cast<double>(m) * lmdp->horizon());
    const double raw = c0 * smh * smh * mh / std::pow(cfg.separation, 4.0);
    cfg.samples_per_round = std::max<long>(1, static_cast<long>(std::ceil(raw)));
  } else {
    cfg.separation = std::numeric_limits<double>::infinity();
    cfg.samples_per_round = 0;
  }
  cfg.travel_budget = std::max<long>(1, 2 * static_cast<long>(std::ceil(cfg.diameter_bound)));
  return cfg;
}

std::unique_ptr<HistoryPolicy> make_separated_elimination(
    std::shared_ptr<const SeparatedEliminationConfig> config, std::uint64_t seed) {
  if (!config) throw ValidationError("separated elimination: null config");
  return std::make_unique<SeparatedEliminationAgent>(std::move(config), seed);
}

std::unique_ptr<HistoryPolicy> make_separated_elimination(std::shared_ptr<const LatentMdp> lmdp,
                                                          double c0, std::uint64_t seed) {
  auto cfg = std::make_shared<SeparatedEliminationConfig>(make_separated_config(std::move(lmdp), c0));
  return make_separated_elimination(std::move(cfg), seed);
}

}  // namespace lmdplab
