#include "lmdplab/policy.hpp"

#include <utility>

#include "lmdplab/errors.hpp"
#include "lmdplab/rng.hpp"

namespace lmdplab {
namespace {

class MarkovAgent final : public HistoryPolicy {
public:
  MarkovAgent(std::vector<int> table, int num_states, std::string name)
      : table_(std::move(table)), num_states_(num_states), name_(std::move(name)) {
    if (num_states_ <= 0 || table_.empty() || table_.size() % static_cast<std::size_t>(num_states_) != 0) {
      throw ValidationError("markov agent: policy table size must be a positive multiple of num_states");
    }
    horizon_ = static_cast<int>(table_.size() / static_cast<std::size_t>(num_states_));
  }

  void reset() override { h_ = 1; }

  void observe(int state, std::optional<double> reward) override {
    (void)state;
    if (reward.has_value()) ++h_;
  }

  int act(int state) override {
    if (state < 0 || state >= num_states_) {
      throw ValidationError("markov agent: state out of range");
    }
    const int row = h_ <= horizon_ ? h_ : horizon_;  // clamp if queried past the table
    const int a = table_[static_cast<std::size_t>(row - 1) * num_states_ + state];
    trace({h_, "markov", 0, -1, 0.0, 0.0, false});
    return a;
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t) const override {
    return std::make_unique<MarkovAgent>(table_, num_states_, name_);
  }

  std::string name() const override { return name_; }

private:
  std::vector<int> table_;
  int num_states_ = 0;
  int horizon_ = 0;
  std::string name_;
  long h_ = 1;
};

class StationaryAgent final : public HistoryPolicy {
public:
  StationaryAgent(std::vector<int> table, std::string name)
      : table_(std::move(table)), name_(std::move(name)) {
    if (table_.empty()) throw ValidationError("stationary agent: empty policy table");
  }

  void reset() override { h_ = 1; }

  void observe(int state, std::optional<double> reward) override {
    (void)state;
    if (reward.has_value()) ++h_;
  }

  int act(int state) override {
    if (state < 0 || state >= static_cast<int>(table_.size())) {
      throw ValidationError("stationary agent: state out of range");
    }
    trace({h_, "stationary", 0, -1, 0.0, 0.0, false});
    return table_[static_cast<std::size_t>(state)];
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t) const override {
    return std::make_unique<StationaryAgent>(table_, name_);
  }

  std::string name() const override { return name_; }

private:
  std::vector<int> table_;
  std::string name_;
  long h_ = 1;
};

class UniformRandomPolicy final : public HistoryPolicy {
public:
  UniformRandomPolicy(int num_actions, std::uint64_t seed)
      : num_actions_(num_actions), seed_(seed), rng_(seed) {
    if (num_actions_ <= 0) throw ValidationError("uniform policy: num_actions must be positive");
  }

  void reset() override {
    rng_.seed(seed_);
    h_ = 1;
  }

  void observe(int state, std::optional<double> reward) override {
    (void)state;
    if (reward.has_value()) ++h_;
  }

  int act(int) override {
    trace({h_, "uniform_random", 0, -1, 0.0, 0.0, false});
    return static_cast<int>(next_index(rng_, static_cast<std::uint64_t>(num_actions_)));
  }

  std::unique_ptr<HistoryPolicy> clone(std::uint64_t seed) const override {
    return std::make_unique<UniformRandomPolicy>(num_actions_, seed);
  }

  std::string name() const override { return "uniform_random"; }

private:
  int num_actions_ = 0;
  std::uint64_t seed_ = 0;
  Rng rng_;
  long h_ = 1;
};

}  // namespace

std::unique_ptr<HistoryPolicy> make_markov_agent(std::vector<int> policy_hs, int num_states,
                                                 std::string name) {
  return std::make_unique<MarkovAgent>(std::move(policy_hs), num_states, std::move(name));
}

std::unique_ptr<HistoryPolicy> make_stationary_agent(std::vector<int> policy_s, std::string name) {
  return std::make_unique<StationaryAgent>(std::move(policy_s), std::move(name));
}

std::unique_ptr<HistoryPolicy> make_uniform_random(int num_actions, std::uint64_t seed) {
  return std::make_unique<UniformRandomPolicy>(num_actions, seed);
}

}  // namespace lmdplab
