#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lmdplab {

// One structured run-log record per step, emitted when tracing is enabled.
// Fields that a given policy has no use for are left at their defaults.
struct TraceRecord {
  long step = 0;
  std::string phase;
  int surviving_count = 0;
  int chosen_member = -1;
  double statistic = 0.0;
  double threshold = 0.0;
  bool switched = false;
};

class TraceSink {
public:
  virtual ~TraceSink() = default;
  virtual void emit(const TraceRecord& rec) = 0;
};

// Post-episode counters exposed by stateful policies; plain policies return
// the defaults (no elimination/switching semantics).
struct PolicyStats {
  int eliminations = 0;
  int switches = 0;
  std::vector<int> surviving;  // member indices still alive at episode end
  int chosen_member = -1;      // member whose plan was in effect at the end
  bool fallback = false;       // all candidates rejected; kept the last one
};

// Stateful agent contract. An episode is driven as:
//   reset(); observe(s1, nullopt);
//   loop h=1..H: a=act(s_h); <env step>; observe(s_{h+1}, r_h);
// Instances are single-threaded; concurrency uses clone() with a derived
// seed per worker/episode. reset() restores the exact initial state,
// including reseeding any internal RNG, so a (seed, observation sequence)
// pair fully determines behavior.
class HistoryPolicy {
public:
  virtual ~HistoryPolicy() = default;
  virtual void reset() = 0;
  virtual void observe(int state, std::optional<double> reward) = 0;
  virtual int act(int state) = 0;
  virtual std::unique_ptr<HistoryPolicy> clone(std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
  virtual PolicyStats stats() const { return {}; }

  void set_trace_sink(TraceSink* sink) { trace_ = sink; }

protected:
  void trace(const TraceRecord& rec) {
    if (trace_ != nullptr) trace_->emit(rec);
  }
  TraceSink* trace_ = nullptr;
};

// Deterministic step-dependent policy from a flat H*S action table.
std::unique_ptr<HistoryPolicy> make_markov_agent(std::vector<int> policy_hs, int num_states,
                                                 std::string name = "markov");

// Stationary policy (one action per state).
std::unique_ptr<HistoryPolicy> make_stationary_agent(std::vector<int> policy_s,
                                                     std::string name = "stationary");

// Uniform-random action at every step, driven by the internal seeded RNG.
std::unique_ptr<HistoryPolicy> make_uniform_random(int num_actions, std::uint64_t seed);

}  // namespace lmdplab
