#pragma once

#include <fstream>
#include <string>

#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/mdp.hpp"
#include "lmdplab/policy.hpp"

namespace lmdplab {

// Shortest round-trip decimal rendering used by every CSV writer.
std::string format_double(double v);

// JSON interchange, format tag "lmdp-lab/mdp-v1": num_states, num_actions,
// horizon, start_state, transitions as an S x A x S nested array, rewards as
// S x A. Loaded models are validated; malformed input raises
// ValidationError naming the offending field.
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);

// Format tag "lmdp-lab/lmdp-v1": member weights plus an array of mdp-v1
// objects.
std::string latent_to_json(const LatentMdp& lmdp);
LatentMdp latent_from_json(const std::string& text);

void save_text_file(const std::string& path, const std::string& text);
std::string load_text_file(const std::string& path);

// Episode log: header step,state,action,reward,latent_index and one row per
// step 1..H.
std::string trajectory_to_csv(const Trajectory& traj);

// Streams policy trace records as JSON Lines.
class JsonlTraceSink final : public TraceSink {
public:
  explicit JsonlTraceSink(const std::string& path);
  void emit(const TraceRecord& rec) override;

private:
  std::ofstream out_;
};

}  // namespace lmdplab
