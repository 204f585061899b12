#include "lmdplab/io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "lmdplab/errors.hpp"

namespace lmdplab {

using nlohmann::json;

namespace {

constexpr const char* kMdpFormat = "lmdp-lab/mdp-v1";
constexpr const char* kLatentFormat = "lmdp-lab/lmdp-v1";

json parse_or_throw(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("json: malformed document");
  return j;
}

template <typename T>
T field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string("json: missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("json: field '") + name + "' has the wrong type");
  }
}

json mdp_to_json_value(const TabularMdp& mdp) {
  json transitions = json::array();
  for (int s = 0; s < mdp.num_states; ++s) {
    json per_action = json::array();
    for (int a = 0; a < mdp.num_actions; ++a) {
      const auto row = mdp.row(s, a);
      per_action.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    transitions.push_back(std::move(per_action));
  }
  json rewards = json::array();
  for (int s = 0; s < mdp.num_states; ++s) {
    std::vector<double> per_action(static_cast<std::size_t>(mdp.num_actions));
    for (int a = 0; a < mdp.num_actions; ++a) per_action[static_cast<std::size_t>(a)] = mdp.r(s, a);
    rewards.push_back(json(per_action));
  }
  return json{{"format", kMdpFormat},
              {"num_states", mdp.num_states},
              {"num_actions", mdp.num_actions},
              {"horizon", mdp.horizon},
              {"start_state", mdp.start_state},
              {"transitions", std::move(transitions)},
              {"rewards", std::move(rewards)}};
}

TabularMdp mdp_from_json_value(const json& j) {
  if (field<std::string>(j, "format") != kMdpFormat) {
    throw ValidationError(std::string("json: expected format '") + kMdpFormat + "'");
  }
  TabularMdp mdp;
  mdp.num_states = field<int>(j, "num_states");
  mdp.num_actions = field<int>(j, "num_actions");
  mdp.horizon = field<int>(j, "horizon");
  mdp.start_state = field<int>(j, "start_state");
  if (mdp.num_states <= 0 || mdp.num_actions <= 0 || mdp.horizon <= 0) {
    throw ValidationError("json: num_states, num_actions and horizon must be positive");
  }
  const auto transitions = field<std::vector<std::vector<std::vector<double>>>>(j, "transitions");
  const auto rewards = field<std::vector<std::vector<double>>>(j, "rewards");
  const std::size_t S = static_cast<std::size_t>(mdp.num_states);
  const std::size_t A = static_cast<std::size_t>(mdp.num_actions);
  if (transitions.size() != S) throw ValidationError("json: transitions outer size != num_states");
  if (rewards.size() != S) throw ValidationError("json: rewards outer size != num_states");
  mdp.transitions.resize(S * A * S);
  mdp.rewards.resize(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    if (transitions[s].size() != A) {
      throw ValidationError("json: transitions[" + std::to_string(s) + "] size != num_actions");
    }
    if (rewards[s].size() != A) {
      throw ValidationError("json: rewards[" + std::to_string(s) + "] size != num_actions");
    }
    for (std::size_t a = 0; a < A; ++a) {
      if (transitions[s][a].size() != S) {
        throw ValidationError("json: transitions[" + std::to_string(s) + "][" +
                              std::to_string(a) + "] size != num_states");
      }
      for (std::size_t s2 = 0; s2 < S; ++s2) {
        mdp.transitions[(s * A + a) * S + s2] = transitions[s][a][s2];
      }
      mdp.rewards[s * A + a] = rewards[s][a];
    }
  }
  validate(mdp);
  return mdp;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string mdp_to_json(const TabularMdp& mdp) {
  validate(mdp);
  return mdp_to_json_value(mdp).dump(1);
}

TabularMdp mdp_from_json(const std::string& text) {
  return mdp_from_json_value(parse_or_throw(text));
}

std::string latent_to_json(const LatentMdp& lmdp) {
  lmdp.validate();
  json mdps = json::array();
  for (const TabularMdp& m : lmdp.mdps) mdps.push_back(mdp_to_json_value(m));
  const json j{{"format", kLatentFormat}, {"weights", lmdp.weights}, {"mdps", std::move(mdps)}};
  return j.dump(1);
}

LatentMdp latent_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  if (field<std::string>(j, "format") != kLatentFormat) {
    throw ValidationError(std::string("json: expected format '") + kLatentFormat + "'");
  }
  LatentMdp out;
  out.weights = field<std::vector<double>>(j, "weights");
  const auto it = j.find("mdps");
  if (it == j.end() || !it->is_array()) throw ValidationError("json: missing array field 'mdps'");
  for (const json& jm : *it) out.mdps.push_back(mdp_from_json_value(jm));
  out.validate();
  return out;
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("io: cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ValidationError("io: failed writing '" + path + "'");
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io: cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "step,state,action,reward,latent_index\n";
  for (std::size_t h = 0; h < traj.actions.size(); ++h) {
    out += std::to_string(h + 1);
    out += ',';
    out += std::to_string(traj.states[h]);
    out += ',';
    out += std::to_string(traj.actions[h]);
    out += ',';
    out += format_double(traj.rewards[h]);
    out += ',';
    out += std::to_string(traj.latent_index);
    out += '\n';
  }
  return out;
}

JsonlTraceSink::JsonlTraceSink(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw ValidationError("trace: cannot open '" + path + "' for writing");
}

void JsonlTraceSink::emit(const TraceRecord& rec) {
  const json j{{"step", rec.step},
               {"phase", rec.phase},
               {"surviving_count", rec.surviving_count},
               {"chosen_member", rec.chosen_member},
               {"statistic", rec.statistic},
               {"threshold", rec.threshold},
               {"switched", rec.switched}};
  out_ << j.dump() << '\n';
}

}  // namespace lmdplab
