// lmdp-lab: command-line front end for the latent-MDP laboratory.
//
// Subcommands:
//   gen      build a benchmark instance and write it as JSON
//   solve    finite-horizon and average-reward optima of one MDP
//   run      run one experiment config and print per-cell results
//   sweep    run an experiment grid and write the results CSV
//   analyze  structural diagnostics of a latent class
//   report   aggregate result CSVs into slope/flatness summaries
//
// Exit codes: 0 success, 2 invalid input or config, 3 threshold failure
// under `report --enforce`.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmdplab/average_reward.hpp"
#include "lmdplab/belief_planner.hpp"
#include "lmdplab/elimination.hpp"
#include "lmdplab/errors.hpp"
#include "lmdplab/function_class.hpp"
#include "lmdplab/general_optimistic.hpp"
#include "lmdplab/instances.hpp"
#include "lmdplab/io.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/optimistic.hpp"
#include "lmdplab/planning.hpp"
#include "lmdplab/policy.hpp"
#include "lmdplab/rng.hpp"
#include "lmdplab/separation.hpp"
#include "lmdplab/sweep.hpp"

namespace {

using nlohmann::json;
using namespace lmdplab;

// ---------------------------------------------------------------------------
// Minimal TOML subset: comments, [section] headers one level deep, and
// key = value lines where value is a string, bool, number, or flat array.
// Enough for experiment configs; anything else is rejected with a line
// number so the config can be fixed.
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void toml_fail(int line_no, const std::string& msg) {
  throw ValidationError("config line " + std::to_string(line_no) + ": " + msg);
}

json parse_toml_scalar(const std::string& raw, int line_no) {
  if (raw.empty()) toml_fail(line_no, "empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') toml_fail(line_no, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\') {
        if (i + 2 >= raw.size()) toml_fail(line_no, "dangling escape in string");
        char c = raw[++i];
        if (c == '"' || c == '\\') out.push_back(c);
        else toml_fail(line_no, std::string("unsupported escape \\") + c);
      } else {
        out.push_back(raw[i]);
      }
    }
    return json(out);
  }
  if (raw == "true") return json(true);
  if (raw == "false") return json(false);
  bool integral = true;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (i == 0 && (c == '+' || c == '-')) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) integral = false;
  }
  try {
    std::size_t used = 0;
    if (integral) {
      long long v = std::stoll(raw, &used);
      if (used == raw.size()) return json(v);
    } else {
      double v = std::stod(raw, &used);
      if (used == raw.size()) return json(v);
    }
  } catch (const std::exception&) {
    // fall through to the failure below
  }
  toml_fail(line_no, "cannot parse value '" + raw + "'");
}

json parse_toml_value(const std::string& raw, int line_no) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') toml_fail(line_no, "unterminated array");
    json arr = json::array();
    std::string body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) return arr;
    std::size_t start = 0;
    bool in_string = false;
    for (std::size_t i = 0; i <= body.size(); ++i) {
      if (i < body.size() && body[i] == '"' && (i == 0 || body[i - 1] != '\\')) {
        in_string = !in_string;
      }
      if (i == body.size() || (body[i] == ',' && !in_string)) {
        std::string item = trim(body.substr(start, i - start));
        if (item.empty()) toml_fail(line_no, "empty array element");
        arr.push_back(parse_toml_scalar(item, line_no));
        start = i + 1;
      }
    }
    return arr;
  }
  return parse_toml_scalar(raw, line_no);
}

// Truncates a raw line at the first comment '#' that is outside a string.
std::string strip_toml_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

json parse_toml_subset(const std::string& text) {
  json root = json::object();
  json* current = &root;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_toml_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') toml_fail(line_no, "unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) toml_fail(line_no, "empty section name");
      if (name.find('.') != std::string::npos) {
        toml_fail(line_no, "nested sections are not supported");
      }
      root[name] = json::object();
      current = &root[name];
      continue;
    }
    std::size_t eq = std::string::npos;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
      if (line[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) toml_fail(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) toml_fail(line_no, "empty key");
    for (char c : key) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
        toml_fail(line_no, "key '" + key + "' has unsupported characters");
      }
    }
    (*current)[key] = parse_toml_value(value, line_no);
  }
  return root;
}

// ---------------------------------------------------------------------------
// JSON -> config structs, with strict key checking so typos fail loudly.
// ---------------------------------------------------------------------------

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError("config: '" + key + "' must be a number");
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ValidationError("config: '" + key + "' must be an integer");
  return v.get<long long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ValidationError("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

InstanceSpec instance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: 'instance' must be a table");
  InstanceSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "family") spec.family = as_string(value, key);
    else if (key == "members") spec.num_members = static_cast<int>(as_integer(value, key));
    else if (key == "states") spec.num_states = static_cast<int>(as_integer(value, key));
    else if (key == "actions") spec.num_actions = static_cast<int>(as_integer(value, key));
    else if (key == "horizon") spec.horizon = static_cast<int>(as_integer(value, key));
    else if (key == "delta") spec.delta = as_double(value, key);
    else if (key == "eps") spec.eps = as_double(value, key);
    else if (key == "delta_target") spec.delta_target = as_double(value, key);
    else if (key == "diameter_target") spec.diameter_target = as_double(value, key);
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(as_integer(value, key));
    else throw ValidationError("config: unknown instance key '" + key + "'");
  }
  return spec;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a table");
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "instance") cfg.instance = instance_from_json(value);
    else if (key == "instance_path") cfg.instance_path = as_string(value, key);
    else if (key == "policy") cfg.policy = as_string(value, key);
    else if (key == "c0") cfg.c0 = as_double(value, key);
    else if (key == "c") cfg.c = as_double(value, key);
    else if (key == "horizons") {
      if (!value.is_array()) throw ValidationError("config: 'horizons' must be an array");
      cfg.horizons.clear();
      for (const auto& h : value) cfg.horizons.push_back(static_cast<int>(as_integer(h, key)));
    } else if (key == "seeds") cfg.num_seeds = static_cast<int>(as_integer(value, key));
    else if (key == "episodes") cfg.episodes = static_cast<long>(as_integer(value, key));
    else if (key == "master_seed") {
      long long v = as_integer(value, key);
      if (v < 0) throw ValidationError("config: 'master_seed' must be non-negative");
      cfg.master_seed = static_cast<std::uint64_t>(v);
    } else if (key == "mstar") cfg.mstar = static_cast<int>(as_integer(value, key));
    else if (key == "max_nodes") {
      long long v = as_integer(value, key);
      if (v < 1) throw ValidationError("config: 'max_nodes' must be positive");
      cfg.max_nodes = static_cast<std::size_t>(v);
    } else if (key == "out") cfg.output_path = as_string(value, key);
    else if (key == "trace") cfg.trace_path = as_string(value, key);
    else throw ValidationError("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text = load_text_file(path);
  json j;
  bool toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (toml) {
    j = parse_toml_subset(text);
  } else {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError("config " + path + ": " + e.what());
    }
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Shared model loading
// ---------------------------------------------------------------------------

struct LoadedModel {
  std::optional<LatentMdp> latent;  // set when the file held a class
  TabularMdp mdp;                   // requested member (or the single model)
  int member = -1;                  // -1 when the file held a plain MDP
};

LoadedModel load_model(const std::string& path, int member) {
  std::string text = load_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  std::string format = j.value("format", "");
  LoadedModel out;
  if (format == "lmdp-lab/mdp-v1") {
    out.mdp = mdp_from_json(text);
  } else if (format == "lmdp-lab/lmdp-v1") {
    LatentMdp lmdp = latent_from_json(text);
    if (member < 0 || member >= lmdp.num_members()) {
      throw ValidationError(path + ": member " + std::to_string(member) + " out of range [0, " +
                            std::to_string(lmdp.num_members()) + ")");
    }
    out.mdp = lmdp.mdps[static_cast<std::size_t>(member)];
    out.member = member;
    out.latent = std::move(lmdp);
  } else {
    throw ValidationError(path + ": unrecognized format tag '" + format + "'");
  }
  return out;
}

LatentMdp load_latent(const std::string& path) {
  std::string text = load_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  std::string format = j.value("format", "");
  if (format == "lmdp-lab/lmdp-v1") return latent_from_json(text);
  if (format == "lmdp-lab/mdp-v1") {
    return make_uniform_latent({mdp_from_json(text)});
  }
  throw ValidationError(path + ": unrecognized format tag '" + format + "'");
}

void emit_json(const json& j, const std::string& out_path) {
  std::string text = j.dump(1) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    save_text_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  InstanceSpec spec;
  std::string out_path;
  std::string format = "lmdp";
};

int cmd_gen(GenArgs& args) {
  // The generic --delta flag doubles as the separation target of the random
  // family, which keeps the common flags uniform across families.
  if (args.spec.family == "random_comm" && args.spec.delta_target == 0.0) {
    args.spec.delta_target = args.spec.delta;
  }
  LatentMdp lmdp = build_instance(args.spec);
  if (args.format == "mdp") {
    if (lmdp.num_members() != 1) {
      throw ValidationError("gen: --format mdp needs a single-member family, got " +
                            std::to_string(lmdp.num_members()) + " members");
    }
    save_text_file(args.out_path, mdp_to_json(lmdp.mdps[0]));
  } else {
    save_text_file(args.out_path, latent_to_json(lmdp));
  }
  std::cout << "wrote " << args.out_path << " family=" << args.spec.family
            << " M=" << lmdp.num_members() << " S=" << lmdp.num_states()
            << " A=" << lmdp.num_actions() << " H=" << lmdp.horizon() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string path;
  bool finite = false;
  bool avg = false;
  int member = 0;
  std::string out_path;
};

int cmd_solve(const SolveArgs& args) {
  bool do_finite = args.finite || !args.avg;
  bool do_avg = args.avg || !args.finite;
  LoadedModel model = load_model(args.path, args.member);
  json out;
  out["source"] = args.path;
  if (model.member >= 0) out["member"] = model.member;
  if (do_finite) {
    PlanSolution plan = backward_induction(model.mdp);
    out["finite"] = {{"horizon", model.mdp.horizon},
                     {"start_value", plan.v1()},
                     {"first_action", plan.action(1, model.mdp.start_state)}};
  }
  if (do_avg) {
    double diam = diameter(model.mdp);
    if (is_unbounded(diam)) {
      out["average"] = {{"communicating", false}};
    } else {
      AvgSolution sol = relative_value_iteration(model.mdp);
      out["average"] = {{"communicating", true}, {"gain", sol.gain},
                        {"diameter", sol.diameter}, {"bias", sol.bias},
                        {"policy", sol.policy},    {"residual", sol.residual},
                        {"iterations", sol.iterations}};
    }
  }
  emit_json(out, args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string path;
  double eps = 0.0;    // 0 = default 1/H
  double alpha = 0.0;  // 0 = default 1/H
  std::string out_path;
};

int cmd_analyze(const AnalyzeArgs& args) {
  LatentMdp lmdp = load_latent(args.path);
  json out;
  out["source"] = args.path;
  out["members"] = lmdp.num_members();
  out["states"] = lmdp.num_states();
  out["actions"] = lmdp.num_actions();
  out["horizon"] = lmdp.horizon();
  out["weights"] = lmdp.weights;
  if (lmdp.num_members() >= 2) {
    out["separation"] = separation_delta(lmdp);
  } else {
    out["separation"] = nullptr;
  }
  bool all_communicating = true;
  json members = json::array();
  for (int m = 0; m < lmdp.num_members(); ++m) {
    const TabularMdp& mdp = lmdp.mdps[static_cast<std::size_t>(m)];
    double diam = diameter(mdp);
    json row;
    row["member"] = m;
    if (is_unbounded(diam)) {
      row["communicating"] = false;
      all_communicating = false;
    } else {
      AvgSolution sol = relative_value_iteration(mdp);
      row["communicating"] = true;
      row["diameter"] = sol.diameter;
      row["gain"] = sol.gain;
    }
    members.push_back(row);
  }
  out["per_member"] = members;
  if (all_communicating) {
    double eps = args.eps > 0 ? args.eps : 1.0 / lmdp.horizon();
    double alpha = args.alpha > 0 ? args.alpha : 1.0 / lmdp.horizon();
    FunctionClassF f = build_function_class(lmdp);
    json fc;
    fc["domain"] = f.domain;
    fc["value_bound"] = f.value_bound;
    fc["eps"] = eps;
    fc["alpha"] = alpha;
    fc["eluder_greedy"] = eluder_dimension_greedy(f, eps);
    if (f.domain <= 12) fc["eluder_exhaustive"] = eluder_dimension_exhaustive(f, eps);
    fc["covering_number"] = covering_number_greedy(f, alpha);
    out["function_class"] = fc;
  }
  emit_json(out, args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// run / sweep
// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config_path;
  std::string out_override;
  std::string trace_override;
  std::string trajectory_path;
};

std::unique_ptr<HistoryPolicy> make_policy_for_config(
    const std::shared_ptr<const LatentMdp>& shared, const ExperimentConfig& cfg,
    std::uint64_t seed) {
  if (cfg.policy == "alg1") return make_separated_elimination(shared, cfg.c0, seed);
  if (cfg.policy == "alg3") return make_optimistic_elimination(shared);
  if (cfg.policy == "alg4") return make_general_optimistic(shared, cfg.c);
  if (cfg.policy == "dr_exact") return solve_dr_optimal(*shared, {cfg.max_nodes}).policy;
  if (cfg.policy == "uniform_random") return make_uniform_random(shared->num_actions(), seed);
  if (cfg.policy == "markov_opt") {
    int member = cfg.mstar >= 0 ? cfg.mstar : 0;
    const TabularMdp& env = shared->mdps[static_cast<std::size_t>(member)];
    PlanSolution plan = backward_induction(env);
    return make_markov_agent(plan.policy, env.num_states, "markov_opt");
  }
  throw ValidationError("unknown policy tag '" + cfg.policy + "'");
}

void dump_demo_trajectory(const ExperimentConfig& cfg, const std::string& path) {
  LatentMdp lmdp;
  if (!cfg.instance_path.empty()) {
    lmdp = load_latent(cfg.instance_path);
  } else {
    InstanceSpec spec = cfg.instance;
    spec.horizon = cfg.horizons.front();
    lmdp = build_instance(spec);
  }
  auto shared = std::make_shared<const LatentMdp>(std::move(lmdp));
  std::uint64_t policy_seed = derive_seed(cfg.master_seed, 0xEC0, 0);
  std::uint64_t env_seed = derive_seed(cfg.master_seed, 0xEC0, 1);
  auto policy = make_policy_for_config(shared, cfg, policy_seed);
  int member = cfg.mstar >= 0 ? cfg.mstar : 0;
  if (member >= shared->num_members()) {
    throw ValidationError("trajectory: member index out of range");
  }
  Trajectory traj =
      rollout_real(shared->mdps[static_cast<std::size_t>(member)], *policy, env_seed, member);
  save_text_file(path, trajectory_to_csv(traj));
  std::cout << "wrote " << path << " (member " << member << ", return "
            << format_double(traj.total_reward()) << ")\n";
}

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg = load_config(args.config_path);
  if (!args.out_override.empty()) cfg.output_path = args.out_override;
  if (!args.trace_override.empty()) cfg.trace_path = args.trace_override;
  SweepResult result = run_sweep(cfg);
  for (const SweepRow& row : result.rows) {
    std::cout << "family=" << row.family << " policy=" << row.policy << " H=" << row.horizon
              << " seed=" << row.seed_index << " gap=" << format_double(row.gap_mean)
              << " ci=" << format_double(row.ci_halfwidth)
              << " vstar=" << format_double(row.vstar)
              << " elim=" << format_double(row.eliminations)
              << " switches=" << format_double(row.switches)
              << " survived=" << format_double(row.mstar_survived) << "\n";
  }
  if (!cfg.output_path.empty()) std::cout << "wrote " << cfg.output_path << "\n";
  if (!cfg.trace_path.empty()) std::cout << "trace " << cfg.trace_path << "\n";
  if (!args.trajectory_path.empty()) dump_demo_trajectory(cfg, args.trajectory_path);
  return 0;
}

struct SweepArgs {
  std::string config_path;
  std::string out_override;
};

int cmd_sweep(const SweepArgs& args) {
  ExperimentConfig cfg = load_config(args.config_path);
  if (!args.out_override.empty()) cfg.output_path = args.out_override;
  if (cfg.output_path.empty()) {
    throw ValidationError("sweep: needs an output path (config key 'out' or --out)");
  }
  SweepResult result = run_sweep(cfg);
  std::cout << "rows=" << result.rows.size() << " wrote " << cfg.output_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out_path;
  std::string plot_csv_path;
  bool enforce = false;
  double slope_max = 0.7;
  double flatness_max = 1.5;
  std::vector<std::string> flatness_policies;  // gate these on flatness instead of slope
};

struct ResultRow {
  std::string policy;
  int horizon = 0;
  double gap_mean = 0.0;
  double ci = 0.0;
  double mstar_survived = 0.0;
};

constexpr const char* kCsvHeader =
    "schema,family,M,S,A,D,delta,H,policy,seed,gap_mean,ci,vstar,eliminations,switches,"
    "mstar_survived,gap_mean_avg,mstar";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<ResultRow> parse_result_csv(const std::string& path) {
  std::string text = load_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("report: " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw ValidationError("report: " + path + " has an unrecognized header");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 18) {
      throw ValidationError("report: " + path + " line " + std::to_string(line_no) +
                            ": expected 18 fields, got " + std::to_string(f.size()));
    }
    if (f[0] != "v1") {
      throw ValidationError("report: " + path + " line " + std::to_string(line_no) +
                            ": unknown schema '" + f[0] + "'");
    }
    ResultRow row;
    row.policy = f[8];
    try {
      row.horizon = std::stoi(f[7]);
      row.gap_mean = std::stod(f[10]);
      row.ci = std::stod(f[11]);
      row.mstar_survived = std::stod(f[15]);
    } catch (const std::exception&) {
      throw ValidationError("report: " + path + " line " + std::to_string(line_no) +
                            ": malformed numeric field");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError("report: " + path + " has no data rows");
  return rows;
}

int cmd_report(const ReportArgs& args) {
  std::vector<ResultRow> rows;
  for (const std::string& path : args.inputs) {
    std::vector<ResultRow> part = parse_result_csv(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }

  // (policy, H) -> all row gaps, then per-policy slope and flatness.
  std::map<std::string, std::map<int, std::vector<double>>> by_policy;
  std::map<std::string, std::vector<double>> survival;
  for (const ResultRow& row : rows) {
    by_policy[row.policy][row.horizon].push_back(row.gap_mean);
    survival[row.policy].push_back(row.mstar_survived);
  }

  json policies = json::array();
  json plot = json::array();
  bool all_pass = true;
  for (const auto& [policy, cells] : by_policy) {
    std::vector<double> horizons;
    std::vector<double> means;
    for (const auto& [h, gaps] : cells) {
      double sum = 0.0, sum_sq = 0.0;
      for (double g : gaps) {
        sum += g;
        sum_sq += g * g;
      }
      double n = static_cast<double>(gaps.size());
      double mean = sum / n;
      double var = std::max(0.0, sum_sq / n - mean * mean);
      double se = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
      horizons.push_back(static_cast<double>(h));
      means.push_back(mean);
      plot.push_back({{"policy", policy}, {"H", h}, {"gap_mean", mean},
                      {"gap_se", se},     {"rows", gaps.size()}});
    }

    json entry;
    entry["policy"] = policy;
    entry["points"] = horizons.size();
    double surv_sum = 0.0;
    for (double s : survival[policy]) surv_sum += s;
    entry["mstar_survived"] = surv_sum / static_cast<double>(survival[policy].size());

    // A policy listed via --flatness-policy is judged by its tail ratio
    // gap(H_max)/gap(H_max/8); everyone else is judged by the fitted
    // log-log slope. Both numbers are always reported when computable.
    bool gate_on_flatness =
        std::find(args.flatness_policies.begin(), args.flatness_policies.end(), policy) !=
        args.flatness_policies.end();

    bool slope_ok = true;
    bool all_positive = std::all_of(means.begin(), means.end(), [](double g) { return g > 0.0; });
    if (horizons.size() >= 2 && all_positive) {
      SlopeFit fit = fit_loglog_slope(horizons, means);
      entry["slope"] = fit.slope;
      entry["slope_stderr"] = fit.stderr_slope;
      slope_ok = gate_on_flatness || fit.slope <= args.slope_max;
    } else {
      entry["slope"] = nullptr;  // flat-at-zero or single-point grids have no slope
    }

    bool flat_ok = true;
    if (!horizons.empty()) {
      int h_max = static_cast<int>(horizons.back());
      auto it = cells.find(h_max / 8);
      if (h_max % 8 == 0 && it != cells.end()) {
        double lo = means[static_cast<std::size_t>(std::distance(cells.begin(), it))];
        double hi = means.back();
        if (lo > 0.0 && hi > 0.0) {
          double ratio = hi / lo;
          entry["flatness_ratio"] = ratio;
          flat_ok = !gate_on_flatness || ratio <= args.flatness_max;
        } else {
          entry["flatness_ratio"] = nullptr;
        }
      } else {
        entry["flatness_ratio"] = nullptr;
      }
    }

    bool pass = slope_ok && flat_ok;
    entry["pass"] = pass;
    all_pass = all_pass && pass;
    policies.push_back(entry);
  }

  json summary;
  summary["schema"] = "lmdp-lab/report-v1";
  summary["row_count"] = rows.size();
  summary["slope_max"] = args.slope_max;
  summary["flatness_max"] = args.flatness_max;
  summary["policies"] = policies;
  summary["pass"] = all_pass;

  save_text_file(args.out_path, summary.dump(1) + "\n");
  std::cout << summary.dump(1) << "\n";
  std::cout << "wrote " << args.out_path << "\n";

  if (!args.plot_csv_path.empty()) {
    std::ostringstream csv;
    csv << "policy,H,gap_mean,gap_se,rows\n";
    for (const auto& cell : plot) {
      csv << cell["policy"].get<std::string>() << "," << cell["H"].get<int>() << ","
          << format_double(cell["gap_mean"].get<double>()) << ","
          << format_double(cell["gap_se"].get<double>()) << "," << cell["rows"].get<std::size_t>()
          << "\n";
    }
    save_text_file(args.plot_csv_path, csv.str());
    std::cout << "wrote " << args.plot_csv_path << "\n";
  }

  if (args.enforce && !all_pass) {
    std::cerr << "report: thresholds not met (slope_max=" << args.slope_max
              << ", flatness_max=" << args.flatness_max << ")\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmdp-lab: tabular latent-MDP laboratory"};
  app.require_subcommand(1);
  app.footer("Environment: LMDP_LAB_WORKERS overrides the sweep worker count.");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a benchmark instance as JSON");
  gen->add_option("--family", gen_args.spec.family,
                  "prop1 | two_state | jao_tree | prop5_bandit | random_comm")
      ->required();
  gen->add_option("--m", gen_args.spec.num_members, "number of class members");
  gen->add_option("--s", gen_args.spec.num_states, "number of states (family-specific)");
  gen->add_option("--a", gen_args.spec.num_actions, "number of actions");
  gen->add_option("--horizon", gen_args.spec.horizon, "episode length");
  gen->add_option("--delta", gen_args.spec.delta,
                  "base rate; doubles as the separation target for random_comm");
  gen->add_option("--eps", gen_args.spec.eps, "advantage of the distinguished action");
  gen->add_option("--delta-target", gen_args.spec.delta_target,
                  "explicit pairwise separation target (random_comm)");
  gen->add_option("--diameter-target", gen_args.spec.diameter_target,
                  "reject instances whose diameter exceeds this bound");
  gen->add_option("--seed", gen_args.spec.seed, "generator kernel seed");
  gen->add_option("--out", gen_args.out_path, "output JSON path")->required();
  gen->add_option("--format", gen_args.format, "lmdp (default) or mdp (single member only)")
      ->check(CLI::IsMember({"lmdp", "mdp"}));

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one MDP exactly");
  solve->add_option("path", solve_args.path, "mdp-v1 or lmdp-v1 JSON file")->required();
  solve->add_flag("--finite", solve_args.finite, "finite-horizon optimum only");
  solve->add_flag("--avg", solve_args.avg, "average-reward optimum only");
  solve->add_option("--member", solve_args.member, "member index for lmdp-v1 input");
  solve->add_option("--out", solve_args.out_path, "write the JSON here instead of stdout");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "Structural diagnostics of a latent class");
  analyze->add_option("path", analyze_args.path, "lmdp-v1 JSON file")->required();
  analyze->add_option("--eps", analyze_args.eps, "independence scale (default 1/H)");
  analyze->add_option("--alpha", analyze_args.alpha, "covering radius (default 1/H)");
  analyze->add_option("--out", analyze_args.out_path, "write the JSON here instead of stdout");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one experiment config and print rows");
  run->add_option("--config", run_args.config_path, "JSON or TOML experiment config")->required();
  run->add_option("--out", run_args.out_override, "override the CSV output path");
  run->add_option("--trace", run_args.trace_override, "override the JSONL trace path");
  run->add_option("--trajectory", run_args.trajectory_path,
                  "also dump one demo episode as trajectory CSV");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment grid and write the CSV");
  sweep->add_option("--config", sweep_args.config_path, "JSON or TOML experiment config")
      ->required();
  sweep->add_option("--out", sweep_args.out_override, "override the CSV output path");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Aggregate result CSVs into a summary");
  report->add_option("inputs", report_args.inputs, "result CSV files")->required();
  report->add_option("--out", report_args.out_path, "summary JSON path")->required();
  report->add_option("--csv", report_args.plot_csv_path, "plot-ready aggregated CSV path");
  report->add_flag("--enforce", report_args.enforce, "exit 3 when thresholds are not met");
  report->add_option("--slope-max", report_args.slope_max, "largest acceptable log-log slope");
  report->add_option("--flatness-max", report_args.flatness_max,
                     "largest acceptable gap(H_max)/gap(H_max/8) ratio");
  report->add_option("--flatness-policy", report_args.flatness_policies,
                     "judge this policy by the flatness ratio instead of the slope");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnboundedSpanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
