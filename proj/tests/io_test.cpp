#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmdplab/errors.hpp"
#include "lmdplab/instances.hpp"
#include "lmdplab/io.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "lmdplab/policy.hpp"
#include "test_util.hpp"

using namespace lmdplab;

namespace {

std::string temp_path(const char* stem) {
  return std::string("io_test_") + stem + ".tmp";
}

}  // namespace

TEST_CASE("format_double renders shortest round-trip decimals") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-3.0) == "-3");
  // 17 significant digits always round-trip a double exactly.
  for (double v : {1.0 / 3.0, 0.1, 2.2250738585072014e-308, 12345.6789, -0.30000000000000004}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("model json round-trips exactly") {
  const TabularMdp m = testutil::random_mdp(4, 3, 17, 2027);
  const std::string text = mdp_to_json(m);
  const TabularMdp back = mdp_from_json(text);
  CHECK(back.num_states == m.num_states);
  CHECK(back.num_actions == m.num_actions);
  CHECK(back.horizon == m.horizon);
  CHECK(back.start_state == m.start_state);
  CHECK(back.transitions == m.transitions);  // bitwise: json stores full precision
  CHECK(back.rewards == m.rewards);
  // The serialized form carries its format tag.
  CHECK(text.find("lmdp-lab/mdp-v1") != std::string::npos);
}

TEST_CASE("class json round-trips exactly") {
  const LatentMdp lm = testutil::random_latent(3, 3, 2, 9, 4);
  const std::string text = latent_to_json(lm);
  const LatentMdp back = latent_from_json(text);
  REQUIRE(back.num_members() == lm.num_members());
  CHECK(back.weights == lm.weights);
  for (int i = 0; i < lm.num_members(); ++i) {
    CHECK(back.mdps[static_cast<std::size_t>(i)].transitions ==
          lm.mdps[static_cast<std::size_t>(i)].transitions);
    CHECK(back.mdps[static_cast<std::size_t>(i)].rewards ==
          lm.mdps[static_cast<std::size_t>(i)].rewards);
  }
  CHECK(text.find("lmdp-lab/lmdp-v1") != std::string::npos);
}

TEST_CASE("json loaders name the offending field") {
  const TabularMdp m = make_two_state(0.2, 0.1, 5);
  const std::string good = mdp_to_json(m);

  CHECK_THROWS_AS(mdp_from_json("not json at all {"), ValidationError);

  // Wrong format tag.
  {
    auto j = nlohmann::json::parse(good);
    j["format"] = "lmdp-lab/other-v9";
    CHECK_THROWS_WITH_AS(mdp_from_json(j.dump()),
                         doctest::Contains("expected format 'lmdp-lab/mdp-v1'"), ValidationError);
  }
  // Missing field.
  {
    auto j = nlohmann::json::parse(good);
    j.erase("horizon");
    CHECK_THROWS_WITH_AS(mdp_from_json(j.dump()), doctest::Contains("horizon"), ValidationError);
  }
  // Wrong type.
  {
    auto j = nlohmann::json::parse(good);
    j["num_states"] = "two";
    CHECK_THROWS_WITH_AS(mdp_from_json(j.dump()), doctest::Contains("num_states"), ValidationError);
  }
  // Ragged transitions.
  {
    auto j = nlohmann::json::parse(good);
    j["transitions"][0][0].push_back(0.0);
    CHECK_THROWS_WITH_AS(mdp_from_json(j.dump()), doctest::Contains("transitions[0][0]"),
                         ValidationError);
  }
  // Structurally fine but not a distribution: model validation kicks in.
  {
    auto j = nlohmann::json::parse(good);
    j["transitions"][0][0][0] = 0.9;  // row no longer sums to 1
    CHECK_THROWS_AS(mdp_from_json(j.dump()), ValidationError);
  }
}

TEST_CASE("class json rejects weight and member mismatches") {
  const LatentMdp lm = testutil::random_latent(2, 2, 2, 4, 6);
  const std::string good = latent_to_json(lm);
  {
    auto j = nlohmann::json::parse(good);
    j["weights"] = std::vector<double>{0.9, 0.6};
    CHECK_THROWS_AS(latent_from_json(j.dump()), ValidationError);
  }
  {
    auto j = nlohmann::json::parse(good);
    j.erase("mdps");
    CHECK_THROWS_WITH_AS(latent_from_json(j.dump()), doctest::Contains("mdps"), ValidationError);
  }
  {
    auto j = nlohmann::json::parse(good);
    j["format"] = "lmdp-lab/mdp-v1";
    CHECK_THROWS_AS(latent_from_json(j.dump()), ValidationError);
  }
}

TEST_CASE("text files round-trip and report open failures") {
  const std::string path = temp_path("roundtrip");
  const std::string payload = "line one\nline two\n\xE2\x9C\x93 utf8\n";
  save_text_file(path, payload);
  CHECK(load_text_file(path) == payload);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_text_file(path), ValidationError);
  CHECK_THROWS_AS(save_text_file("no_such_dir_xyz/file.txt", "x"), ValidationError);
}

TEST_CASE("trajectory csv has one row per step with stable formatting") {
  Trajectory t;
  t.latent_index = 2;
  t.states = {0, 1, 1, 0};
  t.actions = {1, 0, 1};
  t.rewards = {0.0, 0.5, 1.0};
  CHECK(trajectory_to_csv(t) ==
        "step,state,action,reward,latent_index\n"
        "1,0,1,0,2\n"
        "2,1,0,0.5,2\n"
        "3,1,1,1,2\n");
}

TEST_CASE("jsonl trace sink writes one parseable object per record") {
  const std::string path = temp_path("trace");
  {
    JsonlTraceSink sink(path);
    sink.emit({3, "probe", 2, -1, 1.5, 2.0, false});
    sink.emit({4, "exploit", 1, 0, 0.0, 0.0, true});
  }
  const std::string text = load_text_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 2);
  const auto first = nlohmann::json::parse(lines[0]);
  CHECK(first["step"] == 3);
  CHECK(first["phase"] == "probe");
  CHECK(first["surviving_count"] == 2);
  CHECK(first["chosen_member"] == -1);
  CHECK(first["statistic"] == 1.5);
  CHECK(first["switched"] == false);
  const auto second = nlohmann::json::parse(lines[1]);
  CHECK(second["phase"] == "exploit");
  CHECK(second["switched"] == true);
  std::remove(path.c_str());
  CHECK_THROWS_AS(JsonlTraceSink("no_such_dir_xyz/trace.jsonl"), ValidationError);
}
