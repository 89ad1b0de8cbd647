// Copyright 2026 The macrogoal Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/io.hpp"
#include "macrogoal/demo/generate.hpp"
#include "macrogoal/demo/scripted.hpp"
#include "macrogoal/macro/labels.hpp"
#include "macrogoal/meta/meta_controller.hpp"
#include "macrogoal/metrics/report.hpp"
#include "macrogoal/rl/ppo.hpp"
#include "macrogoal/sim/config.hpp"

namespace macrogoal::cli {

struct DemoConfig {
  std::string strategy = "three_lane";  // or "mixed"
  std::vector<std::string> strategies = {"three_lane", "marksman_core", "resource_grab"};  // mixed mode
  std::string opponent = "three_lane";
  int games = 10;
  double noise = demo::kDemoNoise;
  bool observations = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DemoConfig, strategy, strategies, opponent, games, noise, observations)

struct RLConfig {
  std::string mode = "mgg";
  int iterations = 100;
  std::string meta;                   // meta-controller checkpoint, mgg mode
  std::vector<std::string> lineups = {"three_lane", "marksman_core", "resource_grab"};
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RLConfig, mode, iterations, meta, lineups)

struct EvalConfig {
  int games_per_pair = 10;
  int matches = 50;
  std::string opponent = "scripted:three_lane";
  std::vector<std::string> lineups = {"three_lane", "marksman_core", "resource_grab"};
  int early_window = 300;
  int embed_stride = 10;
  double elo_k = 16.0;
  int elo_passes = 20;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalConfig, games_per_pair, matches, opponent, lineups, early_window,
                                                embed_stride, elo_k, elo_passes)

struct RunConfig {
  std::uint64_t seed = 0;
  sim::EnvConfig env;
  DemoConfig demos;
  macro::LabelConfig labels;
  meta::MetaTrainConfig meta;
  rl::PPOConfig ppo;
  RLConfig rl;
  EvalConfig eval;

  void validate() const {
    env.validate();
    meta.validate();
    ppo.validate();
    macro::label_window(labels, env);
    require(demos.games >= 1, ErrorKind::config, "demos.games must be >= 1");
    require(demos.noise >= 0.0 && demos.noise <= 1.0, ErrorKind::config, "demos.noise must lie in [0, 1]");
    require(rl.mode == "mgg" || rl.mode == "baseline", ErrorKind::config, "rl.mode must be mgg or baseline");
    require(rl.iterations >= 0, ErrorKind::config, "rl.iterations must be >= 0");
    require(eval.games_per_pair >= 1 && eval.matches >= 1, ErrorKind::config, "eval game counts must be >= 1");
    require(eval.early_window >= 0 && eval.embed_stride >= 1, ErrorKind::config, "eval windows must be positive");
    require(eval.elo_passes >= 1 && eval.elo_k > 0.0, ErrorKind::config, "eval Elo settings must be positive");
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, seed, env, demos, labels, meta, ppo, rl, eval)

inline const std::set<std::string>& config_sections() {
  static const std::set<std::string> s = {"seed", "env", "demos", "labels", "meta", "ppo", "rl", "eval"};
  return s;
}

/// Defaults overlaid with the given document; unknown top-level keys are rejected.
inline RunConfig config_from_json(const Json& j) {
  require(j.is_object(), ErrorKind::config, "config must be a JSON object");
  for (const auto& [key, _] : j.items())
    require(config_sections().count(key) != 0, ErrorKind::config, "unknown config section '" + key + "'");
  Json merged = RunConfig{};
  merged.merge_patch(j);
  RunConfig c;
  try {
    c = merged.get<RunConfig>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const fs::path& path) {
  require(fs::exists(path), ErrorKind::config, "config file not found: " + path.string());
  Json j;
  try {
    j = read_json(path);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return config_from_json(j);
}

/// A strategy name (its canonical lineup) or five roles joined by '-'.
inline sim::Lineup parse_lineup(const std::string& text) {
  for (auto id : {demo::StrategyId::three_lane, demo::StrategyId::marksman_core, demo::StrategyId::resource_grab})
    if (text == demo::to_string(id)) return demo::canonical_lineup(id);
  sim::Lineup l{};
  std::size_t start = 0;
  for (int k = 0; k < sim::kTeamSize; ++k) {
    const std::size_t dash = text.find('-', start);
    require((dash == std::string::npos) == (k == sim::kTeamSize - 1), ErrorKind::invalid_lineup,
            "lineup '" + text + "' must name a strategy or five roles joined by '-'");
    l[k] = sim::role_from_string(text.substr(start, dash == std::string::npos ? std::string::npos : dash - start));
    start = dash + 1;
  }
  return l;
}

inline std::vector<sim::Lineup> parse_lineups(const std::vector<std::string>& names) {
  std::vector<sim::Lineup> out;
  for (const auto& n : names) out.push_back(parse_lineup(n));
  return out;
}

inline metrics::ReportOptions report_options(const RunConfig& c) {
  return {c.eval.early_window, c.eval.embed_stride, c.eval.elo_k, c.eval.elo_passes, c.seed};
}

}  // namespace macrogoal::cli
