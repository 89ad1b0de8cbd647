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

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/core/parallel.hpp"
#include "macrogoal/demo/scripted.hpp"
#include "macrogoal/sim/controller.hpp"

namespace macrogoal::demo {

inline constexpr double kDemoNoise = 0.05;
inline constexpr const char* kManifestName = "manifest.json";

struct DemoOptions {
  StrategyId strategy = StrategyId::three_lane;
  sim::Lineup blue_lineup = canonical_lineup(StrategyId::three_lane);
  sim::Lineup red_lineup = canonical_lineup(StrategyId::three_lane);
  StrategyId opponent = StrategyId::three_lane;
  int games = 10;
  std::uint64_t seed = 0;
  double noise = kDemoNoise;
  bool observations = false;
  std::shared_ptr<const sim::EnvConfig> env;
};

inline DemoOptions default_demo_options(StrategyId id, int games, std::uint64_t seed) {
  DemoOptions o;
  o.strategy = id;
  o.blue_lineup = canonical_lineup(id);
  o.games = games;
  o.seed = seed;
  return o;
}

inline std::uint64_t demo_game_seed(const DemoOptions& o, int game) {
  return derive_seed(o.seed, {static_cast<std::uint64_t>(o.strategy), static_cast<std::uint64_t>(game)});
}

/// Blue plays `strategy`, red plays `opponent`; one trajectory per game.
inline std::vector<sim::Trajectory> generate_demos(const DemoOptions& o, int workers = 1) {
  require(o.games >= 1, ErrorKind::config, "games must be >= 1");
  auto env = o.env ? o.env : std::make_shared<const sim::EnvConfig>();
  std::vector<sim::Trajectory> out(static_cast<std::size_t>(o.games));
  parallel_for(out.size(), workers, [&](std::size_t g) {
    sim::GameSetup setup{env, {o.blue_lineup, o.red_lineup}, demo_game_seed(o, static_cast<int>(g)), to_string(o.strategy)};
    ScriptedController blue(o.strategy, o.noise);
    ScriptedController red(o.opponent, o.noise);
    sim::TrajectoryRecorder rec(sim::make_header(setup, blue, red), o.observations);
    sim::play_game(setup, blue, red, &rec);
    out[g] = rec.finish();
  });
  return out;
}

inline std::string demo_file_name(int game) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "game_%05d.jsonl", game);
  return buf;
}

/// Writes the trajectories and a manifest into `dir`; returns the manifest.
inline Json write_demos(const fs::path& dir, const DemoOptions& o, const std::vector<sim::Trajectory>& trajs) {
  ensure_dir(dir);
  Json files = Json::array();
  Json seeds = Json::array();
  for (std::size_t g = 0; g < trajs.size(); ++g) {
    const std::string name = demo_file_name(static_cast<int>(g));
    sim::write_trajectory(dir / name, trajs[g]);
    files.push_back(name);
    seeds.push_back(trajs[g].header.seed);
  }
  Json m;
  m["strategy"] = to_string(o.strategy);
  m["opponent"] = to_string(o.opponent);
  m["lineups"] = {sim::lineup_to_json(o.blue_lineup), sim::lineup_to_json(o.red_lineup)};
  m["game_count"] = trajs.size();
  m["seeds"] = std::move(seeds);
  m["files"] = std::move(files);
  m["noise"] = o.noise;
  write_json(dir / kManifestName, m);
  return m;
}

/// Mixed mode: one sub-directory and manifest per strategy, plus an index
/// manifest listing them.
inline Json write_mixed_demos(const fs::path& dir, const std::vector<DemoOptions>& parts, int workers = 1) {
  ensure_dir(dir);
  Json idx;
  idx["parts"] = Json::array();
  for (const DemoOptions& o : parts) {
    const std::string sub = to_string(o.strategy);
    write_demos(dir / sub, o, generate_demos(o, workers));
    idx["parts"].push_back(sub + "/" + kManifestName);
  }
  write_json(dir / kManifestName, idx);
  return idx;
}

/// All trajectory files reachable from a manifest, following index manifests.
inline std::vector<fs::path> manifest_files(const fs::path& manifest) {
  require(fs::exists(manifest), ErrorKind::data, "missing demo manifest: " + manifest.string());
  const Json m = read_json(manifest);
  std::vector<fs::path> out;
  const fs::path base = manifest.parent_path();
  if (m.contains("parts")) {
    for (const auto& p : m["parts"]) {
      auto sub = manifest_files(base / p.get<std::string>());
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  require(m.contains("files"), ErrorKind::data, manifest.string() + ": manifest lists no files");
  for (const auto& f : m["files"]) out.push_back(base / f.get<std::string>());
  return out;
}

}  // namespace macrogoal::demo
