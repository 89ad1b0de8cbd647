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

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "macrogoal/cli/run_config.hpp"
#include "macrogoal/core/parallel.hpp"
#include "macrogoal/eval/tournament.hpp"
#include "macrogoal/metrics/report.hpp"
#include "macrogoal/rl/train.hpp"

namespace macrogoal::cli {

inline std::shared_ptr<const sim::EnvConfig> env_of(const RunConfig& c) { return std::make_shared<const sim::EnvConfig>(c.env); }

inline demo::DemoOptions demo_options(const RunConfig& c, demo::StrategyId id, int games) {
  demo::DemoOptions o = demo::default_demo_options(id, games, c.seed);
  o.opponent = demo::strategy_from_string(c.demos.opponent);
  o.red_lineup = demo::canonical_lineup(o.opponent);
  o.noise = c.demos.noise;
  o.observations = c.demos.observations;
  o.env = env_of(c);
  return o;
}

/// Writes trajectories and a manifest; "mixed" writes one sub-directory per
/// configured strategy.
inline Json cmd_gen_demos(const RunConfig& c, const fs::path& out, int workers) {
  if (c.demos.strategy == "mixed") {
    std::vector<demo::DemoOptions> parts;
    for (const auto& s : c.demos.strategies) parts.push_back(demo_options(c, demo::strategy_from_string(s), c.demos.games));
    require(!parts.empty(), ErrorKind::config, "mixed mode needs at least one strategy");
    return demo::write_mixed_demos(out, parts, workers);
  }
  const auto o = demo_options(c, demo::strategy_from_string(c.demos.strategy), c.demos.games);
  return demo::write_demos(out, o, demo::generate_demos(o, workers));
}

struct ExtractSummary {
  std::size_t trajectories = 0;
  std::size_t examples = 0;
};

inline macro::DatasetHeader dataset_header(const RunConfig& c) {
  const macro::LabelWindow w = macro::label_window(c.labels, c.env);
  macro::DatasetHeader h;
  h.horizon_frames = w.horizon;
  h.noise_frames = w.noise;
  h.horizon_seconds = c.labels.horizon_seconds;
  h.noise_seconds = c.labels.noise_seconds;
  h.frames_per_second = c.env.frames_per_second;
  h.gold_bucket = c.labels.gold_bucket;
  h.seed = c.seed;
  return h;
}

/// Labels the demonstrating (blue) team of every trajectory in the manifest.
/// An empty demo directory yields an empty dataset.
inline ExtractSummary cmd_extract(const RunConfig& c, const fs::path& demos, const fs::path& out, int workers,
                                  std::ostream& log = std::cerr) {
  require(fs::is_directory(demos), ErrorKind::data, "demo directory not found: " + demos.string());
  const macro::DatasetHeader h = dataset_header(c);
  std::vector<fs::path> files;
  if (fs::is_empty(demos)) {
    log << "warning: " << demos.string() << " is empty; writing an empty dataset\n";
  } else {
    files = demo::manifest_files(demos / demo::kManifestName);
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  macro::DatasetWriter writer(out, h);
  const macro::LabelWindow w{h.horizon_frames, h.noise_frames};
  const std::size_t batch = static_cast<std::size_t>(std::max(1, workers));
  for (std::size_t b = 0; b < files.size(); b += batch) {
    const std::size_t n = std::min(batch, files.size() - b);
    std::vector<std::vector<macro::LabeledExample>> parts(n);
    parallel_for(n, workers, [&](std::size_t i) {
      const int source = static_cast<int>(b + i);
      const sim::Trajectory t = sim::read_trajectory(files[b + i]);
      Rng rng(macro::label_seed(c.seed, source, sim::Team::blue));
      parts[i] = macro::extract_labels(t, sim::Team::blue, w, rng, c.labels.gold_bucket, c.labels.frame_stride, source);
    });
    for (const auto& p : parts)
      for (const auto& e : p) writer.write(e);
  }
  writer.close();
  return {files.size(), writer.count()};
}

inline meta::MetaTrainResult cmd_train_meta(const RunConfig& c, const std::vector<fs::path>& datasets, const fs::path& out,
                                            int workers) {
  require(!datasets.empty(), ErrorKind::usage, "train-meta needs at least one dataset");
  std::vector<macro::LabeledExample> examples;
  for (const auto& p : datasets) {
    require(fs::exists(p), ErrorKind::data, "dataset not found: " + p.string());
    macro::Dataset d = macro::read_dataset(p);
    examples.insert(examples.end(), std::make_move_iterator(d.examples.begin()), std::make_move_iterator(d.examples.end()));
  }
  ensure_dir(out);
  return meta::train_meta(examples, c.meta, c.seed, out, workers);
}

struct TrainRLArgs {
  std::string mode;   // empty: config
  std::string meta;   // empty: config
  std::optional<int> iterations;
  bool resume = false;
};

inline rl::RLTrainResult cmd_train_rl(const RunConfig& c, const TrainRLArgs& a, const fs::path& out, int workers,
                                      std::ostream& log = std::cerr) {
  const std::string mode = a.mode.empty() ? c.rl.mode : a.mode;
  require(mode == "mgg" || mode == "baseline", ErrorKind::usage, "--mode must be mgg or baseline");
  const std::string meta_path = a.meta.empty() ? c.rl.meta : a.meta;
  rl::RLTrainOptions o;
  o.mode = mode == "mgg" ? rl::TrainMode::mgg : rl::TrainMode::baseline;
  o.ppo = c.ppo;
  o.env = env_of(c);
  o.lineups = parse_lineups(c.rl.lineups);
  o.iterations = a.iterations.value_or(c.rl.iterations);
  o.seed = c.seed;
  o.out_dir = out;
  o.resume = a.resume;
  o.workers = workers;
  if (o.mode == rl::TrainMode::mgg) {
    require(!meta_path.empty(), ErrorKind::usage, "mgg mode needs a meta-controller checkpoint (--meta)");
    require(fs::exists(meta_path), ErrorKind::data, "meta-controller checkpoint not found: " + meta_path);
    const Json side = nn::read_sidecar(meta_path);
    require(side.value("kind", "") == "meta_controller", ErrorKind::config, meta_path + " is not a meta-controller checkpoint");
    auto meta = std::make_shared<const nn::Net>(nn::load_checkpoint(meta_path));
    o.goals = std::make_shared<const rl::MetaGoalSource>(std::move(meta), c.ppo.temperature);
    o.meta_reference = fs::absolute(meta_path).lexically_relative(fs::absolute(out)).generic_string();
  } else if (!meta_path.empty()) {
    log << "warning: baseline mode ignores the meta-controller checkpoint " << meta_path << "\n";
  }
  ensure_dir(out);
  return rl::train_mgg(o);
}

inline std::vector<std::unique_ptr<eval::Agent>> load_agents(const std::vector<std::string>& specs) {
  std::vector<std::unique_ptr<eval::Agent>> agents;
  std::set<std::string> labels;
  for (const auto& s : specs) {
    agents.push_back(std::make_unique<eval::Agent>(eval::parse_agent(s)));
    require(labels.insert(agents.back()->label()).second, ErrorKind::usage, "duplicate agent label '" + agents.back()->label() + "'");
  }
  return agents;
}

inline std::vector<metrics::MatchResult> cmd_tournament(const RunConfig& c, const std::vector<std::string>& agent_specs,
                                                        std::optional<int> games, const fs::path& out, int workers) {
  require(agent_specs.size() >= 2, ErrorKind::usage, "tournament needs at least two --agent");
  const auto agents = load_agents(agent_specs);
  std::vector<const eval::Agent*> ptrs;
  for (const auto& a : agents) ptrs.push_back(a.get());
  eval::TournamentOptions o;
  o.games_per_pair = games.value_or(c.eval.games_per_pair);
  o.seed = c.seed;
  o.lineups = parse_lineups(c.eval.lineups);
  o.env = env_of(c);
  o.workers = workers;
  const auto results = eval::run_tournament(ptrs, o);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  eval::write_results(out, results);
  return results;
}

struct EvaluateArgs {
  std::string agent;
  std::string opponent;  // empty: config
  std::string lineup;    // empty: first configured lineup
  std::string opponent_lineup;
  std::optional<int> matches;
};

/// Recorded matches of one agent (blue) against an opponent, written like a
/// demo directory so `report` and `extract` can read it.
inline Json cmd_evaluate(const RunConfig& c, const EvaluateArgs& a, const fs::path& out, int workers) {
  require(!a.agent.empty(), ErrorKind::usage, "evaluate needs --agent");
  const eval::Agent agent(eval::parse_agent(a.agent));
  const eval::Agent opponent(eval::parse_agent(a.opponent.empty() ? c.eval.opponent : a.opponent));
  require(!c.eval.lineups.empty() || !a.lineup.empty(), ErrorKind::config, "evaluate needs a lineup");
  eval::EvaluationOptions o;
  o.matches = a.matches.value_or(c.eval.matches);
  o.seed = c.seed;
  o.lineup = parse_lineup(a.lineup.empty() ? c.eval.lineups.front() : a.lineup);
  o.opponent_lineup = a.opponent_lineup.empty() ? o.lineup : parse_lineup(a.opponent_lineup);
  o.env = env_of(c);
  o.workers = workers;
  const auto played = eval::evaluate(agent, opponent, o);
  ensure_dir(out);
  Json files = Json::array(), seeds = Json::array(), results = Json::array();
  for (std::size_t m = 0; m < played.size(); ++m) {
    const std::string name = demo::demo_file_name(static_cast<int>(m));
    sim::write_trajectory(out / name, played[m].trajectory);
    files.push_back(name);
    seeds.push_back(played[m].result.seed);
    results.push_back(metrics::to_json(played[m].result));
  }
  Json manifest = {{"agent", agent.label()},
                   {"opponent", opponent.label()},
                   {"lineups", {sim::lineup_to_json(o.lineup), sim::lineup_to_json(o.opponent_lineup)}},
                   {"game_count", played.size()},
                   {"seeds", std::move(seeds)},
                   {"files", std::move(files)}};
  write_json(out / demo::kManifestName, manifest);
  std::vector<metrics::MatchResult> rs;
  for (const auto& p : played) rs.push_back(p.result);
  eval::write_results(out / "results.jsonl", rs);
  return manifest;
}

/// Trajectory directories (with manifests) and match-result files to one report.
inline Json cmd_report(const RunConfig& c, const std::vector<fs::path>& trajectory_dirs, const std::vector<fs::path>& result_files,
                       const fs::path& out) {
  std::vector<sim::Trajectory> trajs;
  for (const auto& d : trajectory_dirs)
    for (const auto& f : demo::manifest_files(d / demo::kManifestName)) trajs.push_back(sim::read_trajectory(f));
  std::vector<metrics::ReportMatch> matches;
  for (const auto& t : trajs) matches.push_back(metrics::subject_of(t));
  std::vector<metrics::MatchResult> results;
  for (const auto& f : result_files) {
    require(fs::exists(f), ErrorKind::data, "results file not found: " + f.string());
    const auto rs = eval::read_results(f);
    results.insert(results.end(), rs.begin(), rs.end());
  }
  return metrics::build_report(matches, results, report_options(c), out);
}

}  // namespace macrogoal::cli
