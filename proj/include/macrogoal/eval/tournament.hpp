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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/io.hpp"
#include "macrogoal/core/parallel.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/demo/scripted.hpp"
#include "macrogoal/metrics/metrics.hpp"
#include "macrogoal/nn/checkpoint.hpp"
#include "macrogoal/rl/policy.hpp"
#include "macrogoal/sim/controller.hpp"

namespace macrogoal::eval {

/// An agent reference: `[label=]source[,key=value...]`, where source is
/// `scripted:<strategy>` or a policy checkpoint path. Keys: meta (goal model
/// override), temperature, noise (scripted only), interval (goal refresh).
struct AgentSpec {
  std::string label;
  std::string source;
  std::string meta;
  std::optional<double> temperature;
  double noise = 0.0;
  std::optional<int> interval;
};

inline AgentSpec parse_agent(const std::string& text) {
  AgentSpec a;
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  std::string head = parts.front();
  if (const std::size_t eq = head.find('='); eq != std::string::npos) {
    a.label = head.substr(0, eq);
    head = head.substr(eq + 1);
  }
  require(!head.empty(), ErrorKind::usage, "agent '" + text + "' has no source");
  a.source = head;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::size_t eq = parts[i].find('=');
    require(eq != std::string::npos, ErrorKind::usage, "agent option '" + parts[i] + "' must be key=value");
    const std::string key = parts[i].substr(0, eq), value = parts[i].substr(eq + 1);
    try {
      if (key == "meta") a.meta = value;
      else if (key == "temperature") a.temperature = std::stod(value);
      else if (key == "noise") a.noise = std::stod(value);
      else if (key == "interval") a.interval = std::stoi(value);
      else fail(ErrorKind::usage, "unknown agent option '" + key + "'");
    } catch (const std::logic_error&) {
      fail(ErrorKind::usage, "bad value for agent option '" + key + "': " + value);
    }
  }
  if (a.label.empty()) a.label = a.source;
  return a;
}

inline bool is_scripted(const AgentSpec& a) { return a.source.rfind("scripted:", 0) == 0; }

/// A loaded agent; spawns a fresh controller per game.
class Agent {
 public:
  explicit Agent(const AgentSpec& spec, const fs::path& base = {}) : spec_(spec) {
    if (is_scripted(spec)) {
      strategy_ = demo::strategy_from_string(spec.source.substr(9));
      return;
    }
    const fs::path path = resolve(spec.source, base);
    const Json side = nn::read_sidecar(path);
    require(side.value("kind", "") == "policy", ErrorKind::config, path.string() + " is not a policy checkpoint");
    auto policy = std::make_shared<nn::Net>(nn::load_checkpoint(path));
    require(nn::spec_hash(policy->spec()) == nn::spec_hash(rl::policy_spec(policy->spec().hidden)), ErrorKind::config,
            path.string() + ": checkpoint spec is not a policy for this environment");
    policy_ = std::move(policy);
    mode_ = side.value("mode", "baseline");
    interval_ = spec.interval.value_or(side.value("goal_interval", 60));
    if (mode_ == "mgg") {
      // The sidecar records the meta checkpoint relative to the policy directory.
      const fs::path recorded(side.at("meta").get<std::string>());
      const fs::path meta_path = !spec.meta.empty()              ? resolve(spec.meta, base)
                                 : recorded.is_relative()        ? path.parent_path() / recorded
                                                                 : recorded;
      const Json meta_side = nn::read_sidecar(meta_path);
      require(meta_side.value("kind", "") == "meta_controller", ErrorKind::config,
              meta_path.string() + " is not a meta-controller checkpoint");
      auto meta = std::make_shared<const nn::Net>(nn::load_checkpoint(meta_path));
      const double t = spec.temperature.value_or(side.value("temperature", 1.0));
      goals_ = std::make_shared<const rl::MetaGoalSource>(std::move(meta), t);
    } else {
      require(spec.meta.empty(), ErrorKind::config, "agent '" + spec.label + "': meta given for a goal-free policy");
    }
  }

  const std::string& label() const { return spec_.label; }

  std::unique_ptr<sim::Controller> controller() const {
    if (strategy_) return std::make_unique<LabelledScripted>(spec_.label, *strategy_, spec_.noise);
    return std::make_unique<rl::PolicyController>(spec_.label, policy_, goals_, interval_);
  }

 private:
  class LabelledScripted : public demo::ScriptedController {
   public:
    LabelledScripted(std::string label, demo::StrategyId id, double noise)
        : demo::ScriptedController(id, noise), label_(std::move(label)) {}
    std::string id() const override { return label_; }

   private:
    std::string label_;
  };

  static fs::path resolve(const std::string& p, const fs::path& base) {
    const fs::path path(p);
    return path.is_relative() && !base.empty() && !fs::exists(path) ? base / path : path;
  }

  AgentSpec spec_;
  std::optional<demo::StrategyId> strategy_;
  std::shared_ptr<const nn::Net> policy_;
  std::shared_ptr<const rl::GoalSource> goals_;
  std::string mode_;
  int interval_ = 60;
};

struct PlayedMatch {
  metrics::MatchResult result;
  sim::Trajectory trajectory;  // empty unless recorded
};

/// Plays one match; a game without a winner at max_frames is decided by a
/// coin flip drawn from the match seed.
inline PlayedMatch play_match(const Agent& a, const Agent& b, const sim::Lineup& lineup_a, const sim::Lineup& lineup_b,
                              bool a_blue, std::uint64_t seed, const std::shared_ptr<const sim::EnvConfig>& env,
                              bool record, const std::string& label = "") {
  auto ca = a.controller();
  auto cb = b.controller();
  sim::Controller& blue = a_blue ? *ca : *cb;
  sim::Controller& red = a_blue ? *cb : *ca;
  sim::GameSetup setup{env, {a_blue ? lineup_a : lineup_b, a_blue ? lineup_b : lineup_a}, seed, label};
  std::optional<sim::TrajectoryRecorder> rec;
  if (record) rec.emplace(sim::make_header(setup, blue, red));
  const sim::GameSummary s = sim::play_game(setup, blue, red, rec ? &*rec : nullptr);
  PlayedMatch out;
  sim::Team winner;
  if (s.winner) {
    winner = *s.winner;
  } else {
    Rng coin(derive_seed(seed, {0x636f696eULL}));
    winner = coin.below(2) == 0 ? sim::Team::blue : sim::Team::red;
  }
  const sim::Team a_team = a_blue ? sim::Team::blue : sim::Team::red;
  out.result = {a.label(), b.label(), winner == a_team, s.length, seed, a_blue ? "blue" : "red"};
  if (rec) out.trajectory = rec->finish();
  return out;
}

struct TournamentOptions {
  int games_per_pair = 10;
  std::uint64_t seed = 0;
  std::vector<sim::Lineup> lineups;  // cycled per game; both teams field the same lineup
  std::shared_ptr<const sim::EnvConfig> env;
  int workers = 1;
};

inline std::uint64_t tournament_game_seed(std::uint64_t seed, std::size_t i, std::size_t j, int g) {
  return derive_seed(seed, {0x746f75726eULL, i, j, static_cast<std::uint64_t>(g)});
}

/// Round robin: every unordered pair plays games_per_pair games, agent a on
/// blue in even games and on red in odd ones. Results are in schedule order.
inline std::vector<metrics::MatchResult> run_tournament(const std::vector<const Agent*>& agents, const TournamentOptions& o) {
  require(agents.size() >= 2, ErrorKind::usage, "a tournament needs at least two agents");
  require(o.games_per_pair >= 1, ErrorKind::config, "games per pair must be >= 1");
  require(!o.lineups.empty(), ErrorKind::config, "a tournament needs at least one lineup");
  struct Game {
    std::size_t i, j;
    int g;
  };
  std::vector<Game> schedule;
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = i + 1; j < agents.size(); ++j)
      for (int g = 0; g < o.games_per_pair; ++g) schedule.push_back({i, j, g});
  std::vector<metrics::MatchResult> results(schedule.size());
  parallel_for(schedule.size(), o.workers, [&](std::size_t k) {
    const Game& gm = schedule[k];
    const sim::Lineup& l = o.lineups[static_cast<std::size_t>(gm.g) % o.lineups.size()];
    results[k] = play_match(*agents[gm.i], *agents[gm.j], l, l, gm.g % 2 == 0, tournament_game_seed(o.seed, gm.i, gm.j, gm.g),
                            o.env, false)
                     .result;
  });
  return results;
}

inline void write_results(const fs::path& path, const std::vector<metrics::MatchResult>& rs) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  for (const auto& r : rs) out << metrics::to_json(r).dump() << '\n';
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

inline std::vector<metrics::MatchResult> read_results(const fs::path& path) {
  std::vector<metrics::MatchResult> rs;
  for_each_jsonl(path, [&](const Json& j) { rs.push_back(metrics::match_from_json(j)); });
  return rs;
}

struct EvaluationOptions {
  int matches = 10;
  std::uint64_t seed = 0;
  sim::Lineup lineup{};           // the agent's lineup
  sim::Lineup opponent_lineup{};
  std::shared_ptr<const sim::EnvConfig> env;
  int workers = 1;
};

inline std::uint64_t evaluation_seed(std::uint64_t seed, int m) {
  return derive_seed(seed, {0x6576616cULL, static_cast<std::uint64_t>(m)});
}

/// Recorded matches of `agent` on blue against `opponent` on red.
inline std::vector<PlayedMatch> evaluate(const Agent& agent, const Agent& opponent, const EvaluationOptions& o) {
  require(o.matches >= 1, ErrorKind::config, "evaluation needs at least one match");
  std::vector<PlayedMatch> out(static_cast<std::size_t>(o.matches));
  parallel_for(out.size(), o.workers, [&](std::size_t m) {
    out[m] = play_match(agent, opponent, o.lineup, o.opponent_lineup, true, evaluation_seed(o.seed, static_cast<int>(m)), o.env,
                        true, sim::lineup_name(o.lineup));
  });
  return out;
}

}  // namespace macrogoal::eval
