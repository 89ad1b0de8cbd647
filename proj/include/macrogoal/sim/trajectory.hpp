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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/sim/game.hpp"
#include "macrogoal/sim/observe.hpp"

namespace macrogoal::sim {

struct TrajectoryHeader {
  std::array<Lineup, 2> lineups{};
  std::uint64_t seed = 0;
  EnvConfig env;
  std::array<std::string, 2> agents{"", ""};  // controller id per team
  std::string label;                          // free-form run label, e.g. a lineup system name
};

/// One frame: the state summary of s_t, the joint action a_t taken there, and
/// the rewards and kills of the transition s_t -> s_{t+1}. The final record
/// of a game has no actions.
struct FrameRecord {
  int frame = 0;
  bool has_actions = false;
  std::array<HeroAction, kHeroCount> actions{};
  std::array<RewardVector, kHeroCount> rewards{};
  std::array<macro::MacroState, 2> macro{};
  std::array<int, kHeroCount> gold{};
  std::array<bool, kHeroCount> alive{};
  std::array<int, 2> crystal_hp{};
  std::vector<KillEvent> events;
  bool done = false;
  std::optional<Team> winner;
  std::vector<std::vector<double>> observations;  // optional, per hero
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<FrameRecord> frames;

  int length() const { return static_cast<int>(frames.size()); }
  const FrameRecord& last() const { return frames.back(); }
};

class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(TrajectoryHeader header, bool observations = false) : observations_(observations) {
    traj_.header = std::move(header);
  }

  void record_state(const GameState& s) {
    FrameRecord r;
    r.frame = s.frame;
    for (Team t : {Team::blue, Team::red}) {
      r.macro[team_index(t)] = macro::extract_macro_state(s, t);
      r.crystal_hp[team_index(t)] = s.crystal(t)->hp;
    }
    for (int h = 0; h < kHeroCount; ++h) {
      r.gold[h] = s.units[h].gold;
      r.alive[h] = s.units[h].alive();
    }
    r.done = s.done;
    r.winner = s.winner;
    if (observations_)
      for (int h = 0; h < kHeroCount; ++h) r.observations.push_back(observe(s, h));
    traj_.frames.push_back(std::move(r));
  }

  void record_transition(std::span<const HeroAction, kHeroCount> actions, const StepResult& result,
                         const std::vector<KillEvent>& events) {
    FrameRecord& r = traj_.frames.back();
    r.has_actions = true;
    std::copy(actions.begin(), actions.end(), r.actions.begin());
    r.rewards = result.rewards;
    r.events = events;
  }

  const Trajectory& trajectory() const { return traj_; }
  Trajectory finish() { return std::move(traj_); }

 private:
  Trajectory traj_;
  bool observations_;
};

// ---- JSONL ----------------------------------------------------------------

inline Json action_to_json(const HeroAction& a) {
  switch (a.kind) {
    case HeroAction::Kind::noop: return Json::array({0});
    case HeroAction::Kind::move: return Json::array({1, a.direction});
    case HeroAction::Kind::attack: return Json::array({2, a.target});
  }
  return Json::array({0});
}

inline HeroAction action_from_json(const Json& j) {
  const int kind = j.at(0).get<int>();
  if (kind == 1) return HeroAction::move(j.at(1).get<int>());
  if (kind == 2) return HeroAction::attack_unit(j.at(1).get<int>());
  return HeroAction::noop();
}

inline Json lineup_to_json(const Lineup& l) {
  Json j = Json::array();
  for (HeroRole r : l) j.push_back(to_string(r));
  return j;
}

inline Lineup lineup_from_json(const Json& j) {
  require(j.is_array() && j.size() == kTeamSize, ErrorKind::invalid_lineup, "lineup must list 5 roles");
  Lineup l{};
  for (int k = 0; k < kTeamSize; ++k) l[k] = role_from_string(j[k].get<std::string>());
  return l;
}

/// "marksman-mage-warrior-assassin-supporter".
inline std::string lineup_name(const Lineup& l) {
  std::string out;
  for (HeroRole r : l) out += (out.empty() ? "" : "-") + std::string(to_string(r));
  return out;
}

inline Json header_to_json(const TrajectoryHeader& h) {
  return {{"type", "header"},
          {"lineups", {{"blue", lineup_to_json(h.lineups[0])}, {"red", lineup_to_json(h.lineups[1])}}},
          {"seed", h.seed},
          {"agents", {{"blue", h.agents[0]}, {"red", h.agents[1]}}},
          {"label", h.label},
          {"env", h.env}};
}

inline TrajectoryHeader header_from_json(const Json& j) {
  TrajectoryHeader h;
  h.lineups[0] = lineup_from_json(j.at("lineups").at("blue"));
  h.lineups[1] = lineup_from_json(j.at("lineups").at("red"));
  h.seed = j.at("seed").get<std::uint64_t>();
  h.agents[0] = j.at("agents").value("blue", "");
  h.agents[1] = j.at("agents").value("red", "");
  h.label = j.value("label", "");
  h.env = j.at("env").get<EnvConfig>();
  return h;
}

inline Json event_to_json(const KillEvent& e) {
  return {{"frame", e.frame},       {"killer", e.killer},
          {"killer_kind", static_cast<int>(e.killer_kind)},
          {"victim", e.victim},     {"victim_kind", static_cast<int>(e.victim_kind)},
          {"victim_team", static_cast<int>(e.victim_team)},
          {"gold", e.gold},         {"camp", e.camp}};
}

inline KillEvent event_from_json(const Json& j) {
  KillEvent e;
  e.frame = j.at("frame").get<int>();
  e.killer = j.at("killer").get<int>();
  e.killer_kind = static_cast<UnitKind>(j.at("killer_kind").get<int>());
  e.victim = j.at("victim").get<int>();
  e.victim_kind = static_cast<UnitKind>(j.at("victim_kind").get<int>());
  e.victim_team = static_cast<Team>(j.at("victim_team").get<int>());
  e.gold = j.at("gold").get<int>();
  e.camp = j.at("camp").get<int>();
  return e;
}

inline Json record_to_json(const FrameRecord& r) {
  Json j;
  j["frame"] = r.frame;
  j["macro"] = {{"blue", r.macro[0].values}, {"red", r.macro[1].values}};
  j["gold"] = r.gold;
  j["alive"] = r.alive;
  j["crystal_hp"] = r.crystal_hp;
  if (r.has_actions) {
    Json acts = Json::array();
    for (const auto& a : r.actions) acts.push_back(action_to_json(a));
    j["actions"] = std::move(acts);
    Json rew = Json::array();
    for (const auto& rv : r.rewards) rew.push_back(rv.heads);
    j["rewards"] = std::move(rew);
  } else {
    j["actions"] = nullptr;
    j["rewards"] = nullptr;
  }
  Json ev = Json::array();
  for (const auto& e : r.events) ev.push_back(event_to_json(e));
  j["events"] = std::move(ev);
  j["done"] = r.done;
  j["winner"] = r.winner ? Json(to_string(*r.winner)) : Json(nullptr);
  if (!r.observations.empty()) j["observations"] = r.observations;
  return j;
}

inline std::optional<Team> team_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  const std::string s = j.get<std::string>();
  if (s == "blue") return Team::blue;
  if (s == "red") return Team::red;
  fail(ErrorKind::data, "unknown team '" + s + "'");
}

inline FrameRecord record_from_json(const Json& j) {
  FrameRecord r;
  r.frame = j.at("frame").get<int>();
  r.macro[0] = macro::macro_from_json(j.at("macro").at("blue"));
  r.macro[1] = macro::macro_from_json(j.at("macro").at("red"));
  r.gold = j.at("gold").get<std::array<int, kHeroCount>>();
  r.alive = j.at("alive").get<std::array<bool, kHeroCount>>();
  r.crystal_hp = j.at("crystal_hp").get<std::array<int, 2>>();
  if (!j.at("actions").is_null()) {
    r.has_actions = true;
    for (int h = 0; h < kHeroCount; ++h) {
      r.actions[h] = action_from_json(j["actions"].at(h));
      r.rewards[h].heads = j.at("rewards").at(h).get<std::array<double, kRewardHeads>>();
    }
  }
  for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
  r.done = j.at("done").get<bool>();
  r.winner = team_from_json(j.at("winner"));
  if (j.contains("observations")) r.observations = j["observations"].get<std::vector<std::vector<double>>>();
  return r;
}

inline void write_trajectory(const fs::path& path, const Trajectory& t) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  out << header_to_json(t.header).dump() << '\n';
  for (const auto& r : t.frames) out << record_to_json(r).dump() << '\n';
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

inline Trajectory read_trajectory(const fs::path& path) {
  Trajectory t;
  bool have_header = false;
  for_each_jsonl(path, [&](const Json& j) {
    if (j.contains("type") && j["type"] == "header") {
      t.header = header_from_json(j);
      have_header = true;
    } else {
      t.frames.push_back(record_from_json(j));
    }
  });
  require(have_header, ErrorKind::data, path.string() + ": missing trajectory header");
  return t;
}

/// Re-simulates a logged trajectory from its header and recorded actions and
/// calls fn(state) for every frame. Recorded macro-states are checked against
/// the replay.
template <class Fn>
void replay(const Trajectory& t, Fn&& fn) {
  auto cfg = std::make_shared<const EnvConfig>(t.header.env);
  GameState s = new_game(t.header.lineups[0], t.header.lineups[1], t.header.seed, cfg);
  for (const FrameRecord& r : t.frames) {
    require(s.frame == r.frame, ErrorKind::data, "replay frame mismatch");
    for (Team team : {Team::blue, Team::red})
      require(macro::extract_macro_state(s, team) == r.macro[team_index(team)], ErrorKind::data,
              "replay diverged from the log at frame " + std::to_string(r.frame));
    fn(static_cast<const GameState&>(s));
    if (!r.has_actions) break;
    step(s, std::span<const HeroAction, kHeroCount>(r.actions));
  }
}

}  // namespace macrogoal::sim
