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
#include <span>
#include <string>

#include "macrogoal/sim/game.hpp"
#include "macrogoal/sim/trajectory.hpp"

namespace macrogoal::sim {

using TeamActions = std::array<HeroAction, kTeamSize>;

/// Decides the joint action of one team each frame.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string id() const = 0;
  virtual void begin(const GameState& /*s*/, Team /*team*/, std::uint64_t /*seed*/) {}
  virtual void act(const GameState& s, Team team, TeamActions& out) = 0;
  /// Called after every step with the successor state and the rewards of all heroes.
  virtual void after_step(const GameState& /*next*/, Team /*team*/, const StepResult& /*result*/) {}
};

struct GameSetup {
  std::shared_ptr<const EnvConfig> env;
  std::array<Lineup, 2> lineups{};
  std::uint64_t seed = 0;
  std::string label;
};

struct GameSummary {
  std::optional<Team> winner;
  int length = 0;
  std::array<int, 2> crystal_hp{};
};

/// Plays one full game between two controllers, optionally logging it.
inline GameSummary play_game(const GameSetup& setup, Controller& blue, Controller& red,
                             TrajectoryRecorder* recorder = nullptr) {
  GameState s = new_game(setup.lineups[0], setup.lineups[1], setup.seed, setup.env);
  blue.begin(s, Team::blue, derive_seed(setup.seed, {1}));
  red.begin(s, Team::red, derive_seed(setup.seed, {2}));
  std::array<HeroAction, kHeroCount> actions{};
  TeamActions team_actions{};
  if (recorder) recorder->record_state(s);
  while (!s.done) {
    for (int t = 0; t < 2; ++t) {
      team_actions.fill(HeroAction::noop());
      (t == 0 ? blue : red).act(s, static_cast<Team>(t), team_actions);
      for (int k = 0; k < kTeamSize; ++k) actions[t * kTeamSize + k] = team_actions[k];
    }
    const StepResult r = step(s, std::span<const HeroAction, kHeroCount>(actions));
    if (recorder) {
      recorder->record_transition(actions, r, s.events);
      recorder->record_state(s);
    }
    blue.after_step(s, Team::blue, r);
    red.after_step(s, Team::red, r);
  }
  GameSummary out;
  out.winner = s.winner;
  out.length = s.frame;
  out.crystal_hp = {s.crystal(Team::blue)->hp, s.crystal(Team::red)->hp};
  return out;
}

inline TrajectoryHeader make_header(const GameSetup& setup, const Controller& blue, const Controller& red) {
  TrajectoryHeader h;
  h.lineups = setup.lineups;
  h.seed = setup.seed;
  h.env = setup.env ? *setup.env : EnvConfig{};
  h.agents = {blue.id(), red.id()};
  h.label = setup.label;
  return h;
}

}  // namespace macrogoal::sim
