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
#include <cstdint>

#include <json.hpp>

#include "macrogoal/core/error.hpp"
#include "macrogoal/sim/types.hpp"

namespace macrogoal::sim {

struct UnitStats {
  int hp = 100;
  int attack = 10;
  int range = 1;
  int gold_bounty = 0;
  int xp_bounty = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(UnitStats, hp, attack, range, gold_bounty, xp_bounty)

struct RewardWeights {
  double gold = 0.01;             // farming, per gold earned
  double xp = 0.005;              // farming, per xp earned
  double kill = 1.0;              // kda
  double death = 0.5;             // kda, subtracted
  double hero_damage = 0.002;     // damage, per hp dealt to enemy heroes
  double structure_damage = 0.002;// pushing, per hp dealt to turrets and crystals
  double turret_kill = 1.0;       // pushing, shared by the team that destroys a turret
  double win = 5.0;               // win_lose, terminal frame only
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RewardWeights, gold, xp, kill, death, hero_damage, structure_damage,
                                                turret_kill, win)

/// Every map constant, unit stat, reward weight and timer of the environment.
/// Serialised as the environment config JSON document.
struct EnvConfig {
  int width = 24;
  int height = 24;
  int max_frames = 2000;
  int frames_per_second = 12;
  int hero_respawn_delay = 50;
  int monster_respawn_delay = 200;
  int minion_wave_interval = 90;
  int first_wave_frame = 10;
  int minion_wave_size = 3;
  int starting_gold = 300;
  int xp_per_level = 120;
  int max_level = 8;
  int xp_share_radius = 3;
  double level_growth = 0.08;   // +8% max hp and attack per level
  double base_regen = 0.05;     // fraction of max hp healed per frame inside the allied base
  int monster_leash = 3;        // monsters reset when no hero is within this distance of their camp
  std::array<UnitStats, kRoleCount> roles = {
      UnitStats{300, 30, 3, 100, 60},  // marksman
      UnitStats{280, 32, 3, 100, 60},  // mage
      UnitStats{450, 22, 1, 100, 60},  // warrior
      UnitStats{600, 14, 1, 100, 60},  // tank
      UnitStats{350, 34, 1, 100, 60},  // assassin
      UnitStats{400, 10, 2, 100, 60},  // supporter
  };
  UnitStats minion{100, 8, 1, 20, 20};
  UnitStats monster{240, 10, 1, 70, 50};
  UnitStats turret{900, 45, 2, 120, 60};
  UnitStats crystal{1500, 50, 2, 0, 0};
  RewardWeights rewards;
  std::uint64_t seed = 0;

  void validate() const {
    require(width == 24 && height == 24, ErrorKind::config, "map must be 24x24 cells");
    require(max_frames >= 1, ErrorKind::config, "max_frames must be >= 1");
    require(frames_per_second >= 1, ErrorKind::config, "frames_per_second must be >= 1");
    require(hero_respawn_delay >= 1 && monster_respawn_delay >= 1, ErrorKind::config, "respawn delays must be >= 1");
    require(minion_wave_interval >= 1 && minion_wave_size >= 0, ErrorKind::config, "invalid minion wave settings");
    require(starting_gold >= 0 && xp_per_level >= 1 && max_level >= 1, ErrorKind::config, "invalid economy settings");
    for (const auto& r : roles)
      require(r.hp > 0 && r.attack >= 0 && r.range >= 1, ErrorKind::config, "invalid hero role stats");
  }

  int seconds_to_frames(double seconds) const {
    return static_cast<int>(seconds * frames_per_second + 0.5);
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EnvConfig, width, height, max_frames, frames_per_second,
                                                hero_respawn_delay, monster_respawn_delay, minion_wave_interval,
                                                first_wave_frame, minion_wave_size, starting_gold, xp_per_level,
                                                max_level, xp_share_radius, level_growth, base_regen, monster_leash,
                                                roles, minion, monster, turret, crystal, rewards, seed)

}  // namespace macrogoal::sim
