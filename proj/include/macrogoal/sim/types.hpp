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
#include <optional>
#include <string>
#include <string_view>

#include "macrogoal/core/error.hpp"

namespace macrogoal::sim {

enum class Team : std::uint8_t { blue = 0, red = 1, neutral = 2 };

inline Team opponent(Team t) { return t == Team::blue ? Team::red : Team::blue; }
inline int team_index(Team t) { return static_cast<int>(t); }

inline const char* to_string(Team t) {
  switch (t) {
    case Team::blue: return "blue";
    case Team::red: return "red";
    case Team::neutral: return "neutral";
  }
  return "?";
}

enum class HeroRole : std::uint8_t { marksman = 0, mage, warrior, tank, assassin, supporter };
inline constexpr int kRoleCount = 6;
inline constexpr int kTeamSize = 5;
inline constexpr int kHeroCount = 2 * kTeamSize;

inline const char* to_string(HeroRole r) {
  static constexpr const char* names[] = {"marksman", "mage", "warrior", "tank", "assassin", "supporter"};
  return names[static_cast<int>(r)];
}

inline HeroRole role_from_string(std::string_view s) {
  for (int i = 0; i < kRoleCount; ++i)
    if (s == to_string(static_cast<HeroRole>(i))) return static_cast<HeroRole>(i);
  fail(ErrorKind::invalid_lineup, "unknown hero role '" + std::string(s) + "'");
}

using Lineup = std::array<HeroRole, kTeamSize>;

enum class UnitKind : std::uint8_t { hero = 0, minion, monster, turret, crystal };

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

/// The eight neighbourhood directions, counter-clockwise from east.
inline constexpr std::array<Cell, 8> kDirections = {
    Cell{1, 0}, Cell{1, 1}, Cell{0, 1}, Cell{-1, 1}, Cell{-1, 0}, Cell{-1, -1}, Cell{0, -1}, Cell{1, -1}};

struct Unit {
  int id = 0;
  UnitKind kind = UnitKind::hero;
  Team team = Team::neutral;
  Cell position;
  int hp = 0;
  int max_hp = 1;
  int attack = 0;
  int range = 1;
  int gold_bounty = 0;
  int xp_bounty = 0;
  // heroes
  HeroRole role = HeroRole::marksman;
  int slot = 0;
  int gold = 0;
  int level = 1;
  int xp = 0;
  std::optional<int> respawn_at;
  // minions follow a lane path, monsters guard a camp
  int lane = -1;
  int path_index = 0;
  int camp = -1;
  int aggro = -1;

  bool alive() const { return hp > 0; }
};

struct HeroAction {
  enum class Kind : std::uint8_t { noop = 0, move, attack };
  Kind kind = Kind::noop;
  int direction = 0;  // index into kDirections for move
  int target = -1;    // unit id for attack

  static HeroAction noop() { return {}; }
  static HeroAction move(int dir) { return {Kind::move, dir, -1}; }
  static HeroAction attack_unit(int id) { return {Kind::attack, 0, id}; }

  friend bool operator==(const HeroAction&, const HeroAction&) = default;
};

enum class RewardHead : std::uint8_t { farming = 0, kda, damage, pushing, win_lose, goal };
inline constexpr int kRewardHeads = 6;
inline constexpr std::array<const char*, kRewardHeads> kRewardHeadNames = {"farming", "kda",      "damage",
                                                                           "pushing", "win_lose", "goal"};

struct RewardVector {
  std::array<double, kRewardHeads> heads{};
  double& operator[](RewardHead h) { return heads[static_cast<int>(h)]; }
  double operator[](RewardHead h) const { return heads[static_cast<int>(h)]; }
};

}  // namespace macrogoal::sim
