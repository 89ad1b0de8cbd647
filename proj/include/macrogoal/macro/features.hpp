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

#include <vector>

#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/sim/observe.hpp"

namespace macrogoal::macro {

// Team-level state features consumed by the Meta-Controller, laid out as
// [game stats | unit slots | lineup] to match its network input order.
inline constexpr int kStatsWidth = 16;
inline constexpr int kUnitSlots = 28;  // 10 heroes, 2 x (6 turrets + crystal), 4 camps
inline constexpr int kUnitWidth = 19;
inline constexpr int kLineupWidth = sim::kTeamSize * sim::kRoleCount;
inline constexpr int kTeamFeatureWidth = kStatsWidth + kUnitSlots * kUnitWidth + kLineupWidth;
inline constexpr int kUnitsOffset = kStatsWidth;
inline constexpr int kLineupOffset = kStatsWidth + kUnitSlots * kUnitWidth;

inline std::vector<double> lineup_one_hot(const sim::Lineup& lineup) {
  std::vector<double> v(kLineupWidth, 0.0);
  for (int k = 0; k < sim::kTeamSize; ++k) v[k * sim::kRoleCount + static_cast<int>(lineup[k])] = 1.0;
  return v;
}

inline std::vector<double> team_features(const sim::GameState& s, sim::Team team) {
  using sim::Unit;
  using sim::UnitKind;
  const sim::Team enemy = sim::opponent(team);
  const sim::EnvConfig& cfg = s.cfg();
  std::vector<double> out;
  out.reserve(kTeamFeatureWidth);

  const MacroState mine = extract_macro_state(s, team);
  const MacroState theirs = extract_macro_state(s, enemy);
  auto turrets_alive = [&](sim::Team t) {
    int n = 0;
    for (const Unit& u : s.units) n += (u.kind == UnitKind::turret && u.team == t && u.alive());
    return n;
  };
  auto crystal_ratio = [&](sim::Team t) {
    const Unit* c = s.crystal(t);
    return c ? static_cast<double>(c->hp) / c->max_hp : 0.0;
  };
  out.push_back(std::min(1.0, static_cast<double>(s.frame) / cfg.max_frames));
  for (const MacroState* m : {&mine, &theirs})
    for (int d = kGoldBucket; d < kMacroDim; ++d)
      out.push_back(static_cast<double>((*m)[d]) / (kMacroArity[d] - 1));
  out.push_back(turrets_alive(team) / 6.0);
  out.push_back(turrets_alive(enemy) / 6.0);
  out.push_back(crystal_ratio(team));
  out.push_back(crystal_ratio(enemy));
  out.push_back(std::min(1.0, s.team_gold(team) / 10000.0));

  auto put_unit = [&](const Unit* u, bool keep_identity_when_dead) {
    const std::size_t start = out.size();
    out.resize(start + kUnitWidth, 0.0);
    if (u == nullptr) return;
    double* f = out.data() + start;
    const bool alive = u->alive();
    if (!alive && !keep_identity_when_dead) return;
    f[0] = alive ? 1.0 : 0.0;
    f[1] = u->team == team;
    f[2] = u->team == enemy;
    f[3] = u->team == sim::Team::neutral;
    f[4] = u->kind == UnitKind::hero;
    f[5] = u->kind == UnitKind::turret || u->kind == UnitKind::crystal;
    f[6] = u->kind == UnitKind::monster;
    f[7] = u->kind == UnitKind::crystal;
    if (u->kind == UnitKind::hero) f[8 + static_cast<int>(u->role)] = 1.0;
    if (!alive) return;
    const sim::Cell c = sim::to_team_frame(u->position, team);
    f[14] = static_cast<double>(c.x) / (sim::kMapSize - 1);
    f[15] = static_cast<double>(c.y) / (sim::kMapSize - 1);
    f[16] = static_cast<double>(u->hp) / u->max_hp;
    f[17] = u->kind == UnitKind::hero ? static_cast<double>(u->level) / cfg.max_level : 0.0;
    f[18] = u->kind == UnitKind::hero ? std::min(1.0, u->gold / 3000.0) : 0.0;
  };

  for (sim::Team t : {team, enemy})
    for (int k = 0; k < sim::kTeamSize; ++k) put_unit(&s.units[sim::GameState::hero_id(t, k)], true);
  for (sim::Team t : {team, enemy}) {
    // turrets by (lane, inner/outer) in spawn order, then the crystal
    std::array<const Unit*, 7> slots{};
    for (const Unit& u : s.units)
      if (u.kind == UnitKind::turret && u.team == t) {
        // turret ids are allocated lane-major at game start; recover the slot from the id
        const int first = sim::kHeroCount + 2 + (t == sim::Team::red ? 6 : 0);
        const int idx = u.id - first;
        if (idx >= 0 && idx < 6) slots[idx] = &u;
      }
    slots[6] = s.crystal(t);
    for (const Unit* u : slots) put_unit(u, false);
  }
  std::array<const Unit*, sim::kCampCount> camps{};
  for (const Unit& u : s.units)
    if (u.kind == UnitKind::monster && u.alive()) camps[sim::MapLayout::camp_to_team_order(u.camp, team)] = &u;
  for (const Unit* u : camps) put_unit(u, false);

  const auto lineup = lineup_one_hot(s.lineups[sim::team_index(team)]);
  out.insert(out.end(), lineup.begin(), lineup.end());
  require(static_cast<int>(out.size()) == kTeamFeatureWidth, ErrorKind::shape, "team feature width drifted");
  return out;
}

}  // namespace macrogoal::macro
