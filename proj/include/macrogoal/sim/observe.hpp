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

#include <algorithm>
#include <vector>

#include "macrogoal/sim/game.hpp"

namespace macrogoal::sim {

// Observation layout (all entries in [0, 1] or one-hot), seen from the hero's
// team frame so red and blue heroes share one encoding:
//   [  0, 27) self: x, y, hp, alive, level, respawn timer, gold, role(6), slot(5), region(9)
//   [ 27, 54) per team-relative region: dx, dy, distance to its nearest cell
//   [ 54, 70) 4 allies by slot: dx, dy, hp, alive
//   [ 70, 95) 5 enemy heroes by slot: dx, dy, hp, alive, in attack range
//   [ 95,107) 3 nearest enemy minions: dx, dy, hp, present
//   [107,119) 3 nearest allied minions
//   [119,127) 2 nearest enemy structures
//   [127,131) nearest allied structure
//   [131,147) 4 camps (near top, near bot, far top, far bot): dx, dy, hp, alive
//   [147,151) flags: farm target / hero target / structure target in range, under enemy tower
//   [151,153) game clock, team gold
// Offsets are encoded as (d / 23 + 1) / 2.
inline constexpr int kObservationWidth = 153;
inline constexpr int kObsSelfHp = 2;
inline constexpr int kObsSelfAlive = 3;
inline constexpr int kObsCampBase = 131;
inline constexpr int kObsFlagBase = 147;

namespace detail {

inline double offset01(int d) { return (static_cast<double>(d) / (kMapSize - 1) + 1.0) * 0.5; }
inline double ratio(int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; }
inline double clip01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

class ObsWriter {
 public:
  explicit ObsWriter(std::vector<double>& out) : out_(out) {}
  void put(double v) { out_.push_back(v); }
  void one_hot(int index, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(i == index ? 1.0 : 0.0);
  }
  void zeros(int n) { out_.insert(out_.end(), n, 0.0); }

 private:
  std::vector<double>& out_;
};

}  // namespace detail

/// Fixed-length observation for one hero.
inline std::vector<double> observe(const GameState& s, int hero_id) {
  using detail::offset01;
  using detail::ratio;
  const Unit& me = s.hero(hero_id);
  const Team team = me.team;
  const EnvConfig& cfg = s.cfg();
  const MapLayout& map = s.layout();
  const Cell here = to_team_frame(me.position, team);

  std::vector<double> out;
  out.reserve(kObservationWidth);
  detail::ObsWriter w(out);
  auto rel = [&](Cell abs) {
    const Cell c = to_team_frame(abs, team);
    w.put(offset01(c.x - here.x));
    w.put(offset01(c.y - here.y));
  };

  w.put(static_cast<double>(here.x) / (kMapSize - 1));
  w.put(static_cast<double>(here.y) / (kMapSize - 1));
  w.put(ratio(me.hp, me.max_hp));
  w.put(me.alive() ? 1.0 : 0.0);
  w.put(ratio(me.level, cfg.max_level));
  w.put(me.respawn_at ? detail::clip01(ratio(*me.respawn_at - s.frame, cfg.hero_respawn_delay)) : 0.0);
  w.put(detail::clip01(me.gold / 3000.0));
  w.one_hot(static_cast<int>(me.role), kRoleCount);
  w.one_hot(me.slot, kTeamSize);
  w.one_hot(map.region_of(me.position, team), kRegionCount);

  for (int r = 0; r < kRegionCount; ++r) {
    const Cell target = map.nearest_cell(me.position, r, team);
    rel(target);
    w.put(static_cast<double>(chebyshev(target, me.position)) / (kMapSize - 1));
  }

  for (int k = 0; k < kTeamSize; ++k) {
    if (k == me.slot) continue;
    const Unit& a = s.units[GameState::hero_id(team, k)];
    if (!a.alive()) {
      w.zeros(4);
      continue;
    }
    rel(a.position);
    w.put(ratio(a.hp, a.max_hp));
    w.put(1.0);
  }
  for (int k = 0; k < kTeamSize; ++k) {
    const Unit& e = s.units[GameState::hero_id(opponent(team), k)];
    if (!e.alive()) {
      w.zeros(5);
      continue;
    }
    rel(e.position);
    w.put(ratio(e.hp, e.max_hp));
    w.put(1.0);
    w.put(chebyshev(e.position, me.position) <= me.range ? 1.0 : 0.0);
  }

  auto nearest = [&](auto pred, int count) {
    std::vector<const Unit*> found;
    for (const Unit& u : s.units)
      if (u.alive() && pred(u)) found.push_back(&u);
    std::stable_sort(found.begin(), found.end(), [&](const Unit* a, const Unit* b) {
      return chebyshev(a->position, me.position) < chebyshev(b->position, me.position);
    });
    for (int i = 0; i < count; ++i) {
      if (i < static_cast<int>(found.size())) {
        rel(found[i]->position);
        w.put(ratio(found[i]->hp, found[i]->max_hp));
        w.put(1.0);
      } else {
        w.zeros(4);
      }
    }
  };
  auto is_structure = [](const Unit& u) { return u.kind == UnitKind::turret || u.kind == UnitKind::crystal; };
  nearest([&](const Unit& u) { return u.kind == UnitKind::minion && u.team != team; }, 3);
  nearest([&](const Unit& u) { return u.kind == UnitKind::minion && u.team == team; }, 3);
  nearest([&](const Unit& u) { return is_structure(u) && u.team == opponent(team); }, 2);
  nearest([&](const Unit& u) { return is_structure(u) && u.team == team; }, 1);

  std::array<const Unit*, kCampCount> camps{};
  for (const Unit& u : s.units)
    if (u.kind == UnitKind::monster && u.alive()) camps[MapLayout::camp_to_team_order(u.camp, team)] = &u;
  for (const Unit* m : camps) {
    if (m == nullptr) {
      w.zeros(4);
      continue;
    }
    rel(m->position);
    w.put(ratio(m->hp, m->max_hp));
    w.put(1.0);
  }

  bool farm = false, hero_t = false, structure = false, under_tower = false;
  if (me.alive()) {
    for (const Unit& u : s.units) {
      if (!u.alive() || u.team == team) continue;
      const int d = chebyshev(u.position, me.position);
      if (d <= me.range) {
        farm |= (u.kind == UnitKind::minion || u.kind == UnitKind::monster);
        hero_t |= u.kind == UnitKind::hero;
        structure |= is_structure(u);
      }
      if (is_structure(u) && d <= u.range) under_tower = true;
    }
  }
  w.put(farm);
  w.put(hero_t);
  w.put(structure);
  w.put(under_tower);
  w.put(detail::clip01(ratio(s.frame, cfg.max_frames)));
  w.put(detail::clip01(s.team_gold(team) / 10000.0));
  require(static_cast<int>(out.size()) == kObservationWidth, ErrorKind::shape, "observation width drifted");
  return out;
}

}  // namespace macrogoal::sim
