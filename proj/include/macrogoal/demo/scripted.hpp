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

#include "macrogoal/core/rng.hpp"
#include "macrogoal/sim/controller.hpp"
#include "macrogoal/sim/game.hpp"

namespace macrogoal::demo {

using sim::HeroAction;
using sim::HeroRole;
using sim::RelRegion;

enum class StrategyId { three_lane = 0, marksman_core, resource_grab };
inline constexpr int kStrategyCount = 3;

inline const char* to_string(StrategyId id) {
  switch (id) {
    case StrategyId::three_lane: return "three_lane";
    case StrategyId::marksman_core: return "marksman_core";
    case StrategyId::resource_grab: return "resource_grab";
  }
  return "?";
}

inline StrategyId strategy_from_string(const std::string& s) {
  for (int i = 0; i < kStrategyCount; ++i)
    if (s == to_string(static_cast<StrategyId>(i))) return static_cast<StrategyId>(i);
  fail(ErrorKind::config, "unknown strategy '" + s + "'");
}

/// The lineup each strategy is built around.
inline sim::Lineup canonical_lineup(StrategyId id) {
  switch (id) {
    case StrategyId::three_lane:
      return {HeroRole::marksman, HeroRole::mage, HeroRole::warrior, HeroRole::assassin, HeroRole::supporter};
    case StrategyId::marksman_core:
      return {HeroRole::marksman, HeroRole::supporter, HeroRole::warrior, HeroRole::assassin, HeroRole::supporter};
    case StrategyId::resource_grab:
      return {HeroRole::marksman, HeroRole::mage, HeroRole::tank, HeroRole::assassin, HeroRole::supporter};
  }
  return {};
}

enum class TargetClass { minion, monster, hero, structure };

struct RoleRule {
  std::vector<RelRegion> objectives;        // ordered region objectives
  int cycle_frames = 0;                     // > 0: rotate through objectives every cycle_frames
  int early_until = 0;                      // frames during which early_objectives apply
  std::vector<RelRegion> early_objectives;
  std::optional<HeroRole> escort;           // stay next to the first ally with this role
  std::vector<TargetClass> priorities;      // attack order for targets in range
  std::optional<HeroRole> early_escort;     // replaces escort while early_until applies
};

struct ScriptedStrategy {
  StrategyId id = StrategyId::three_lane;
  std::array<RoleRule, sim::kRoleCount> rules;

  const RoleRule& rule(HeroRole r) const { return rules[static_cast<int>(r)]; }
};

inline constexpr int kResourceGrabEarlyWindow = 240;

inline RoleRule role_rule(std::vector<RelRegion> objectives, std::vector<TargetClass> priorities,
                          std::optional<HeroRole> escort = std::nullopt) {
  RoleRule r;
  r.objectives = std::move(objectives);
  r.priorities = std::move(priorities);
  r.escort = escort;
  return r;
}

inline ScriptedStrategy make_strategy(StrategyId id) {
  using T = TargetClass;
  ScriptedStrategy s;
  s.id = id;
  auto& r = s.rules;
  r[static_cast<int>(HeroRole::marksman)] = role_rule({RelRegion::lane_bot}, {T::minion, T::hero, T::structure});
  r[static_cast<int>(HeroRole::mage)] = role_rule({RelRegion::lane_mid}, {T::minion, T::hero, T::structure});
  r[static_cast<int>(HeroRole::warrior)] = role_rule({RelRegion::lane_top}, {T::hero, T::minion, T::structure});
  r[static_cast<int>(HeroRole::tank)] = role_rule({RelRegion::lane_top}, {T::hero, T::minion, T::structure});
  r[static_cast<int>(HeroRole::assassin)] = role_rule(
      {RelRegion::jungle_top_near, RelRegion::jungle_bot_near, RelRegion::lane_mid}, {T::monster, T::hero, T::minion});
  r[static_cast<int>(HeroRole::supporter)] = role_rule({RelRegion::lane_bot}, {T::hero}, HeroRole::marksman);
  switch (id) {
    case StrategyId::three_lane: break;
    case StrategyId::marksman_core:
      // the marksman takes both the middle and the bottom lane
      r[static_cast<int>(HeroRole::marksman)].objectives = {RelRegion::lane_mid, RelRegion::lane_bot};
      r[static_cast<int>(HeroRole::marksman)].cycle_frames = 150;
      break;
    case StrategyId::resource_grab:
      r[static_cast<int>(HeroRole::assassin)].early_until = kResourceGrabEarlyWindow;
      r[static_cast<int>(HeroRole::assassin)].early_objectives = {RelRegion::jungle_bot_far,
                                                                  RelRegion::jungle_top_far};
      // the supporter joins the invasion
      r[static_cast<int>(HeroRole::supporter)].early_until = kResourceGrabEarlyWindow;
      r[static_cast<int>(HeroRole::supporter)].early_escort = HeroRole::assassin;
      r[static_cast<int>(HeroRole::supporter)].priorities = {T::monster, T::hero};
      break;
  }
  return s;
}

namespace detail {

inline bool is_jungle(RelRegion r) {
  return r == RelRegion::jungle_top_near || r == RelRegion::jungle_bot_near || r == RelRegion::jungle_top_far ||
         r == RelRegion::jungle_bot_far;
}

inline int lane_of(RelRegion r) { return static_cast<int>(r); }

// Absolute camp index that lies in a team-relative jungle region.
inline int camp_of(RelRegion r, sim::Team team) {
  const int order = static_cast<int>(r) - static_cast<int>(RelRegion::jungle_top_near);
  return sim::MapLayout::camp_from_team_order(order, team);
}

inline const sim::Unit* camp_monster(const sim::GameState& s, int camp) {
  for (const auto& u : s.units)
    if (u.kind == sim::UnitKind::monster && u.camp == camp && u.alive()) return &u;
  return nullptr;
}

// Where a hero stands to work a lane: just behind the most advanced allied
// minion, or at its own outer turret between waves.
inline sim::Cell lane_anchor(const sim::GameState& s, const sim::Unit& hero, int lane) {
  const auto& path = s.layout().lane_path(lane, hero.team);
  int front = -1;
  for (const auto& u : s.units)
    if (u.kind == sim::UnitKind::minion && u.team == hero.team && u.lane == lane && u.alive())
      front = std::max(front, u.path_index);
  if (front < 0) return s.layout().turrets(hero.team)[lane][1];
  const int back = hero.range > 1 ? 1 : 0;
  return path[std::max(0, front - back)];
}

inline bool exposed_to_tower(const sim::GameState& s, const sim::Unit& hero, sim::Cell c) {
  for (const auto& u : s.units) {
    if ((u.kind != sim::UnitKind::turret && u.kind != sim::UnitKind::crystal) || u.team == hero.team || !u.alive())
      continue;
    if (chebyshev(u.position, c) > u.range) continue;
    bool covered = false;
    for (const auto& m : s.units)
      if (m.kind == sim::UnitKind::minion && m.team == hero.team && m.alive() && chebyshev(m.position, u.position) <= u.range)
        covered = true;
    if (!covered) return true;
  }
  return false;
}

inline HeroAction step_toward(const sim::GameState& s, const sim::Unit& hero, sim::Cell goal, bool careful) {
  if (hero.position == goal) return HeroAction::noop();
  int best = -1;
  int best_d = sim::chebyshev(hero.position, goal);
  int best_e = 1 << 20;
  for (int d = 0; d < 8; ++d) {
    const sim::Cell n{hero.position.x + sim::kDirections[d].x, hero.position.y + sim::kDirections[d].y};
    if (!sim::MapLayout::in_bounds(n)) continue;
    if (careful && exposed_to_tower(s, hero, n)) continue;
    const int dc = sim::chebyshev(n, goal);
    const int de = (n.x - goal.x) * (n.x - goal.x) + (n.y - goal.y) * (n.y - goal.y);
    if (dc < best_d || (dc == best_d && de < best_e && dc < sim::chebyshev(hero.position, goal))) {
      best = d;
      best_d = dc;
      best_e = de;
    }
  }
  return best < 0 ? HeroAction::noop() : HeroAction::move(best);
}

inline const sim::Unit* best_target(const sim::GameState& s, const sim::Unit& hero, TargetClass cls) {
  const sim::Unit* best = nullptr;
  for (const auto& u : s.units) {
    if (!u.alive() || u.team == hero.team || sim::chebyshev(u.position, hero.position) > hero.range) continue;
    bool match = false;
    switch (cls) {
      case TargetClass::minion: match = u.kind == sim::UnitKind::minion; break;
      case TargetClass::monster: match = u.kind == sim::UnitKind::monster; break;
      case TargetClass::hero: match = u.kind == sim::UnitKind::hero; break;
      case TargetClass::structure:
        match = (u.kind == sim::UnitKind::turret || u.kind == sim::UnitKind::crystal) && !exposed_to_tower(s, hero, hero.position);
        break;
    }
    if (!match) continue;
    if (best == nullptr || u.hp < best->hp || (u.hp == best->hp && u.id < best->id)) best = &u;
  }
  return best;
}

}  // namespace detail

/// Deterministic rule-table action for one hero.
inline HeroAction scripted_policy_act(const ScriptedStrategy& strategy, const sim::GameState& s, int hero_id) {
  const sim::Unit& hero = s.hero(hero_id);
  if (!hero.alive()) return HeroAction::noop();
  const sim::Team team = hero.team;
  const auto& map = s.layout();
  const int here = map.region_of(hero.position, team);
  const bool in_base = here == static_cast<int>(RelRegion::base_ally);

  // retreat to heal
  if (hero.hp * 10 < hero.max_hp * 3 || (in_base && hero.hp * 10 < hero.max_hp * 9))
    return detail::step_toward(s, hero, map.spawn(team), false);

  const RoleRule& rule = strategy.rule(hero.role);
  for (TargetClass cls : rule.priorities)
    if (const sim::Unit* t = detail::best_target(s, hero, cls)) return HeroAction::attack_unit(t->id);

  const bool early = rule.early_until > 0 && s.frame < rule.early_until;
  const std::optional<HeroRole> escort = early && rule.early_escort ? rule.early_escort : rule.escort;
  if (escort) {
    for (int k = 0; k < sim::kTeamSize; ++k) {
      const sim::Unit& ally = s.units[sim::GameState::hero_id(team, k)];
      if (ally.role != *escort || ally.id == hero.id) continue;
      if (!ally.alive()) break;
      if (sim::chebyshev(ally.position, hero.position) <= 1) return HeroAction::noop();
      return detail::step_toward(s, hero, ally.position, true);
    }
  }

  auto take_camp = [&](RelRegion obj) -> std::optional<HeroAction> {
    const sim::Unit* m = detail::camp_monster(s, detail::camp_of(obj, team));
    if (m == nullptr) return std::nullopt;
    if (sim::chebyshev(m->position, hero.position) <= hero.range) return HeroAction::attack_unit(m->id);
    return detail::step_toward(s, hero, m->position, true);
  };

  if (early && !rule.early_objectives.empty()) {
    for (RelRegion obj : rule.early_objectives)
      if (detail::is_jungle(obj))
        if (auto a = take_camp(obj)) return *a;
    // early camps are down: clear the regular jungle, then wait at the early
    // camp that respawns first
    for (RelRegion obj : rule.objectives)
      if (detail::is_jungle(obj))
        if (auto a = take_camp(obj)) return *a;
    int wait_camp = -1;
    for (RelRegion obj : rule.early_objectives) {
      if (!detail::is_jungle(obj)) continue;
      const int c = detail::camp_of(obj, team);
      if (wait_camp < 0 || s.camp_respawn_at[c] < s.camp_respawn_at[wait_camp]) wait_camp = c;
    }
    if (wait_camp >= 0 && s.camp_respawn_at[wait_camp] < rule.early_until)
      return detail::step_toward(s, hero, map.camp(wait_camp), true);
  }

  const auto& objectives = rule.objectives;
  std::size_t first = 0;
  if (rule.cycle_frames > 0 && !objectives.empty()) first = (s.frame / rule.cycle_frames) % objectives.size();
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const RelRegion obj = objectives[(first + i) % objectives.size()];
    if (detail::is_jungle(obj)) {
      if (auto a = take_camp(obj)) return *a;
      continue;
    }
    if (obj == RelRegion::lane_top || obj == RelRegion::lane_mid || obj == RelRegion::lane_bot)
      return detail::step_toward(s, hero, detail::lane_anchor(s, hero, detail::lane_of(obj)), true);
    return detail::step_toward(s, hero, map.nearest_cell(hero.position, static_cast<int>(obj), team), true);
  }
  return HeroAction::noop();
}

/// Scripted team controller; with probability `noise` a hero takes a uniformly
/// random legal move instead of the rule-table action.
class ScriptedController : public sim::Controller {
 public:
  explicit ScriptedController(StrategyId id, double noise = 0.0) : strategy_(make_strategy(id)), noise_(noise) {}

  std::string id() const override { return std::string("scripted:") + to_string(strategy_.id); }

  void begin(const sim::GameState&, sim::Team, std::uint64_t seed) override { rng_ = Rng(seed); }

  void act(const sim::GameState& s, sim::Team team, sim::TeamActions& out) override {
    for (int k = 0; k < sim::kTeamSize; ++k) {
      const int id = sim::GameState::hero_id(team, k);
      out[k] = scripted_policy_act(strategy_, s, id);
      if (noise_ > 0.0 && rng_.uniform() < noise_ && s.hero(id).alive()) {
        std::vector<HeroAction> moves;
        for (const auto& a : sim::legal_actions(s, id))
          if (a.kind == HeroAction::Kind::move) moves.push_back(a);
        if (!moves.empty()) out[k] = moves[rng_.below(moves.size())];
      }
    }
  }

  const ScriptedStrategy& strategy() const { return strategy_; }

 private:
  ScriptedStrategy strategy_;
  double noise_;
  Rng rng_;
};

}  // namespace macrogoal::demo
