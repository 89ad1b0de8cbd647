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
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/sim/config.hpp"
#include "macrogoal/sim/map_layout.hpp"
#include "macrogoal/sim/types.hpp"

namespace macrogoal::sim {

/// Cumulative per-team resource counters read by the macro-state extractor.
struct TeamStats {
  int monsters_taken = 0;     // monsters last-hit by the team's heroes
  int minions_killed = 0;     // enemy minions last-hit by the team's heroes
  int turrets_destroyed = 0;  // enemy turrets destroyed by any unit of the team
  friend bool operator==(const TeamStats&, const TeamStats&) = default;
};

struct KillEvent {
  int frame = 0;
  int killer = -1;  // unit id, -1 when unknown
  UnitKind killer_kind = UnitKind::hero;
  int victim = 0;
  UnitKind victim_kind = UnitKind::minion;
  Team victim_team = Team::neutral;
  int gold = 0;   // gold credited to the killer (heroes only)
  int camp = -1;  // absolute camp index for monsters
};

struct GameState {
  int frame = 0;
  std::vector<Unit> units;  // sorted by id; heroes occupy ids 0..9
  int next_id = 0;
  std::uint64_t rng_state = 0;
  bool done = false;
  std::optional<Team> winner;
  std::array<Lineup, 2> lineups{};
  std::array<TeamStats, 2> stats{};
  std::array<int, kCampCount> camp_respawn_at{-1, -1, -1, -1};
  std::vector<KillEvent> events;  // kills resolved during the last step
  std::shared_ptr<const EnvConfig> config;

  const MapLayout& layout() const { return MapLayout::instance(); }
  const EnvConfig& cfg() const { return *config; }

  const Unit* find(int id) const {
    if (id >= 0 && id < kHeroCount && static_cast<int>(units.size()) >= kHeroCount) return &units[id];
    auto it = std::lower_bound(units.begin(), units.end(), id, [](const Unit& u, int v) { return u.id < v; });
    return (it != units.end() && it->id == id) ? &*it : nullptr;
  }
  Unit* find(int id) { return const_cast<Unit*>(static_cast<const GameState&>(*this).find(id)); }

  const Unit& hero(int id) const {
    require(id >= 0 && id < kHeroCount, ErrorKind::not_found, "unknown hero id " + std::to_string(id));
    return units[id];
  }
  Unit& hero(int id) { return const_cast<Unit&>(static_cast<const GameState&>(*this).hero(id)); }

  static int hero_id(Team team, int slot) { return team_index(team) * kTeamSize + slot; }

  const Unit* crystal(Team team) const {
    for (const Unit& u : units)
      if (u.kind == UnitKind::crystal && u.team == team) return &u;
    return nullptr;
  }

  int team_gold(Team team) const {
    int g = 0;
    for (int s = 0; s < kTeamSize; ++s) g += units[hero_id(team, s)].gold;
    return g;
  }
};

inline int scaled_stat(int base, int level, double growth) {
  return static_cast<int>(std::floor(base * (1.0 + growth * (level - 1)) + 1e-9));
}

namespace detail {

inline Unit make_hero(const EnvConfig& cfg, int id, Team team, int slot, HeroRole role) {
  const UnitStats& st = cfg.roles[static_cast<int>(role)];
  Unit u;
  u.id = id;
  u.kind = UnitKind::hero;
  u.team = team;
  u.position = MapLayout::instance().spawn(team);
  u.max_hp = st.hp;
  u.hp = st.hp;
  u.attack = st.attack;
  u.range = st.range;
  u.gold_bounty = st.gold_bounty;
  u.xp_bounty = st.xp_bounty;
  u.role = role;
  u.slot = slot;
  u.gold = cfg.starting_gold;
  return u;
}

inline Unit make_unit(int id, UnitKind kind, Team team, Cell pos, const UnitStats& st) {
  Unit u;
  u.id = id;
  u.kind = kind;
  u.team = team;
  u.position = pos;
  u.max_hp = st.hp;
  u.hp = st.hp;
  u.attack = st.attack;
  u.range = st.range;
  u.gold_bounty = st.gold_bounty;
  u.xp_bounty = st.xp_bounty;
  return u;
}

inline bool hostile(const Unit& a, const Unit& b) { return a.team != b.team; }

// Whether a can legally target b: monsters are fair game for heroes only,
// and monsters never fight minions or structures.
inline bool can_target(const Unit& a, const Unit& b) {
  if (!b.alive() || !hostile(a, b)) return false;
  if (b.kind == UnitKind::monster || a.kind == UnitKind::monster) return a.kind == UnitKind::hero || b.kind == UnitKind::hero;
  return true;
}

class Stepper {
 public:
  Stepper(GameState& s, std::span<RewardVector, kHeroCount> rewards) : s_(s), cfg_(s.cfg()), rewards_(rewards) {}

  void deal_damage(Unit& attacker, Unit& target, int amount) {
    if (!target.alive() || amount <= 0) return;
    const int dealt = std::min(target.hp, amount);
    target.hp -= dealt;
    if (attacker.kind == UnitKind::hero) {
      RewardVector& r = rewards_[attacker.id];
      if (target.kind == UnitKind::hero) r[RewardHead::damage] += dealt * cfg_.rewards.hero_damage;
      if (target.kind == UnitKind::turret || target.kind == UnitKind::crystal)
        r[RewardHead::pushing] += dealt * cfg_.rewards.structure_damage;
      if (target.kind == UnitKind::monster) target.aggro = attacker.id;
    }
    if (!target.alive()) on_death(attacker, target);
  }

  void credit_gold(Unit& hero, int gold) {
    hero.gold += gold;
    rewards_[hero.id][RewardHead::farming] += gold * cfg_.rewards.gold;
  }

  void credit_xp(Unit& hero, int xp) {
    if (xp <= 0) return;
    hero.xp += xp;
    rewards_[hero.id][RewardHead::farming] += xp * cfg_.rewards.xp;
    const int level = std::min(cfg_.max_level, 1 + hero.xp / cfg_.xp_per_level);
    if (level != hero.level) {
      const UnitStats& st = cfg_.roles[static_cast<int>(hero.role)];
      const int new_max = scaled_stat(st.hp, level, cfg_.level_growth);
      hero.hp = std::min(new_max, hero.hp + (new_max - hero.max_hp));
      hero.max_hp = new_max;
      hero.attack = scaled_stat(st.attack, level, cfg_.level_growth);
      hero.level = level;
    }
  }

  void share_xp(Team team, Cell where, int xp) {
    for (int s = 0; s < kTeamSize; ++s) {
      Unit& h = s_.units[GameState::hero_id(team, s)];
      if (h.alive() && chebyshev(h.position, where) <= cfg_.xp_share_radius) credit_xp(h, xp);
    }
  }

  void on_death(Unit& killer, Unit& victim) {
    KillEvent ev;
    ev.frame = s_.frame;
    ev.killer = killer.id;
    ev.killer_kind = killer.kind;
    ev.victim = victim.id;
    ev.victim_kind = victim.kind;
    ev.victim_team = victim.team;
    ev.camp = victim.camp;
    const bool by_hero = killer.kind == UnitKind::hero;
    const Team gainer = killer.team;

    switch (victim.kind) {
      case UnitKind::hero:
        victim.respawn_at = s_.frame + cfg_.hero_respawn_delay;
        rewards_[victim.id][RewardHead::kda] -= cfg_.rewards.death;
        if (by_hero) rewards_[killer.id][RewardHead::kda] += cfg_.rewards.kill;
        break;
      case UnitKind::minion:
        if (by_hero) s_.stats[team_index(gainer)].minions_killed += 1;
        break;
      case UnitKind::monster:
        s_.camp_respawn_at[victim.camp] = s_.frame + cfg_.monster_respawn_delay;
        if (by_hero) s_.stats[team_index(gainer)].monsters_taken += 1;
        break;
      case UnitKind::turret:
        s_.stats[team_index(opponent(victim.team))].turrets_destroyed += 1;
        for (int k = 0; k < kTeamSize; ++k)
          rewards_[GameState::hero_id(opponent(victim.team), k)][RewardHead::pushing] += cfg_.rewards.turret_kill;
        break;
      case UnitKind::crystal:
        s_.done = true;
        s_.winner = opponent(victim.team);
        break;
    }
    if (by_hero && victim.gold_bounty > 0) {
      ev.gold = victim.gold_bounty;
      credit_gold(killer, victim.gold_bounty);
    }
    if (victim.xp_bounty > 0 && gainer != Team::neutral) share_xp(gainer, victim.position, victim.xp_bounty);
    s_.events.push_back(ev);
  }

  void hero_act(Unit& hero, const HeroAction& a) {
    if (!hero.alive()) return;
    if (a.kind == HeroAction::Kind::move) {
      if (a.direction < 0 || a.direction >= 8) return;
      const Cell d = kDirections[a.direction];
      const Cell next{hero.position.x + d.x, hero.position.y + d.y};
      if (MapLayout::in_bounds(next)) hero.position = next;
    } else if (a.kind == HeroAction::Kind::attack) {
      Unit* target = s_.find(a.target);
      if (target == nullptr || !can_target(hero, *target)) return;
      if (chebyshev(hero.position, target->position) > hero.range) return;
      pending_.push_back({hero.id, target->id, hero.attack, hero.team});
    }
  }

  void queue_attack(const Unit& self, const Unit& target) {
    pending_.push_back({self.id, target.id, self.attack, self.team});
  }

  // Attacks chosen this frame land together; units killed by an earlier entry
  // still deal their own damage. Team order alternates by frame so neither side
  // systematically gets the last hit.
  void resolve_attacks() {
    const Team first = s_.frame % 2 == 0 ? Team::blue : Team::red;
    std::stable_sort(pending_.begin(), pending_.end(), [first](const PendingAttack& a, const PendingAttack& b) {
      return (a.team != first) < (b.team != first);
    });
    for (const PendingAttack& p : pending_) {
      Unit* attacker = s_.find(p.attacker);
      Unit* target = s_.find(p.target);
      if (attacker != nullptr && target != nullptr) deal_damage(*attacker, *target, p.amount);
    }
    pending_.clear();
  }

  // Nearest valid target in range; earlier entries of `kinds` take priority.
  Unit* pick_target(const Unit& self, std::initializer_list<UnitKind> kinds) {
    for (UnitKind kind : kinds) {
      Unit* best = nullptr;
      int best_d = 1 << 20;
      for (Unit& u : s_.units) {
        if (u.kind != kind || !can_target(self, u)) continue;
        const int d = chebyshev(self.position, u.position);
        if (d <= self.range && d < best_d) {
          best = &u;
          best_d = d;
        }
      }
      if (best != nullptr) return best;
    }
    return nullptr;
  }

  void structure_act(Unit& self) {
    if (Unit* t = pick_target(self, {UnitKind::minion, UnitKind::hero})) queue_attack(self, *t);
  }

  void monster_act(Unit& self) {
    const Cell home = s_.layout().camp(self.camp);
    Unit* foe = self.aggro >= 0 ? s_.find(self.aggro) : nullptr;
    if (foe != nullptr && foe->alive() && chebyshev(foe->position, self.position) <= self.range) {
      queue_attack(self, *foe);
      return;
    }
    bool hero_near = false;
    for (int h = 0; h < kHeroCount; ++h) {
      const Unit& u = s_.units[h];
      if (u.alive() && chebyshev(u.position, home) <= cfg_.monster_leash) hero_near = true;
    }
    if (!hero_near) {
      self.aggro = -1;
      self.hp = self.max_hp;
    }
  }

  void minion_act(Unit& self) {
    if (Unit* t = pick_target(self, {UnitKind::minion, UnitKind::hero, UnitKind::turret, UnitKind::crystal})) {
      queue_attack(self, *t);
      return;
    }
    const auto& path = s_.layout().lane_path(self.lane, self.team);
    if (self.path_index + 1 < static_cast<int>(path.size())) {
      self.path_index += 1;
      self.position = path[self.path_index];
    }
  }

  void spawn_waves() {
    const int since = s_.frame - cfg_.first_wave_frame;
    if (since < 0 || since % cfg_.minion_wave_interval != 0) return;
    for (Team team : {Team::blue, Team::red}) {
      for (int lane = 0; lane < kLaneCount; ++lane) {
        const Cell start = s_.layout().lane_path(lane, team).front();
        for (int k = 0; k < cfg_.minion_wave_size; ++k) {
          Unit m = make_unit(s_.next_id++, UnitKind::minion, team, start, cfg_.minion);
          m.lane = lane;
          s_.units.push_back(m);
        }
      }
    }
  }

  void respawn_camps() {
    for (int c = 0; c < kCampCount; ++c) {
      if (s_.camp_respawn_at[c] < 0 || s_.camp_respawn_at[c] > s_.frame) continue;
      s_.camp_respawn_at[c] = -1;
      Unit m = make_unit(s_.next_id++, UnitKind::monster, Team::neutral, s_.layout().camp(c), cfg_.monster);
      m.camp = c;
      s_.units.push_back(m);
    }
  }

  void respawn_heroes() {
    for (int h = 0; h < kHeroCount; ++h) {
      Unit& u = s_.units[h];
      if (u.respawn_at && *u.respawn_at <= s_.frame) {
        u.respawn_at.reset();
        u.hp = u.max_hp;
        u.position = s_.layout().spawn(u.team);
      }
    }
  }

  void regenerate() {
    for (int h = 0; h < kHeroCount; ++h) {
      Unit& u = s_.units[h];
      if (!u.alive()) continue;
      if (s_.layout().region_of(u.position, u.team) != static_cast<int>(RelRegion::base_ally)) continue;
      const int heal = static_cast<int>(std::ceil(cfg_.base_regen * u.max_hp));
      u.hp = std::min(u.max_hp, u.hp + heal);
    }
  }

  void finish_if_over() {
    if (!s_.done && s_.frame >= cfg_.max_frames) {
      s_.done = true;
      const Unit* b = s_.crystal(Team::blue);
      const Unit* r = s_.crystal(Team::red);
      const double fb = static_cast<double>(b->hp) / b->max_hp;
      const double fr = static_cast<double>(r->hp) / r->max_hp;
      if (fb > fr) s_.winner = Team::blue;
      if (fr > fb) s_.winner = Team::red;
    }
    if (s_.done && s_.winner) {
      for (int h = 0; h < kHeroCount; ++h) {
        const bool won = s_.units[h].team == *s_.winner;
        rewards_[h][RewardHead::win_lose] += won ? cfg_.rewards.win : -cfg_.rewards.win;
      }
    }
  }

  void run(std::span<const HeroAction, kHeroCount> actions) {
    s_.events.clear();
    for (int h = 0; h < kHeroCount; ++h)
      if (actions[h].kind == HeroAction::Kind::move) hero_act(s_.units[h], actions[h]);
    for (int h = 0; h < kHeroCount; ++h)
      if (actions[h].kind == HeroAction::Kind::attack) hero_act(s_.units[h], actions[h]);
    for (std::size_t i = kHeroCount; i < s_.units.size(); ++i) {
      Unit& u = s_.units[i];
      if (!u.alive()) continue;
      switch (u.kind) {
        case UnitKind::turret:
        case UnitKind::crystal: structure_act(u); break;
        case UnitKind::monster: monster_act(u); break;
        case UnitKind::minion: minion_act(u); break;
        case UnitKind::hero: break;
      }
    }
    resolve_attacks();
    s_.units.erase(std::remove_if(s_.units.begin() + kHeroCount, s_.units.end(),
                                  [](const Unit& u) { return !u.alive() && u.kind != UnitKind::crystal; }),
                   s_.units.end());
    s_.frame += 1;
    respawn_heroes();
    respawn_camps();
    spawn_waves();
    regenerate();
    finish_if_over();
  }

 private:
  struct PendingAttack {
    int attacker;
    int target;
    int amount;
    Team team;
  };

  GameState& s_;
  const EnvConfig& cfg_;
  std::span<RewardVector, kHeroCount> rewards_;
  std::vector<PendingAttack> pending_;
};

}  // namespace detail

inline GameState new_game(std::span<const HeroRole> blue_lineup, std::span<const HeroRole> red_lineup,
                          std::uint64_t seed, std::shared_ptr<const EnvConfig> config = nullptr) {
  require(blue_lineup.size() == kTeamSize && red_lineup.size() == kTeamSize, ErrorKind::invalid_lineup,
          "lineups must have exactly 5 heroes");
  if (!config) config = std::make_shared<const EnvConfig>();
  config->validate();
  GameState s;
  s.config = config;
  s.rng_state = seed;
  const EnvConfig& cfg = *config;
  const MapLayout& layout = s.layout();
  for (int t = 0; t < 2; ++t) {
    const Team team = static_cast<Team>(t);
    const auto lineup = t == 0 ? blue_lineup : red_lineup;
    for (int k = 0; k < kTeamSize; ++k) {
      s.lineups[t][k] = lineup[k];
      s.units.push_back(detail::make_hero(cfg, s.next_id++, team, k, lineup[k]));
    }
  }
  for (Team team : {Team::blue, Team::red})
    s.units.push_back(detail::make_unit(s.next_id++, UnitKind::crystal, team, layout.crystal(team), cfg.crystal));
  for (Team team : {Team::blue, Team::red}) {
    const auto cells = layout.turrets(team);
    for (int lane = 0; lane < kLaneCount; ++lane)
      for (int k = 0; k < 2; ++k) {
        Unit t = detail::make_unit(s.next_id++, UnitKind::turret, team, cells[lane][k], cfg.turret);
        t.lane = lane;
        s.units.push_back(t);
      }
  }
  for (int c = 0; c < kCampCount; ++c) {
    Unit m = detail::make_unit(s.next_id++, UnitKind::monster, Team::neutral, layout.camp(c), cfg.monster);
    m.camp = c;
    s.units.push_back(m);
  }
  return s;
}

struct StepResult {
  std::array<RewardVector, kHeroCount> rewards{};
  bool done = false;
};

/// Advances the game by one frame. Actions are indexed by hero id and are
/// resolved in unit-id order.
inline StepResult step(GameState& state, std::span<const HeroAction, kHeroCount> actions) {
  require(!state.done, ErrorKind::game_over, "cannot step a finished game");
  StepResult out;
  detail::Stepper(state, out.rewards).run(actions);
  out.done = state.done;
  return out;
}

/// Value-semantics variant: returns the successor state.
inline std::pair<GameState, StepResult> step(const GameState& state, std::span<const HeroAction, kHeroCount> actions) {
  GameState next = state;
  StepResult r = step(next, actions);
  return {std::move(next), r};
}

inline std::vector<HeroAction> legal_actions(const GameState& state, int hero_id) {
  const Unit& h = state.hero(hero_id);
  std::vector<HeroAction> out{HeroAction::noop()};
  if (!h.alive()) return out;
  for (int d = 0; d < 8; ++d) {
    const Cell n{h.position.x + kDirections[d].x, h.position.y + kDirections[d].y};
    if (MapLayout::in_bounds(n)) out.push_back(HeroAction::move(d));
  }
  for (const Unit& u : state.units)
    if (detail::can_target(h, u) && chebyshev(h.position, u.position) <= h.range)
      out.push_back(HeroAction::attack_unit(u.id));
  return out;
}

// ---- serialisation -------------------------------------------------------

inline nlohmann::json to_json(const Unit& u) {
  nlohmann::json j = {{"id", u.id},
                      {"kind", static_cast<int>(u.kind)},
                      {"team", static_cast<int>(u.team)},
                      {"x", u.position.x},
                      {"y", u.position.y},
                      {"hp", u.hp},
                      {"max_hp", u.max_hp},
                      {"attack", u.attack}};
  if (u.kind == UnitKind::hero) {
    j["role"] = to_string(u.role);
    j["gold"] = u.gold;
    j["level"] = u.level;
    j["xp"] = u.xp;
    j["respawn_at"] = u.respawn_at ? nlohmann::json(*u.respawn_at) : nlohmann::json(nullptr);
  }
  if (u.kind == UnitKind::minion) j["path_index"] = u.path_index;
  if (u.kind == UnitKind::monster) j["aggro"] = u.aggro;
  return j;
}

inline nlohmann::json to_json(const GameState& s) {
  nlohmann::json units = nlohmann::json::array();
  for (const Unit& u : s.units) units.push_back(to_json(u));
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& t : s.stats)
    stats.push_back({{"monsters_taken", t.monsters_taken},
                     {"minions_killed", t.minions_killed},
                     {"turrets_destroyed", t.turrets_destroyed}});
  return {{"frame", s.frame},
          {"next_id", s.next_id},
          {"rng_state", s.rng_state},
          {"done", s.done},
          {"winner", s.winner ? nlohmann::json(to_string(*s.winner)) : nlohmann::json(nullptr)},
          {"camp_respawn_at", s.camp_respawn_at},
          {"stats", stats},
          {"units", units}};
}

inline std::string serialize(const GameState& s) { return to_json(s).dump(); }

}  // namespace macrogoal::sim
