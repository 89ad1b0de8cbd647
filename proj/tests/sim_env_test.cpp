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

#include <gtest/gtest.h>

#include <filesystem>

#include "macrogoal/sim/controller.hpp"
#include "macrogoal/sim/game.hpp"
#include "macrogoal/sim/observe.hpp"
#include "macrogoal/sim/trajectory.hpp"
#include "support/fixtures.hpp"

namespace macrogoal::sim {
namespace {

using testing::error_kind;
using testing::random_actions;
using Actions = std::array<HeroAction, kHeroCount>;

constexpr Lineup kStandard = {HeroRole::marksman, HeroRole::mage, HeroRole::warrior, HeroRole::assassin,
                              HeroRole::supporter};

Actions all_noop() { return {}; }

StepResult advance(GameState& s, const Actions& a) { return step(s, std::span<const HeroAction, kHeroCount>(a)); }

Unit* monster_of_camp(GameState& s, int camp) {
  for (Unit& u : s.units)
    if (u.kind == UnitKind::monster && u.camp == camp) return &u;
  return nullptr;
}

TEST(SimEnvTest, NewGameIsDeterministic) {
  auto a = new_game(kStandard, kStandard, 7);
  auto b = new_game(kStandard, kStandard, 7);
  EXPECT_EQ(serialize(a), serialize(b));
}

TEST(SimEnvTest, FreshStateContract) {
  const EnvConfig cfg;
  const auto s = new_game(kStandard, kStandard, 3);
  EXPECT_FALSE(s.done);
  EXPECT_FALSE(s.winner.has_value());
  EXPECT_EQ(s.frame, 0);
  for (int h = 0; h < kHeroCount; ++h) {
    const Unit& u = s.hero(h);
    EXPECT_EQ(u.hp, u.max_hp);
    EXPECT_EQ(u.gold, cfg.starting_gold);
    EXPECT_EQ(u.level, 1);
    EXPECT_EQ(s.layout().region_of(u.position, u.team), static_cast<int>(RelRegion::base_ally));
  }
}

TEST(SimEnvTest, FreshStatePlacesCampsTurretsAndCrystals) {
  const auto s = new_game(kStandard, kStandard, 3);
  std::array<int, kCampCount> camps{};
  std::array<std::array<int, kLaneCount>, 2> turrets{};
  int crystals = 0;
  for (const Unit& u : s.units) {
    if (u.kind == UnitKind::monster) camps[u.camp] += 1;
    if (u.kind == UnitKind::turret) turrets[team_index(u.team)][u.lane] += 1;
    if (u.kind == UnitKind::crystal) crystals += 1;
  }
  for (int c : camps) EXPECT_EQ(c, 1);
  for (const auto& t : turrets)
    for (int n : t) EXPECT_EQ(n, 2);
  EXPECT_EQ(crystals, 2);
  // every jungle region holds exactly one camp
  std::array<int, kRegionCount> per_region{};
  for (int c = 0; c < kCampCount; ++c) per_region[s.layout().region_of(s.layout().camp(c))] += 1;
  for (Region r : {Region::jungle_top_blue, Region::jungle_bot_blue, Region::jungle_top_red, Region::jungle_bot_red})
    EXPECT_EQ(per_region[static_cast<int>(r)], 1);
}

TEST(SimEnvTest, FreshStateIsMirrorSymmetric) {
  const auto s = new_game(kStandard, kStandard, 11);
  for (int k = 0; k < kTeamSize; ++k)
    EXPECT_EQ(mirror(s.hero(GameState::hero_id(Team::blue, k)).position),
              s.hero(GameState::hero_id(Team::red, k)).position);
  EXPECT_EQ(mirror(s.crystal(Team::blue)->position), s.crystal(Team::red)->position);
  for (int c = 0; c < kCampCount; ++c)
    EXPECT_EQ(mirror(s.layout().camp(c)), s.layout().camp(MapLayout::camp_to_team_order(c, Team::red)));
}

TEST(SimEnvTest, LineupErrors) {
  const std::array<HeroRole, 4> four{};
  EXPECT_EQ(error_kind([&] { new_game(four, kStandard, 0); }), ErrorKind::invalid_lineup);
  EXPECT_EQ(error_kind([&] { new_game(kStandard, four, 0); }), ErrorKind::invalid_lineup);
  EXPECT_EQ(error_kind([] { role_from_string("wizard"); }), ErrorKind::invalid_lineup);
  EXPECT_EQ(role_from_string("tank"), HeroRole::tank);
}

TEST(SimEnvTest, InvalidConfigIsRejected) {
  auto cfg = std::make_shared<EnvConfig>();
  cfg->width = 30;
  EXPECT_EQ(error_kind([&] { new_game(kStandard, kStandard, 0, cfg); }), ErrorKind::config);
  cfg = std::make_shared<EnvConfig>();
  cfg->max_frames = 0;
  EXPECT_EQ(error_kind([&] { new_game(kStandard, kStandard, 0, cfg); }), ErrorKind::config);
}

TEST(SimEnvTest, ConfigJsonRoundTrip) {
  EnvConfig cfg;
  cfg.max_frames = 777;
  cfg.rewards.win = 3.5;
  cfg.roles[2].attack = 99;
  const EnvConfig back = nlohmann::json(cfg).get<EnvConfig>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(cfg));
  // missing keys fall back to the defaults
  const EnvConfig partial = nlohmann::json::parse(R"({"max_frames": 10})").get<EnvConfig>();
  EXPECT_EQ(partial.max_frames, 10);
  EXPECT_EQ(partial.starting_gold, EnvConfig{}.starting_gold);
}

TEST(SimEnvTest, NoopFirstFrameChangesNoHeroHp) {
  auto s = new_game(kStandard, kStandard, 5);
  const auto before = s;
  advance(s, all_noop());
  EXPECT_EQ(s.frame, 1);
  for (int h = 0; h < kHeroCount; ++h) EXPECT_EQ(s.hero(h).hp, before.hero(h).hp);
}

TEST(SimEnvTest, ValueStepMatchesInPlaceStep) {
  auto s = new_game(kStandard, kStandard, 5);
  const Actions a = all_noop();
  const auto [next, r] = step(static_cast<const GameState&>(s), std::span<const HeroAction, kHeroCount>(a));
  EXPECT_EQ(s.frame, 0);
  advance(s, a);
  EXPECT_EQ(serialize(next), serialize(s));
}

TEST(SimEnvTest, SteppingFinishedGameIsAnError) {
  auto cfg = std::make_shared<EnvConfig>();
  cfg->max_frames = 3;
  auto s = new_game(kStandard, kStandard, 1, cfg);
  for (int i = 0; i < 3; ++i) advance(s, all_noop());
  ASSERT_TRUE(s.done);
  EXPECT_EQ(error_kind([&] { advance(s, all_noop()); }), ErrorKind::game_over);
}

TEST(SimEnvTest, UnknownHeroIsNotFound) {
  const auto s = new_game(kStandard, kStandard, 1);
  EXPECT_EQ(error_kind([&] { s.hero(kHeroCount); }), ErrorKind::not_found);
  EXPECT_EQ(error_kind([&] { observe(s, -1); }), ErrorKind::not_found);
  EXPECT_EQ(error_kind([&] { legal_actions(s, 42); }), ErrorKind::not_found);
}

// Blue warrior (attack 22) against a full-hp monster (240 hp): ten hits leave
// 20 hp, the eleventh kills. The kill credits 70 gold and shares 50 xp.
TEST(SimEnvTest, HandTracedMonsterKill) {
  const EnvConfig cfg;
  auto s = new_game(kStandard, kStandard, 9);
  const int warrior = GameState::hero_id(Team::blue, 2);
  Unit* m = monster_of_camp(s, 0);
  ASSERT_NE(m, nullptr);
  const int mid = m->id;
  s.hero(warrior).position = {m->position.x + 1, m->position.y};
  Actions a = all_noop();
  a[warrior] = HeroAction::attack_unit(mid);
  const int hp0 = s.hero(warrior).hp;
  for (int hit = 1; hit <= 10; ++hit) {
    const auto r = advance(s, a);
    EXPECT_EQ(monster_of_camp(s, 0)->hp, 240 - 22 * hit);
    EXPECT_DOUBLE_EQ(r.rewards[warrior][RewardHead::farming], 0.0);
  }
  EXPECT_EQ(s.hero(warrior).hp, hp0 - 9 * cfg.monster.attack);  // the monster retaliates from the second frame
  const auto r = advance(s, a);
  EXPECT_EQ(monster_of_camp(s, 0), nullptr);
  EXPECT_NEAR(r.rewards[warrior][RewardHead::farming],
              cfg.monster.gold_bounty * cfg.rewards.gold + cfg.monster.xp_bounty * cfg.rewards.xp, 1e-12);
  EXPECT_EQ(s.hero(warrior).gold, cfg.starting_gold + cfg.monster.gold_bounty);
  EXPECT_EQ(s.stats[0].monsters_taken, 1);
  ASSERT_EQ(s.events.size(), 1u);
  EXPECT_EQ(s.events[0].camp, 0);
  EXPECT_EQ(s.events[0].killer, warrior);
  EXPECT_EQ(s.events[0].gold, cfg.monster.gold_bounty);
  EXPECT_EQ(s.camp_respawn_at[0], 10 + cfg.monster_respawn_delay);
}

TEST(SimEnvTest, MonsterRespawnsAfterDelay) {
  auto cfg = std::make_shared<EnvConfig>();
  cfg->monster_respawn_delay = 5;
  auto s = new_game(kStandard, kStandard, 9, cfg);
  const int hero = GameState::hero_id(Team::blue, 4);
  Unit* m = monster_of_camp(s, 1);
  m->hp = 1;
  s.hero(hero).position = {m->position.x, m->position.y + 1};
  Actions a = all_noop();
  a[hero] = HeroAction::attack_unit(m->id);
  advance(s, a);
  EXPECT_EQ(monster_of_camp(s, 1), nullptr);
  // killed on the frame-0 transition; back on the map at frame 0 + delay
  for (int i = 0; i < 3; ++i) advance(s, all_noop());
  EXPECT_EQ(monster_of_camp(s, 1), nullptr);
  advance(s, all_noop());
  ASSERT_NE(monster_of_camp(s, 1), nullptr);
  EXPECT_EQ(monster_of_camp(s, 1)->hp, cfg->monster.hp);
}

TEST(SimEnvTest, CrystalKillEndsGameWithTerminalReward) {
  const EnvConfig cfg;
  auto s = new_game(kStandard, kStandard, 2);
  const int hero = GameState::hero_id(Team::blue, 0);
  Unit* c = const_cast<Unit*>(s.crystal(Team::red));
  c->hp = 1;
  s.hero(hero).position = {c->position.x - 1, c->position.y - 1};
  Actions a = all_noop();
  a[hero] = HeroAction::attack_unit(c->id);
  const auto r = advance(s, a);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(s.done);
  ASSERT_TRUE(s.winner.has_value());
  EXPECT_EQ(*s.winner, Team::blue);
  for (int h = 0; h < kHeroCount; ++h)
    EXPECT_DOUBLE_EQ(r.rewards[h][RewardHead::win_lose], h < kTeamSize ? cfg.rewards.win : -cfg.rewards.win);
  EXPECT_EQ(s.crystal(Team::red)->hp, 0);
}

TEST(SimEnvTest, TimeoutWinnerByCrystalHealth) {
  auto cfg = std::make_shared<EnvConfig>();
  cfg->max_frames = 4;
  auto s = new_game(kStandard, kStandard, 2, cfg);
  const_cast<Unit*>(s.crystal(Team::blue))->hp -= 10;
  StepResult r;
  for (int i = 0; i < 4; ++i) {
    EXPECT_FALSE(s.done);
    r = advance(s, all_noop());
    if (i < 3) {
      for (int h = 0; h < kHeroCount; ++h) EXPECT_DOUBLE_EQ(r.rewards[h][RewardHead::win_lose], 0.0);
    }
  }
  EXPECT_TRUE(s.done);
  ASSERT_TRUE(s.winner.has_value());
  EXPECT_EQ(*s.winner, Team::red);
  EXPECT_DOUBLE_EQ(r.rewards[0][RewardHead::win_lose], -cfg->rewards.win);
  EXPECT_DOUBLE_EQ(r.rewards[9][RewardHead::win_lose], cfg->rewards.win);
}

TEST(SimEnvTest, TimeoutWithEqualCrystalsHasNoWinner) {
  auto cfg = std::make_shared<EnvConfig>();
  cfg->max_frames = 4;
  auto s = new_game(kStandard, kStandard, 2, cfg);
  StepResult r;
  while (!s.done) r = advance(s, all_noop());
  EXPECT_FALSE(s.winner.has_value());
  for (int h = 0; h < kHeroCount; ++h) EXPECT_DOUBLE_EQ(r.rewards[h][RewardHead::win_lose], 0.0);
}

TEST(SimEnvTest, DeadHeroRespawnsAtBaseAfterDelay) {
  const EnvConfig cfg;
  auto s = new_game(kStandard, kStandard, 4);
  const int victim = GameState::hero_id(Team::red, 1);
  const int killer = GameState::hero_id(Team::blue, 0);
  s.hero(victim).hp = 1;
  s.hero(victim).position = {12, 12};
  s.hero(killer).position = {10, 12};
  Actions a = all_noop();
  a[killer] = HeroAction::attack_unit(victim);
  const auto r = advance(s, a);
  EXPECT_FALSE(s.hero(victim).alive());
  EXPECT_DOUBLE_EQ(r.rewards[killer][RewardHead::kda], cfg.rewards.kill);
  EXPECT_DOUBLE_EQ(r.rewards[victim][RewardHead::kda], -cfg.rewards.death);
  EXPECT_EQ(legal_actions(s, victim), std::vector<HeroAction>{HeroAction::noop()});
  for (int i = 2; i < cfg.hero_respawn_delay; ++i) advance(s, all_noop());
  EXPECT_FALSE(s.hero(victim).alive());
  advance(s, all_noop());
  EXPECT_TRUE(s.hero(victim).alive());
  EXPECT_EQ(s.hero(victim).hp, s.hero(victim).max_hp);
  EXPECT_EQ(s.layout().region_of(s.hero(victim).position, Team::red), static_cast<int>(RelRegion::base_ally));
}

TEST(SimEnvTest, InvalidAttackIsNoop) {
  auto s = new_game(kStandard, kStandard, 4);
  auto ref = s;
  Actions a = all_noop();
  a[0] = HeroAction::attack_unit(GameState::hero_id(Team::red, 0));  // out of range
  a[1] = HeroAction::attack_unit(2);                                 // ally
  a[2] = HeroAction::attack_unit(100000);                            // no such unit
  advance(s, a);
  advance(ref, all_noop());
  EXPECT_EQ(serialize(s), serialize(ref));
}

TEST(SimEnvTest, LegalActionsWithoutEnemiesAreMovesAndNoop) {
  const auto s = new_game(kStandard, kStandard, 4);
  for (int h = 0; h < kHeroCount; ++h) {
    const auto legal = legal_actions(s, h);
    EXPECT_EQ(legal.front(), HeroAction::noop());
    for (std::size_t i = 1; i < legal.size(); ++i) EXPECT_EQ(legal[i].kind, HeroAction::Kind::move);
  }
}

TEST(SimEnvTest, AdjacentEnemyMinionIsAttackable) {
  const EnvConfig cfg;
  auto s = new_game(kStandard, kStandard, 4);
  const int hero = GameState::hero_id(Team::blue, 2);
  s.hero(hero).position = {8, 8};
  Unit m = detail::make_unit(s.next_id++, UnitKind::minion, Team::red, {9, 8}, cfg.minion);
  m.lane = 1;
  s.units.push_back(m);
  const auto legal = legal_actions(s, hero);
  EXPECT_NE(std::find(legal.begin(), legal.end(), HeroAction::attack_unit(m.id)), legal.end());
  // an ally minion is not a target
  Unit f = detail::make_unit(s.next_id++, UnitKind::minion, Team::blue, {7, 8}, cfg.minion);
  s.units.push_back(f);
  const auto legal2 = legal_actions(s, hero);
  EXPECT_EQ(std::find(legal2.begin(), legal2.end(), HeroAction::attack_unit(f.id)), legal2.end());
}

TEST(SimEnvTest, CornerHeroHasOnlyInBoundsMoves) {
  auto s = new_game(kStandard, kStandard, 4);
  s.hero(0).position = {0, 0};
  const auto legal = legal_actions(s, 0);
  EXPECT_EQ(legal.size(), 4u);  // noop, east, north-east, north
}

TEST(SimEnvTest, ObservationContract) {
  auto s = new_game(kStandard, kStandard, 8);
  for (int h = 0; h < kHeroCount; ++h) {
    const auto o = observe(s, h);
    ASSERT_EQ(static_cast<int>(o.size()), kObservationWidth);
    EXPECT_DOUBLE_EQ(o[kObsSelfHp], 1.0);
    EXPECT_DOUBLE_EQ(o[kObsSelfAlive], 1.0);
    EXPECT_EQ(o, observe(s, h));
  }
  // removing camp 0 zeroes its slot for blue (team order = absolute order)
  s.units.erase(std::find_if(s.units.begin(), s.units.end(),
                             [](const Unit& u) { return u.kind == UnitKind::monster && u.camp == 0; }));
  const auto o = observe(s, 0);
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(o[kObsCampBase + k], 0.0);
  EXPECT_GT(o[kObsCampBase + 4 + 2], 0.0);
}

TEST(SimEnvTest, ObservationIsMirrorInvariant) {
  // identical lineups on a symmetric fresh map: each red hero sees what its blue counterpart sees
  const auto s = new_game(kStandard, kStandard, 8);
  for (int k = 0; k < kTeamSize; ++k) {
    const auto b = observe(s, GameState::hero_id(Team::blue, k));
    const auto r = observe(s, GameState::hero_id(Team::red, k));
    ASSERT_EQ(b.size(), r.size());
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], r[i], 1e-12) << "slot " << i;
  }
}

TEST(MapLayoutTest, RegionsPartitionTheMap) {
  const auto& m = MapLayout::instance();
  int total = 0;
  for (int r = 0; r < kRegionCount; ++r) {
    EXPECT_GT(m.cell_count(r), 0);
    total += m.cell_count(r);
  }
  EXPECT_EQ(total, m.width() * m.height());
  for (int y = 0; y < kMapSize; ++y)
    for (int x = 0; x < kMapSize; ++x) {
      const int r = m.region_of({x, y});
      EXPECT_TRUE(r >= 0 && r < kRegionCount);
      EXPECT_EQ(m.region_of(mirror({x, y})), swap_side(r));
      EXPECT_EQ(m.region_of({x, y}, Team::red), m.region_of(mirror({x, y}), Team::blue));
    }
}

TEST(MapLayoutTest, MirrorAndDirectionsAreInvolutions) {
  for (int y = 0; y < kMapSize; ++y)
    for (int x = 0; x < kMapSize; ++x) EXPECT_EQ(mirror(mirror({x, y})), (Cell{x, y}));
  for (int d = 0; d < 8; ++d) {
    const int rd = direction_to_team_frame(d, Team::red);
    EXPECT_EQ(direction_from_team_frame(rd, Team::red), d);
    EXPECT_EQ(direction_to_team_frame(d, Team::blue), d);
    // moving by d then mirroring equals mirroring then moving by the red-frame direction
    const Cell c{10, 7};
    const Cell moved{c.x + kDirections[d].x, c.y + kDirections[d].y};
    const Cell mc = mirror(c);
    EXPECT_EQ(mirror(moved), (Cell{mc.x + kDirections[rd].x, mc.y + kDirections[rd].y}));
  }
  for (int r = 0; r < kRegionCount; ++r) EXPECT_EQ(swap_side(swap_side(r)), r);
}

// Replay determinism, conservation, termination and unit invariants on random episodes.
class RandomEpisodeTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomEpisodeTest, Invariants) {
  const std::uint64_t seed = GetParam();
  const EnvConfig cfg;
  Rng rng(seed);
  Lineup blue = testing::random_lineup(rng);
  Lineup red = testing::random_lineup(rng);
  auto s = new_game(blue, red, seed);
  auto twin = new_game(blue, red, seed);
  std::array<int, kHeroCount> credited{};
  std::array<int, kHeroCount> last_gold{}, last_xp{};
  for (int h = 0; h < kHeroCount; ++h) last_gold[h] = s.hero(h).gold;
  while (!s.done) {
    const Actions a = random_actions(s, rng);
    advance(s, a);
    advance(twin, a);
    ASSERT_EQ(serialize(s), serialize(twin)) << "frame " << s.frame;
    ASSERT_LE(s.frame, cfg.max_frames);
    for (const KillEvent& e : s.events) {
      if (e.killer >= 0 && e.killer < kHeroCount) credited[e.killer] += e.gold;
    }
    for (const Unit& u : s.units) {
      ASSERT_GE(u.hp, 0);
      ASSERT_LE(u.hp, u.max_hp);
      if (u.kind != UnitKind::hero && u.kind != UnitKind::crystal) {
        ASSERT_TRUE(u.alive());
      }
    }
    for (int h = 0; h < kHeroCount; ++h) {
      ASSERT_GE(s.hero(h).gold, last_gold[h]);
      ASSERT_GE(s.hero(h).xp, last_xp[h]);
      last_gold[h] = s.hero(h).gold;
      last_xp[h] = s.hero(h).xp;
    }
    if (!s.done) {
      ASSERT_TRUE(s.crystal(Team::blue)->alive());
      ASSERT_TRUE(s.crystal(Team::red)->alive());
    }
  }
  EXPECT_TRUE(s.frame == cfg.max_frames || !s.crystal(Team::blue)->alive() || !s.crystal(Team::red)->alive());
  for (int h = 0; h < kHeroCount; ++h) EXPECT_EQ(s.hero(h).gold, cfg.starting_gold + credited[h]);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomEpisodeTest, ::testing::Values(1, 2, 3));

TEST(TrajectoryTest, FileRoundTripReplaysBitIdentically) {
  auto env = std::make_shared<const EnvConfig>();
  GameSetup setup{env, {kStandard, kStandard}, 31, "test"};
  testing::RandomController blue(1), red(2);
  TrajectoryRecorder rec(make_header(setup, blue, red), true);
  const GameSummary sum = play_game(setup, blue, red, &rec);
  const Trajectory t = rec.finish();
  ASSERT_EQ(t.length(), sum.length + 1);
  EXPECT_FALSE(t.last().has_actions);
  EXPECT_TRUE(t.last().done);

  const auto path = std::filesystem::path(::testing::TempDir()) / "sim_roundtrip.jsonl";
  write_trajectory(path, t);
  const Trajectory back = read_trajectory(path);
  ASSERT_EQ(back.length(), t.length());
  EXPECT_EQ(back.header.agents, t.header.agents);
  EXPECT_EQ(back.header.seed, t.header.seed);
  for (int i = 0; i < t.length(); ++i) {
    EXPECT_EQ(back.frames[i].actions, t.frames[i].actions);
    EXPECT_EQ(back.frames[i].macro, t.frames[i].macro);
    EXPECT_EQ(back.frames[i].gold, t.frames[i].gold);
    EXPECT_EQ(back.frames[i].observations, t.frames[i].observations);
    for (int h = 0; h < kHeroCount; ++h) EXPECT_EQ(back.frames[i].rewards[h].heads, t.frames[i].rewards[h].heads);
  }

  // replay reproduces the live game frame by frame
  GameState live = new_game(kStandard, kStandard, 31, env);
  int frames = 0;
  replay(back, [&](const GameState& s) {
    EXPECT_EQ(serialize(s), serialize(live));
    if (!live.done) advance(live, back.frames[frames].actions);
    ++frames;
  });
  EXPECT_EQ(frames, t.length());
}

TEST(TrajectoryTest, TamperedLogFailsReplay) {
  auto env = std::make_shared<const EnvConfig>();
  GameSetup setup{env, {kStandard, kStandard}, 5, "test"};
  testing::RandomController blue(3), red(4);
  TrajectoryRecorder rec(make_header(setup, blue, red));
  play_game(setup, blue, red, &rec);
  Trajectory t = rec.finish();
  t.frames[40].macro[0][macro::kGoldBucket] += 3;
  EXPECT_EQ(error_kind([&] { replay(t, [](const GameState&) {}); }), ErrorKind::data);
}

}  // namespace
}  // namespace macrogoal::sim
