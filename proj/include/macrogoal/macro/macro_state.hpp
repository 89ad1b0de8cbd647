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
#include <compare>
#include <span>

#include "macrogoal/core/error.hpp"
#include "macrogoal/sim/game.hpp"

namespace macrogoal::macro {

/// Macro-state layout: five allied region slots (team-relative region of the
/// hero in lineup slot k) followed by five team resource tallies.
enum MacroSlot : int {
  kRegion0 = 0,
  kGoldBucket = 5,
  kLevelSum = 6,
  kTurretsDestroyed = 7,
  kMonstersTaken = 8,
  kWavesCleared = 9,
};
inline constexpr int kMacroDim = 10;
inline constexpr int kGoalRegionSlots = sim::kTeamSize;

/// Alphabet size per dimension. Tallies saturate at arity - 1.
inline constexpr std::array<int, kMacroDim> kMacroArity = {9, 9, 9, 9, 9, 32, 41, 7, 16, 24};
inline constexpr int kDefaultGoldBucket = 500;
inline constexpr int kMacroLayoutVersion = 1;

inline constexpr int macro_one_hot_width() {
  int w = 0;
  for (int a : kMacroArity) w += a;
  return w;
}

inline bool is_region_dim(int d) { return d < kGoalRegionSlots; }

struct MacroState {
  std::array<int, kMacroDim> values{};

  int& operator[](int d) { return values[d]; }
  int operator[](int d) const { return values[d]; }
  friend auto operator<=>(const MacroState&, const MacroState&) = default;
};
using MacroGoal = MacroState;

inline bool is_valid(const MacroState& c) {
  for (int d = 0; d < kMacroDim; ++d)
    if (c[d] < 0 || c[d] >= kMacroArity[d]) return false;
  return true;
}

/// f: S -> G for one team. Dead heroes report the allied base.
inline MacroState extract_macro_state(const sim::GameState& s, sim::Team team, int gold_bucket = kDefaultGoldBucket) {
  MacroState c;
  const auto& map = s.layout();
  int level_sum = 0;
  for (int k = 0; k < sim::kTeamSize; ++k) {
    const sim::Unit& h = s.units[sim::GameState::hero_id(team, k)];
    c[kRegion0 + k] = h.alive() ? map.region_of(h.position, team) : static_cast<int>(sim::RelRegion::base_ally);
    level_sum += h.level;
  }
  const sim::TeamStats& st = s.stats[sim::team_index(team)];
  const int wave = std::max(1, s.cfg().minion_wave_size);
  auto cap = [](int v, int d) { return std::clamp(v, 0, kMacroArity[d] - 1); };
  c[kGoldBucket] = cap(s.team_gold(team) / gold_bucket, kGoldBucket);
  c[kLevelSum] = cap(level_sum, kLevelSum);
  c[kTurretsDestroyed] = cap(st.turrets_destroyed, kTurretsDestroyed);
  c[kMonstersTaken] = cap(st.monsters_taken, kMonstersTaken);
  c[kWavesCleared] = cap(st.minions_killed / wave, kWavesCleared);
  return c;
}

using GoalWeights = std::array<double, kMacroDim>;

inline GoalWeights unit_weights() {
  GoalWeights w;
  w.fill(1.0);
  return w;
}

/// Weighted L1 on G: region slots score a 0/1 mismatch, tallies the absolute
/// difference.
inline double goal_distance(std::span<const int> c, std::span<const int> g, std::span<const double> w) {
  require(c.size() == g.size() && c.size() == w.size(), ErrorKind::shape,
          "goal_distance: dimension mismatch (" + std::to_string(c.size()) + " vs " + std::to_string(g.size()) + ")");
  require(c.size() == kMacroDim, ErrorKind::shape, "goal_distance: expected dimension 10");
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double term = is_region_dim(static_cast<int>(i)) ? (c[i] != g[i] ? 1.0 : 0.0) : std::abs(c[i] - g[i]);
    d += w[i] * term;
  }
  return d;
}

inline double goal_distance(const MacroState& c, const MacroGoal& g, const GoalWeights& w = unit_weights()) {
  return goal_distance(std::span<const int>(c.values), std::span<const int>(g.values), std::span<const double>(w));
}

/// Weights seen by the hero in lineup slot `slot`: its own region slot plus the
/// team tallies.
inline GoalWeights hero_weights(const GoalWeights& w, int slot) {
  GoalWeights out = w;
  for (int k = 0; k < kGoalRegionSlots; ++k)
    if (k != slot) out[k] = 0.0;
  return out;
}

inline nlohmann::json to_json(const MacroState& c) { return c.values; }
inline MacroState macro_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == kMacroDim, ErrorKind::data, "macro-state must have 10 entries");
  MacroState c;
  for (int d = 0; d < kMacroDim; ++d) c[d] = j[d].get<int>();
  return c;
}

}  // namespace macrogoal::macro
