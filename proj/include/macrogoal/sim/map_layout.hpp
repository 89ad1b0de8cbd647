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
#include <cstdlib>
#include <vector>

#include "macrogoal/sim/types.hpp"

namespace macrogoal::sim {

inline constexpr int kMapSize = 24;
inline constexpr int kRegionCount = 9;
inline constexpr int kLaneCount = 3;
inline constexpr int kCampCount = 4;

/// Absolute region ids. Blue owns the bottom-left corner, red the top-right.
enum class Region : std::uint8_t {
  lane_top = 0,
  lane_mid,
  lane_bot,
  jungle_top_blue,
  jungle_bot_blue,
  jungle_top_red,
  jungle_bot_red,
  base_blue,
  base_red,
};

/// Team-relative region ids, the alphabet of the macro-state region slots.
enum class RelRegion : std::uint8_t {
  lane_top = 0,
  lane_mid,
  lane_bot,
  jungle_top_near,
  jungle_bot_near,
  jungle_top_far,
  jungle_bot_far,
  base_ally,
  base_enemy,
};

inline const char* to_string(RelRegion r) {
  static constexpr const char* names[] = {"lane_top",       "lane_mid",        "lane_bot",
                                          "jungle_top_near", "jungle_bot_near", "jungle_top_far",
                                          "jungle_bot_far", "base_ally",       "base_enemy"};
  return names[static_cast<int>(r)];
}

/// Swapping the team perspective exchanges ally/enemy owned regions.
inline int swap_side(int region) {
  switch (region) {
    case 3: return 5;
    case 4: return 6;
    case 5: return 3;
    case 6: return 4;
    case 7: return 8;
    case 8: return 7;
    default: return region;
  }
}

inline int relative_region(int absolute, Team team) { return team == Team::red ? swap_side(absolute) : absolute; }
inline int absolute_region(int relative, Team team) { return relative_region(relative, team); }

/// Reflection across the anti-diagonal. It maps each lane onto itself and the
/// blue half of the map onto the red half, so red's view of the game is the
/// mirror image of blue's.
inline Cell mirror(Cell c) { return {kMapSize - 1 - c.y, kMapSize - 1 - c.x}; }
inline Cell to_team_frame(Cell c, Team team) { return team == Team::red ? mirror(c) : c; }
inline Cell from_team_frame(Cell c, Team team) { return to_team_frame(c, team); }

/// Direction index as seen by a team (red's moves are mirrored).
inline int direction_to_team_frame(int dir, Team team) {
  if (team != Team::red) return dir;
  const Cell d = kDirections[dir];
  const Cell m{-d.y, -d.x};
  for (int i = 0; i < 8; ++i)
    if (kDirections[i] == m) return i;
  return dir;
}
inline int direction_from_team_frame(int dir, Team team) { return direction_to_team_frame(dir, team); }

class MapLayout {
 public:
  MapLayout() {
    for (int y = 0; y < kMapSize; ++y)
      for (int x = 0; x < kMapSize; ++x) region_[index({x, y})] = classify(x, y);
    build_paths();
    for (int c = 0; c < kMapSize * kMapSize; ++c) {
      const Cell from{c % kMapSize, c / kMapSize};
      for (int r = 0; r < kRegionCount; ++r) {
        Cell best{-1, -1};
        int best_d = 1 << 20;
        for (int k = 0; k < kMapSize * kMapSize; ++k) {
          if (region_[k] != r) continue;
          const Cell cand{k % kMapSize, k / kMapSize};
          const int d = chebyshev(from, cand);
          if (d < best_d) {
            best_d = d;
            best = cand;
          }
        }
        nearest_[c][r] = best;
      }
    }
  }

  static const MapLayout& instance() {
    static const MapLayout layout;
    return layout;
  }

  int width() const { return kMapSize; }
  int height() const { return kMapSize; }
  static bool in_bounds(Cell c) { return c.x >= 0 && c.y >= 0 && c.x < kMapSize && c.y < kMapSize; }
  static int index(Cell c) { return c.y * kMapSize + c.x; }

  int region_of(Cell c) const { return region_[index(c)]; }
  int region_of(Cell c, Team team) const { return relative_region(region_of(c), team); }

  int cell_count(int region) const {
    int n = 0;
    for (int r : region_) n += (r == region);
    return n;
  }

  /// Closest cell (Chebyshev) of an absolute region.
  Cell nearest_cell(Cell from, int region) const { return nearest_[index(from)][region]; }
  /// Nearest cell of a team-relative region, resolved in the team frame so
  /// that distance ties break identically for both sides.
  Cell nearest_cell(Cell from, int relative, Team team) const {
    return from_team_frame(nearest_cell(to_team_frame(from, team), relative), team);
  }

  /// Lane path walked by a team's minions, from its own base to the enemy crystal.
  const std::vector<Cell>& lane_path(int lane, Team team) const {
    return team == Team::red ? red_paths_[lane] : blue_paths_[lane];
  }

  /// Turret cells for a team: [lane][0 = inner, 1 = outer].
  std::array<std::array<Cell, 2>, kLaneCount> turrets(Team team) const {
    static constexpr std::array<std::array<Cell, 2>, kLaneCount> blue = {
        {{Cell{1, 7}, Cell{1, 13}}, {Cell{6, 6}, Cell{9, 9}}, {Cell{7, 1}, Cell{13, 1}}}};
    if (team != Team::red) return blue;
    std::array<std::array<Cell, 2>, kLaneCount> red{};
    for (int l = 0; l < kLaneCount; ++l)
      for (int k = 0; k < 2; ++k) red[l][k] = mirror(blue[l][k]);
    return red;
  }

  Cell crystal(Team team) const { return to_team_frame(Cell{1, 1}, team); }
  Cell spawn(Team team) const { return to_team_frame(Cell{2, 2}, team); }

  /// Absolute jungle camps: 0 top-blue, 1 bot-blue, 2 top-red, 3 bot-red.
  Cell camp(int index) const {
    static constexpr std::array<Cell, kCampCount> camps = {Cell{4, 10}, Cell{10, 4}, Cell{13, 19}, Cell{19, 13}};
    return camps[index];
  }
  /// Camps on a team's own half of the jungle.
  static bool camp_is_near(int camp, Team team) { return team == Team::red ? camp >= 2 : camp < 2; }
  /// Camp index in team-relative order: near top, near bot, far top, far bot.
  static int camp_to_team_order(int camp, Team team) { return team == Team::red ? (camp + 2) % 4 : camp; }
  static int camp_from_team_order(int order, Team team) { return camp_to_team_order(order, team); }

  /// Index of the closest cell on a lane path.
  int closest_path_index(int lane, Team team, Cell c) const {
    const auto& path = lane_path(lane, team);
    int best = 0;
    int best_d = 1 << 20;
    for (int i = 0; i < static_cast<int>(path.size()); ++i) {
      const int d = chebyshev(path[i], c);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

 private:
  static int classify(int x, int y) {
    if (x < 4 && y < 4) return static_cast<int>(Region::base_blue);
    if (x >= kMapSize - 4 && y >= kMapSize - 4) return static_cast<int>(Region::base_red);
    if (std::abs(x - y) <= 1) return static_cast<int>(Region::lane_mid);
    if (x <= 2 || y >= kMapSize - 3) return static_cast<int>(Region::lane_top);
    if (y <= 2 || x >= kMapSize - 3) return static_cast<int>(Region::lane_bot);
    // the self-mirrored anti-diagonal belongs to neither side's jungle
    if (x + y == kMapSize - 1) return static_cast<int>(y > x ? Region::lane_top : Region::lane_bot);
    const bool blue_side = x + y < kMapSize - 1;
    if (y > x)
      return static_cast<int>(blue_side ? Region::jungle_top_blue : Region::jungle_top_red);
    return static_cast<int>(blue_side ? Region::jungle_bot_blue : Region::jungle_bot_red);
  }

  static void append_segment(std::vector<Cell>& path, Cell from, Cell to) {
    Cell c = from;
    if (path.empty() || !(path.back() == c)) path.push_back(c);
    while (!(c == to)) {
      c.x += (to.x > c.x) - (to.x < c.x);
      c.y += (to.y > c.y) - (to.y < c.y);
      path.push_back(c);
    }
  }

  void build_paths() {
    append_segment(blue_paths_[0], {1, 4}, {1, 22});
    append_segment(blue_paths_[0], {1, 22}, {21, 22});
    append_segment(blue_paths_[1], {4, 4}, {21, 21});
    append_segment(blue_paths_[2], {4, 1}, {22, 1});
    append_segment(blue_paths_[2], {22, 1}, {22, 21});
    for (int l = 0; l < kLaneCount; ++l)
      for (Cell c : blue_paths_[l]) red_paths_[l].push_back(mirror(c));
  }

  std::array<int, kMapSize * kMapSize> region_{};
  std::array<std::array<Cell, kRegionCount>, kMapSize * kMapSize> nearest_{};
  std::array<std::vector<Cell>, kLaneCount> blue_paths_;
  std::array<std::vector<Cell>, kLaneCount> red_paths_;
};

}  // namespace macrogoal::sim
