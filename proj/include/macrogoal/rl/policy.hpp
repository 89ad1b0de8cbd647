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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/core/rng.hpp"
#include "macrogoal/macro/features.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/meta/meta_controller.hpp"
#include "macrogoal/nn/loss.hpp"
#include "macrogoal/nn/net.hpp"
#include "macrogoal/rl/ppo.hpp"
#include "macrogoal/sim/controller.hpp"
#include "macrogoal/sim/observe.hpp"

namespace macrogoal::rl {

// Flattened action set: noop, 8 moves in the team frame, attack the weakest
// farmable unit / enemy hero / enemy structure in range.
inline constexpr int kActionCount = 12;
inline constexpr int kActionFarm = 9;
inline constexpr int kActionHero = 10;
inline constexpr int kActionStructure = 11;

// Goal block: per-dimension one-hot of the goal, then features relative to the
// hero: its own goal region one-hot, offset and distance to that region, an
// in-region flag, and the clipped tally gaps goal - current.
inline constexpr int kGoalOneHotWidth = macro::macro_one_hot_width();
inline constexpr int kGoalTallies = macro::kMacroDim - macro::kGoalRegionSlots;
inline constexpr int kGoalDerivedWidth = sim::kRegionCount + 3 + 1 + kGoalTallies;
inline constexpr int kGoalEncodingWidth = kGoalOneHotWidth + kGoalDerivedWidth;
inline constexpr int kPolicyInputWidth = sim::kObservationWidth + kGoalEncodingWidth;
inline constexpr int kObsRegionBase = 27;

inline void encode_goal(const sim::GameState& s, int hero_id, const macro::MacroGoal& goal, const macro::MacroState& now,
                        std::span<const double> obs, double* out) {
  int off = 0;
  for (int d = 0; d < macro::kMacroDim; ++d) {
    out[off + goal.values[d]] = 1.0;
    off += macro::kMacroArity[d];
  }
  const sim::Unit& hero = s.hero(hero_id);
  const int region = goal.values[hero.slot];
  out[off + region] = 1.0;
  off += sim::kRegionCount;
  for (int k = 0; k < 3; ++k) out[off + k] = obs[kObsRegionBase + 3 * region + k];
  off += 3;
  out[off++] = now.values[hero.slot] == region ? 1.0 : 0.0;
  for (int d = macro::kGoalRegionSlots; d < macro::kMacroDim; ++d)
    out[off++] = std::clamp((goal.values[d] - now.values[d]) / 4.0, -2.0, 2.0);
}

/// Observation followed by the goal block; the goal block is zero without a goal.
inline std::vector<double> policy_input(const sim::GameState& s, int hero_id, const macro::MacroGoal* goal,
                                        const macro::MacroState* now) {
  std::vector<double> x = sim::observe(s, hero_id);
  x.resize(kPolicyInputWidth, 0.0);
  if (goal != nullptr)
    encode_goal(s, hero_id, *goal, *now, std::span<const double>(x.data(), sim::kObservationWidth),
                x.data() + sim::kObservationWidth);
  return x;
}

inline const sim::Unit* weakest_in_range(const sim::GameState& s, const sim::Unit& hero, int action) {
  const sim::Unit* best = nullptr;
  for (const auto& u : s.units) {
    if (!u.alive() || u.team == hero.team || sim::chebyshev(u.position, hero.position) > hero.range) continue;
    bool ok = false;
    switch (action) {
      case kActionFarm: ok = u.kind == sim::UnitKind::minion || u.kind == sim::UnitKind::monster; break;
      case kActionHero: ok = u.kind == sim::UnitKind::hero; break;
      case kActionStructure: ok = u.kind == sim::UnitKind::turret || u.kind == sim::UnitKind::crystal; break;
      default: break;
    }
    if (ok && (best == nullptr || u.hp < best->hp)) best = &u;
  }
  return best;
}

/// Maps a flattened action index to a concrete action; attacks without a
/// target become noop.
inline sim::HeroAction decode_action(const sim::GameState& s, int hero_id, int action) {
  require(action >= 0 && action < kActionCount, ErrorKind::index, "action index out of range");
  const sim::Unit& hero = s.hero(hero_id);
  if (action == 0 || !hero.alive()) return sim::HeroAction::noop();
  if (action <= 8) return sim::HeroAction::move(sim::direction_from_team_frame(action - 1, hero.team));
  const sim::Unit* t = weakest_in_range(s, hero, action);
  return t ? sim::HeroAction::attack_unit(t->id) : sim::HeroAction::noop();
}

inline nn::NetSpec policy_spec(const std::vector<int>& hidden) {
  nn::NetSpec s;
  s.input_width = kPolicyInputWidth;
  s.hidden = hidden;
  s.activation = nn::Activation::tanh;
  s.heads.push_back({"action", kActionCount, nn::HeadSource::trunk, 0.01});
  for (int k = 0; k < kRewardHeads; ++k) s.heads.push_back({std::string("value_") + sim::kRewardHeadNames[k], 1});
  return s;
}

inline constexpr int kActionHead = 0;
inline constexpr int kValueHead0 = 1;

struct PolicyOutput {
  std::vector<double> logp;  // log-probabilities over actions
  HeadArray values{};
};

inline PolicyOutput evaluate_policy(const nn::Net& net, std::span<const double> x, nn::Cache& cache) {
  net.forward(x, cache);
  PolicyOutput out;
  out.logp = nn::log_softmax(cache.heads[kActionHead]);
  for (int k = 0; k < kRewardHeads; ++k) out.values[k] = cache.heads[kValueHead0 + k][0];
  return out;
}

inline int sample_index(std::span<const double> logp, Rng& rng) {
  std::vector<double> p(logp.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logp[i]);
  return static_cast<int>(rng.categorical(p));
}

/// Where a team's goals come from.
class GoalSource {
 public:
  virtual ~GoalSource() = default;
  virtual macro::MacroGoal sample(const sim::GameState& s, sim::Team team, Rng& rng) const = 0;
};

class MetaGoalSource : public GoalSource {
 public:
  MetaGoalSource(std::shared_ptr<const nn::Net> meta, double temperature) : meta_(std::move(meta)), temperature_(temperature) {}
  macro::MacroGoal sample(const sim::GameState& s, sim::Team team, Rng& rng) const override {
    return meta::sample_goal(*meta_, macro::team_features(s, team), temperature_, rng);
  }

 private:
  std::shared_ptr<const nn::Net> meta_;
  double temperature_;
};

class FixedGoalSource : public GoalSource {
 public:
  explicit FixedGoalSource(macro::MacroGoal g) : goal_(g) {}
  macro::MacroGoal sample(const sim::GameState&, sim::Team, Rng&) const override { return goal_; }

 private:
  macro::MacroGoal goal_;
};

/// Team controller driven by a policy net, optionally conditioned on goals
/// refreshed every `interval` frames. Actions are sampled.
class PolicyController : public sim::Controller {
 public:
  PolicyController(std::string id, std::shared_ptr<const nn::Net> policy, std::shared_ptr<const GoalSource> goals,
                   int interval)
      : id_(std::move(id)), policy_(std::move(policy)), goals_(std::move(goals)), interval_(interval) {}

  std::string id() const override { return id_; }

  void begin(const sim::GameState&, sim::Team, std::uint64_t seed) override {
    rng_ = Rng(seed);
    goal_rng_ = Rng(derive_seed(seed, {0x676f616cULL}));
    goal_.reset();
  }

  void act(const sim::GameState& s, sim::Team team, sim::TeamActions& out) override {
    if (goals_ && (s.frame % interval_ == 0 || !goal_)) goal_ = goals_->sample(s, team, goal_rng_);
    const macro::MacroState now = macro::extract_macro_state(s, team);
    for (int k = 0; k < sim::kTeamSize; ++k) {
      const int id = sim::GameState::hero_id(team, k);
      if (!s.hero(id).alive()) {
        out[k] = sim::HeroAction::noop();
        continue;
      }
      const auto x = policy_input(s, id, goal_ ? &*goal_ : nullptr, &now);
      const PolicyOutput p = evaluate_policy(*policy_, x, cache_);
      out[k] = decode_action(s, id, sample_index(p.logp, rng_));
    }
  }

  const std::optional<macro::MacroGoal>& goal() const { return goal_; }

 private:
  std::string id_;
  std::shared_ptr<const nn::Net> policy_;
  std::shared_ptr<const GoalSource> goals_;
  int interval_;
  Rng rng_;
  Rng goal_rng_;
  std::optional<macro::MacroGoal> goal_;
  nn::Cache cache_;
};

}  // namespace macrogoal::rl
