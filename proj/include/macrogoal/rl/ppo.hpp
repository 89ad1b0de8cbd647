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
#include <span>
#include <vector>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/io.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/sim/types.hpp"

namespace macrogoal::rl {

using sim::kRewardHeads;
using HeadArray = std::array<double, kRewardHeads>;

struct PPOConfig {
  double clip = 0.2;              // tau
  double dual_clip = 3.0;         // c
  double gamma = 0.995;
  double gae_lambda = 0.95;
  int goal_interval = 60;         // N, frames a sampled goal is held
  HeadArray head_weights = {1, 0.2, 1, 1, 1, 1};  // kda damped: lumpy death penalties otherwise teach retreat
  macro::GoalWeights goal_weights = macro::unit_weights();
  int epochs = 2;
  int minibatch = 1024;
  int games_per_iteration = 2;
  double lr = 3e-4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 5.0;     // <= 0 disables clipping
  double temperature = 1.0;       // goal sampling temperature
  std::vector<int> hidden = {64, 64};
  int probe_interval = 10;        // iterations between probe matches; 0 disables
  int probe_games = 2;

  void validate() const {
    require(clip > 0.0 && clip < 1.0, ErrorKind::config, "ppo.clip must be in (0, 1)");
    require(dual_clip > 1.0 + clip, ErrorKind::config, "ppo.dual_clip must exceed 1 + clip");
    require(gamma > 0.0 && gamma <= 1.0, ErrorKind::config, "ppo.gamma must be in (0, 1]");
    require(gae_lambda >= 0.0 && gae_lambda <= 1.0, ErrorKind::config, "ppo.gae_lambda must be in [0, 1]");
    require(goal_interval >= 1, ErrorKind::config, "ppo.goal_interval must be >= 1");
    for (double w : head_weights) require(w >= 0.0, ErrorKind::config, "ppo.head_weights must be >= 0");
    for (double w : goal_weights) require(w >= 0.0, ErrorKind::config, "ppo.goal_weights must be >= 0");
    require(epochs >= 1 && minibatch >= 1 && games_per_iteration >= 1, ErrorKind::config, "ppo batch settings must be >= 1");
    require(lr > 0.0 && temperature > 0.0, ErrorKind::config, "ppo.lr and ppo.temperature must be > 0");
    for (int h : hidden) require(h > 0, ErrorKind::config, "ppo.hidden widths must be > 0");
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PPOConfig, clip, dual_clip, gamma, gae_lambda, goal_interval, head_weights,
                                                goal_weights, epochs, minibatch, games_per_iteration, lr, entropy_coef,
                                                value_coef, max_grad_norm, temperature, hidden, probe_interval, probe_games)

/// d(c_t, g) - d(c_next, g): positive when the macro-state moves toward the goal.
inline double intrinsic_reward(std::span<const int> c_t, std::span<const int> c_next, std::span<const int> goal,
                               std::span<const double> w) {
  require(c_t.size() == c_next.size(), ErrorKind::shape, "intrinsic_reward: dimension mismatch");
  return macro::goal_distance(c_t, goal, w) - macro::goal_distance(c_next, goal, w);
}

inline double intrinsic_reward(const macro::MacroState& c_t, const macro::MacroState& c_next, const macro::MacroGoal& g,
                               const macro::GoalWeights& w = macro::unit_weights()) {
  return intrinsic_reward(c_t.values, c_next.values, g.values, w);
}

inline double weighted_sum(const HeadArray& v, const HeadArray& w) {
  double s = 0.0;
  for (int k = 0; k < kRewardHeads; ++k) s += w[k] * v[k];
  return s;
}

/// One step of a single hero's sequence as the estimator sees it.
struct StepValues {
  HeadArray rewards{};
  HeadArray values{};
  bool done = false;  // the episode ends after this step
};

struct AdvantageResult {
  std::vector<double> advantages;     // scalar GAE on the weighted reward and V_total, unnormalized
  std::vector<HeadArray> returns;     // per-head lambda-returns
};

/// GAE over an ordered sequence; `bootstrap` is V of the state after the last
/// step when it is not terminal.
inline AdvantageResult compute_advantages(std::span<const StepValues> steps, double gamma, double lambda,
                                          const HeadArray& w, const HeadArray& bootstrap = {}) {
  require(!steps.empty(), ErrorKind::data, "compute_advantages needs a non-empty sequence");
  const std::size_t n = steps.size();
  AdvantageResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, HeadArray{});
  HeadArray next_v = bootstrap;
  HeadArray head_gae{};
  double next_total = weighted_sum(bootstrap, w);
  double gae = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const StepValues& s = steps[i];
    const double live = s.done ? 0.0 : 1.0;
    if (s.done) {
      head_gae = {};
      gae = 0.0;
    }
    for (int k = 0; k < kRewardHeads; ++k) {
      const double delta = s.rewards[k] + gamma * live * next_v[k] - s.values[k];
      head_gae[k] = delta + gamma * lambda * live * head_gae[k];
      out.returns[i][k] = head_gae[k] + s.values[k];
    }
    const double v_total = weighted_sum(s.values, w);
    const double delta = weighted_sum(s.rewards, w) + gamma * live * next_total - v_total;
    gae = delta + gamma * lambda * live * gae;
    out.advantages[i] = gae;
    next_v = s.values;
    next_total = v_total;
  }
  return out;
}

/// Rescales to mean 0 and standard deviation 1 (population); a constant batch
/// becomes all zeros.
inline void normalize_advantages(std::span<double> a) {
  if (a.empty()) return;
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= static_cast<double>(a.size());
  const double sd = std::sqrt(var);
  for (double& v : a) v = sd > 1e-12 ? (v - mean) / sd : 0.0;
}

/// Per-sample dual-clip objective (to be maximized).
inline double dual_clip_objective(double ratio, double adv, double tau, double c) {
  const double clipped = std::clamp(ratio, 1.0 - tau, 1.0 + tau);
  const double surrogate = std::min(clipped * adv, ratio * adv);
  return adv < 0.0 ? std::max(c * adv, surrogate) : surrogate;
}

/// d objective / d log pi_new for one sample.
inline double dual_clip_objective_grad(double ratio, double adv, double tau, double c) {
  const double clipped = std::clamp(ratio, 1.0 - tau, 1.0 + tau);
  const double unclipped_term = ratio * adv;
  if (unclipped_term > clipped * adv) return 0.0;  // clipped branch is the min
  if (adv < 0.0 && c * adv > unclipped_term) return 0.0;
  return unclipped_term;
}

/// Batch-mean dual-clip objective over log-probabilities.
inline double dual_clip_policy_loss(std::span<const double> logp_new, std::span<const double> logp_old,
                                    std::span<const double> adv, double tau, double c) {
  require(logp_new.size() == logp_old.size() && logp_new.size() == adv.size(), ErrorKind::shape,
          "dual_clip_policy_loss: length mismatch");
  require(c > 1.0, ErrorKind::config, "dual clip c must be > 1");
  require(!adv.empty(), ErrorKind::data, "dual_clip_policy_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < adv.size(); ++i) {
    const double r = std::exp(logp_new[i] - logp_old[i]);
    require(std::isfinite(r), ErrorKind::numeric, "non-finite probability ratio");
    total += dual_clip_objective(r, adv[i], tau, c);
  }
  return total / static_cast<double>(adv.size());
}

/// Mean over the batch of sum_k (R^k - V^k)^2.
inline double multi_head_value_loss(std::span<const HeadArray> values, std::span<const HeadArray> targets) {
  require(values.size() == targets.size(), ErrorKind::shape, "multi_head_value_loss: length mismatch");
  require(!values.empty(), ErrorKind::data, "multi_head_value_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (int k = 0; k < kRewardHeads; ++k) {
      const double e = targets[i][k] - values[i][k];
      total += e * e;
    }
  return total / static_cast<double>(values.size());
}

}  // namespace macrogoal::rl
