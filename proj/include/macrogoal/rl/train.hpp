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
#include <cstdio>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/core/parallel.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/demo/scripted.hpp"
#include "macrogoal/nn/adam.hpp"
#include "macrogoal/nn/checkpoint.hpp"
#include "macrogoal/nn/loss.hpp"
#include "macrogoal/rl/policy.hpp"
#include "macrogoal/rl/ppo.hpp"
#include "macrogoal/sim/controller.hpp"

namespace macrogoal::rl {

struct Transition {
  int frame = 0;
  int hero = 0;
  bool alive = true;
  std::vector<double> input;  // empty for dead heroes
  std::optional<macro::MacroGoal> goal;
  int action = 0;
  double logp = 0.0;
  sim::RewardVector rewards;
  HeadArray values{};
  bool done = false;
};

struct GameRollout {
  std::array<std::vector<Transition>, sim::kHeroCount> heroes;
  std::array<HeadArray, sim::kHeroCount> episode_return{};
  std::vector<std::array<macro::MacroState, 2>> macro;  // f(s_t) per frame, both teams
  std::optional<sim::Team> winner;
  int length = 0;
};

struct RolloutSettings {
  std::shared_ptr<const sim::EnvConfig> env;
  std::array<sim::Lineup, 2> lineups{};
  std::uint64_t seed = 0;
  const GoalSource* goals = nullptr;  // null: goal-free baseline
  int goal_interval = 60;
  macro::GoalWeights goal_weights = macro::unit_weights();
};

/// One self-play game: both teams act with the same policy; each team's goal
/// is resampled at frames t = 0 mod N and held in between.
inline GameRollout self_play_game(const nn::Net& policy, const RolloutSettings& rs) {
  sim::GameState s = sim::new_game(rs.lineups[0], rs.lineups[1], rs.seed, rs.env);
  Rng act_rng(derive_seed(rs.seed, {0x616374ULL}));
  std::array<Rng, 2> goal_rng = {Rng(derive_seed(rs.seed, {0x676f616cULL, 0})), Rng(derive_seed(rs.seed, {0x676f616cULL, 1}))};
  std::array<std::optional<macro::MacroGoal>, 2> goal;
  std::array<macro::GoalWeights, sim::kTeamSize> hero_w;
  for (int k = 0; k < sim::kTeamSize; ++k) hero_w[k] = macro::hero_weights(rs.goal_weights, k);
  GameRollout out;
  nn::Cache cache;
  std::array<sim::HeroAction, sim::kHeroCount> actions{};
  std::array<macro::MacroState, 2> now = {macro::extract_macro_state(s, sim::Team::blue),
                                          macro::extract_macro_state(s, sim::Team::red)};
  while (!s.done) {
    out.macro.push_back(now);
    for (int t = 0; t < 2; ++t)
      if (rs.goals && s.frame % rs.goal_interval == 0) goal[t] = rs.goals->sample(s, static_cast<sim::Team>(t), goal_rng[t]);
    for (int h = 0; h < sim::kHeroCount; ++h) {
      const int t = h / sim::kTeamSize;
      Transition tr;
      tr.frame = s.frame;
      tr.hero = h;
      tr.alive = s.units[h].alive();
      tr.goal = goal[t];
      auto x = policy_input(s, h, goal[t] ? &*goal[t] : nullptr, &now[t]);
      const PolicyOutput p = evaluate_policy(policy, x, cache);
      tr.values = p.values;
      if (tr.alive) {
        tr.action = sample_index(p.logp, act_rng);
        tr.logp = p.logp[tr.action];
        tr.input = std::move(x);
        actions[h] = decode_action(s, h, tr.action);
      } else {
        actions[h] = sim::HeroAction::noop();
      }
      out.heroes[h].push_back(std::move(tr));
    }
    sim::StepResult r = sim::step(s, std::span<const sim::HeroAction, sim::kHeroCount>(actions));
    const std::array<macro::MacroState, 2> next = {macro::extract_macro_state(s, sim::Team::blue),
                                                   macro::extract_macro_state(s, sim::Team::red)};
    for (int h = 0; h < sim::kHeroCount; ++h) {
      const int t = h / sim::kTeamSize;
      Transition& tr = out.heroes[h].back();
      tr.rewards = r.rewards[h];
      tr.rewards[sim::RewardHead::goal] =
          goal[t] ? intrinsic_reward(now[t], next[t], *goal[t], hero_w[h % sim::kTeamSize]) : 0.0;
      tr.done = r.done;
      for (int k = 0; k < kRewardHeads; ++k) out.episode_return[h][k] += tr.rewards.heads[k];
    }
    now = next;
  }
  out.macro.push_back(now);
  out.winner = s.winner;
  out.length = s.frame;
  return out;
}

// ---- training ---------------------------------------------------------------------

struct Sample {
  const Transition* tr = nullptr;
  double advantage = 0.0;
  HeadArray returns{};
};

struct UpdateStats {
  double objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  std::size_t count = 0;
};

inline constexpr std::size_t kPolicyGradChunk = 64;

/// Gradient of (-objective + c_v * value loss - c_e * entropy), mean over the batch.
inline UpdateStats ppo_gradient(const nn::Net& net, std::span<const Sample* const> batch, const PPOConfig& cfg,
                                std::vector<double>& grad, int workers) {
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t chunks = (batch.size() + kPolicyGradChunk - 1) / kPolicyGradChunk;
  std::vector<std::vector<double>> parts(chunks);
  std::vector<UpdateStats> stats(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    parts[c].assign(net.param_count(), 0.0);
    nn::Cache cache;
    std::vector<std::vector<double>> dheads(net.spec().heads.size());
    const std::size_t e = std::min(batch.size(), (c + 1) * kPolicyGradChunk);
    for (std::size_t i = c * kPolicyGradChunk; i < e; ++i) {
      const Sample& smp = *batch[i];
      const PolicyOutput p = evaluate_policy(net, smp.tr->input, cache);
      const int a = smp.tr->action;
      const double ratio = std::exp(p.logp[a] - smp.tr->logp);
      require(std::isfinite(ratio), ErrorKind::numeric, "non-finite probability ratio");
      const double obj = dual_clip_objective(ratio, smp.advantage, cfg.clip, cfg.dual_clip);
      const double gobj = dual_clip_objective_grad(ratio, smp.advantage, cfg.clip, cfg.dual_clip);
      double h = 0.0;
      for (double lp : p.logp) h -= std::exp(lp) * lp;
      auto& da = dheads[kActionHead];
      da.resize(kActionCount);
      for (int j = 0; j < kActionCount; ++j) {
        const double pj = std::exp(p.logp[j]);
        const double dobj = gobj * ((j == a ? 1.0 : 0.0) - pj);
        const double dent = -pj * (p.logp[j] + h);
        da[j] = scale * (-dobj - cfg.entropy_coef * dent);
      }
      double vl = 0.0;
      for (int k = 0; k < kRewardHeads; ++k) {
        const double err = p.values[k] - smp.returns[k];
        vl += err * err;
        dheads[kValueHead0 + k] = {scale * cfg.value_coef * 2.0 * err};
      }
      net.backward(cache, dheads, parts[c]);
      stats[c].objective += obj;
      stats[c].value_loss += vl;
      stats[c].entropy += h;
      stats[c].count += 1;
    }
  });
  grad.assign(net.param_count(), 0.0);
  UpdateStats total;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += parts[c][i];
    total.objective += stats[c].objective;
    total.value_loss += stats[c].value_loss;
    total.entropy += stats[c].entropy;
    total.count += stats[c].count;
  }
  return total;
}

/// Advantages and returns for every living-hero transition of the batch.
inline std::vector<Sample> build_samples(const std::vector<GameRollout>& games, const PPOConfig& cfg, const HeadArray& w) {
  std::vector<Sample> out;
  std::vector<StepValues> seq;
  for (const auto& g : games) {
    for (const auto& hero : g.heroes) {
      seq.clear();
      for (const auto& tr : hero) seq.push_back({tr.rewards.heads, tr.values, tr.done});
      if (seq.empty()) continue;
      const AdvantageResult adv = compute_advantages(seq, cfg.gamma, cfg.gae_lambda, w);
      for (std::size_t i = 0; i < hero.size(); ++i)
        if (hero[i].alive) out.push_back({&hero[i], adv.advantages[i], adv.returns[i]});
    }
  }
  std::vector<double> a(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) a[i] = out[i].advantage;
  normalize_advantages(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].advantage = a[i];
  return out;
}

enum class TrainMode { mgg, baseline };

inline const char* to_string(TrainMode m) { return m == TrainMode::mgg ? "mgg" : "baseline"; }

struct RLTrainOptions {
  TrainMode mode = TrainMode::mgg;
  PPOConfig ppo;
  std::shared_ptr<const sim::EnvConfig> env;
  std::vector<sim::Lineup> lineups;          // training pool; each side drawn per game
  std::shared_ptr<const GoalSource> goals;   // required in mgg mode
  int iterations = 10;
  std::uint64_t seed = 0;
  fs::path out_dir;                          // empty: nothing written
  bool resume = false;
  int workers = 1;
  std::string meta_reference;                // recorded in the checkpoint sidecar
};

struct IterationLog {
  int iteration = 0;
  int games = 0;
  std::size_t samples = 0;
  HeadArray mean_return{};
  double objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_length = 0.0;
  std::optional<double> probe_win_rate;
};

inline std::string rl_csv_header() {
  std::string h = "iteration,games,samples";
  for (const char* n : sim::kRewardHeadNames) h += std::string(",return_") + n;
  return h + ",policy_objective,value_loss,entropy,mean_length,probe_win_rate";
}

inline std::string rl_csv_row(const IterationLog& l) {
  char buf[64];
  std::string row = std::to_string(l.iteration) + "," + std::to_string(l.games) + "," + std::to_string(l.samples);
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    row += buf;
  };
  for (double v : l.mean_return) put(v);
  put(l.objective);
  put(l.value_loss);
  put(l.entropy);
  put(l.mean_length);
  if (l.probe_win_rate) {
    std::snprintf(buf, sizeof buf, ",%.6f", *l.probe_win_rate);
    row += buf;
  } else {
    row += ",";
  }
  return row;
}

inline const std::vector<sim::Lineup>& default_lineup_pool() {
  static const std::vector<sim::Lineup> pool = {demo::canonical_lineup(demo::StrategyId::three_lane),
                                                demo::canonical_lineup(demo::StrategyId::marksman_core),
                                                demo::canonical_lineup(demo::StrategyId::resource_grab)};
  return pool;
}

/// Share of probe games won against the scripted three_lane bot, sides
/// alternating; draws count one half.
inline double probe_win_rate(const std::shared_ptr<const nn::Net>& policy, const RLTrainOptions& o, int iteration) {
  const int n = o.ppo.probe_games;
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  const auto lineup = demo::canonical_lineup(demo::StrategyId::three_lane);
  parallel_for(score.size(), o.workers, [&](std::size_t g) {
    const std::uint64_t seed = derive_seed(o.seed, {0x70726f6265ULL, static_cast<std::uint64_t>(iteration), g});
    sim::GameSetup setup{o.env, {lineup, lineup}, seed, "probe"};
    PolicyController agent("agent", policy, o.mode == TrainMode::mgg ? o.goals : nullptr, o.ppo.goal_interval);
    demo::ScriptedController bot(demo::StrategyId::three_lane, 0.0);
    const bool agent_blue = g % 2 == 0;
    const auto res = agent_blue ? sim::play_game(setup, agent, bot) : sim::play_game(setup, bot, agent);
    const sim::Team agent_team = agent_blue ? sim::Team::blue : sim::Team::red;
    score[g] = !res.winner ? 0.5 : (*res.winner == agent_team ? 1.0 : 0.0);
  });
  return std::accumulate(score.begin(), score.end(), 0.0) / std::max(1, n);
}

struct RLTrainResult {
  std::shared_ptr<nn::Net> policy;
  std::vector<IterationLog> log;
  int iterations_done = 0;
};

inline fs::path policy_checkpoint_path(const fs::path& dir) { return dir / "policy.bin"; }

/// Keeps the CSV header and the rows of iterations <= last.
inline std::vector<std::string> csv_rows_through(const fs::path& csv, int last) {
  std::vector<std::string> keep;
  if (!fs::exists(csv)) return keep;
  std::istringstream in(read_text(csv));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    if (std::stoi(line.substr(0, line.find(','))) <= last) keep.push_back(line);
  }
  return keep;
}

/// Self-play Dual-clip PPO. In baseline mode goals are absent and the goal
/// head weight is forced to 0.
inline RLTrainResult train_mgg(const RLTrainOptions& o) {
  o.ppo.validate();
  require(o.iterations >= 0, ErrorKind::config, "iterations must be >= 0");
  require(o.mode == TrainMode::baseline || o.goals, ErrorKind::config, "mgg mode needs a goal source");
  auto env = o.env ? o.env : std::make_shared<const sim::EnvConfig>();
  const auto& pool = o.lineups.empty() ? default_lineup_pool() : o.lineups;
  HeadArray w = o.ppo.head_weights;
  if (o.mode == TrainMode::baseline) w[static_cast<int>(sim::RewardHead::goal)] = 0.0;
  const GoalSource* goals = o.mode == TrainMode::mgg ? o.goals.get() : nullptr;

  RLTrainResult res;
  res.policy = std::make_shared<nn::Net>(policy_spec(o.ppo.hidden));
  nn::Net& net = *res.policy;
  Rng init_rng(derive_seed(o.seed, {0x696e6974ULL}));
  net.init(init_rng);
  nn::AdamState adam(net.param_count(), o.ppo.lr);

  int start = 1;
  std::vector<std::string> kept_rows;
  const fs::path ckpt = o.out_dir.empty() ? fs::path() : policy_checkpoint_path(o.out_dir);
  const fs::path csv_path = o.out_dir.empty() ? fs::path() : o.out_dir / "train.csv";
  if (o.resume && !ckpt.empty() && fs::exists(ckpt)) {
    const Json side = nn::read_sidecar(ckpt);
    require(side.value("mode", std::string()) == to_string(o.mode), ErrorKind::config,
            "resume: checkpoint was trained in a different mode");
    nn::load_checkpoint_into(ckpt, net);
    if (fs::exists(nn::adam_path(ckpt))) nn::load_adam(nn::adam_path(ckpt), adam);
    const int done = side.value("iteration", 0);
    start = done + 1;
    kept_rows = csv_rows_through(csv_path, done);
    res.iterations_done = done;
  }
  std::optional<std::ofstream> csv;
  auto save = [&](int iteration) {
    if (ckpt.empty()) return;
    Json extra = {{"kind", "policy"},
                  {"mode", to_string(o.mode)},
                  {"iteration", iteration},
                  {"goal_interval", o.ppo.goal_interval},
                  {"temperature", o.ppo.temperature},
                  {"meta", o.meta_reference},
                  {"ppo", o.ppo}};
    nn::save_checkpoint(ckpt, net, extra);
    nn::save_adam(nn::adam_path(ckpt), adam);
  };
  if (!o.out_dir.empty()) {
    csv.emplace(open_out(csv_path, std::ios::out | std::ios::binary | std::ios::trunc));
    *csv << rl_csv_header() << '\n';
    for (const auto& r : kept_rows) *csv << r << '\n';
    csv->flush();
    if (start == 1) save(0);
  }

  std::vector<double> grad;
  for (int it = start; it <= o.iterations; ++it) {
    const int n_games = o.ppo.games_per_iteration;
    std::vector<GameRollout> games(static_cast<std::size_t>(n_games));
    const std::shared_ptr<const nn::Net> frozen = std::make_shared<const nn::Net>(net);
    parallel_for(games.size(), o.workers, [&](std::size_t g) {
      const std::uint64_t seed = derive_seed(o.seed, {static_cast<std::uint64_t>(it), g});
      Rng pick(derive_seed(seed, {0x6c696e65ULL}));
      RolloutSettings rs;
      rs.env = env;
      rs.lineups = {pool[pick.below(pool.size())], pool[pick.below(pool.size())]};
      rs.seed = seed;
      rs.goals = goals;
      rs.goal_interval = o.ppo.goal_interval;
      rs.goal_weights = o.ppo.goal_weights;
      games[g] = self_play_game(*frozen, rs);
    });

    const std::vector<Sample> samples = build_samples(games, o.ppo, w);
    std::vector<const Sample*> order;
    for (const auto& s : samples) order.push_back(&s);
    Rng mb_rng(derive_seed(o.seed, {static_cast<std::uint64_t>(it), 0x6d62ULL}));
    UpdateStats agg;
    for (int epoch = 0; epoch < o.ppo.epochs; ++epoch) {
      mb_rng.shuffle(std::span<const Sample*>(order));
      for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(o.ppo.minibatch)) {
        const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(o.ppo.minibatch));
        const auto st = ppo_gradient(net, std::span<const Sample* const>(order.data() + b, e - b), o.ppo, grad, o.workers);
        if (epoch == 0) {
          agg.objective += st.objective;
          agg.value_loss += st.value_loss;
          agg.entropy += st.entropy;
          agg.count += st.count;
        }
        nn::clip_grad_norm(grad, o.ppo.max_grad_norm);
        nn::adam_step(net.mutable_params(), grad, adam);
      }
    }

    IterationLog l;
    l.iteration = it;
    l.games = n_games;
    l.samples = samples.size();
    for (const auto& g : games) {
      for (const auto& r : g.episode_return)
        for (int k = 0; k < kRewardHeads; ++k) l.mean_return[k] += r[k];
      l.mean_length += g.length;
    }
    for (double& v : l.mean_return) v /= static_cast<double>(n_games * sim::kHeroCount);
    l.mean_length /= n_games;
    const double n = static_cast<double>(std::max<std::size_t>(1, agg.count));
    l.objective = agg.objective / n;
    l.value_loss = agg.value_loss / n;
    l.entropy = agg.entropy / n;
    require(std::isfinite(l.objective) && std::isfinite(l.value_loss), ErrorKind::numeric,
            "training diverged at iteration " + std::to_string(it));
    if (o.ppo.probe_interval > 0 && o.ppo.probe_games > 0 && (it % o.ppo.probe_interval == 0 || it == o.iterations))
      l.probe_win_rate = probe_win_rate(std::make_shared<const nn::Net>(net), o, it);
    res.log.push_back(l);
    res.iterations_done = it;
    if (csv) {
      *csv << rl_csv_row(l) << '\n';
      csv->flush();
    }
    save(it);
  }
  return res;
}

}  // namespace macrogoal::rl
