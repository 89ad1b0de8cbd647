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

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "macrogoal/rl/train.hpp"
#include "support/fixtures.hpp"

namespace macrogoal::rl {
namespace {

namespace fs = std::filesystem;
using testing::error_kind;

// Independent piecewise evaluation; each branch returns the same product the
// closed form selects, so results agree to the bit.
double piecewise_oracle(double r, double a, double tau, double c) {
  const double lo = 1.0 - tau, hi = 1.0 + tau;
  double base;
  if (a >= 0.0) {
    base = r > hi ? hi * a : r * a;
  } else {
    base = r < lo ? lo * a : r * a;
    if (c * a > base) base = c * a;
  }
  return base;
}

double standard_ppo(double r, double a, double tau) {
  return std::min(std::clamp(r, 1.0 - tau, 1.0 + tau) * a, r * a);
}

TEST(DualClipTest, MatchesPiecewiseOracleBitwise) {
  Rng rng(1);
  int negative = 0;
  for (int i = 0; i < 100000; ++i) {
    const double tau = 0.01 + 0.6 * rng.uniform();
    const double c = 1.0 + tau + 1e-3 + 5.0 * rng.uniform();
    const double r = std::exp(4.0 * rng.uniform() - 2.0);
    const double a = 6.0 * rng.uniform() - 3.0;
    const double got = dual_clip_objective(r, a, tau, c);
    ASSERT_EQ(std::bit_cast<std::uint64_t>(got), std::bit_cast<std::uint64_t>(piecewise_oracle(r, a, tau, c)))
        << "r " << r << " a " << a << " tau " << tau << " c " << c;
    if (a >= 0.0) {
      ASSERT_EQ(std::bit_cast<std::uint64_t>(got), std::bit_cast<std::uint64_t>(standard_ppo(r, a, tau)));
    } else {
      ASSERT_GE(got, c * a);
      ++negative;
    }
  }
  EXPECT_GT(negative, 40000);
}

TEST(DualClipTest, WorkedExamples) {
  EXPECT_EQ(dual_clip_objective(10.0, -1.0, 0.2, 3.0), -3.0);
  EXPECT_EQ(dual_clip_objective(0.5, -1.0, 0.2, 3.0), -0.8);
  for (double a : {-2.0, -0.1, 0.0, 0.7, 4.0}) EXPECT_EQ(dual_clip_objective(1.0, a, 0.2, 3.0), a);
}

TEST(DualClipTest, BatchLossIsTheMeanOfSampleObjectives) {
  Rng rng(2);
  std::vector<double> lnew(500), lold(500), adv(500);
  double expect = 0.0;
  for (std::size_t i = 0; i < adv.size(); ++i) {
    lnew[i] = -3.0 * rng.uniform();
    lold[i] = -3.0 * rng.uniform();
    adv[i] = 4.0 * rng.uniform() - 2.0;
    expect += piecewise_oracle(std::exp(lnew[i] - lold[i]), adv[i], 0.2, 3.0);
  }
  EXPECT_EQ(dual_clip_policy_loss(lnew, lold, adv, 0.2, 3.0), expect / 500.0);
  std::vector<double> short_adv(3, 1.0);
  EXPECT_EQ(error_kind([&] { dual_clip_policy_loss(lnew, lold, short_adv, 0.2, 3.0); }), ErrorKind::shape);
  EXPECT_EQ(error_kind([&] { dual_clip_policy_loss(lnew, lold, adv, 0.2, 1.0); }), ErrorKind::config);
  EXPECT_EQ(error_kind([&] { dual_clip_policy_loss({}, {}, {}, 0.2, 3.0); }), ErrorKind::data);
  std::vector<double> big = {1000.0}, zero = {0.0}, one = {1.0};
  EXPECT_EQ(error_kind([&] { dual_clip_policy_loss(big, zero, one, 0.2, 3.0); }), ErrorKind::numeric);
}

TEST(DualClipTest, GradientMatchesFiniteDifferencesAwayFromKinks) {
  Rng rng(3);
  const double h = 1e-6;
  for (int i = 0; i < 2000; ++i) {
    const double r = std::exp(3.0 * rng.uniform() - 1.5);
    const double a = 4.0 * rng.uniform() - 2.0;
    const double l = std::log(r);
    if (std::abs(r - 0.8) < 1e-3 || std::abs(r - 1.2) < 1e-3 || std::abs(r - 3.0) < 1e-3) continue;
    const double fd = (dual_clip_objective(std::exp(l + h), a, 0.2, 3.0) - dual_clip_objective(std::exp(l - h), a, 0.2, 3.0)) / (2 * h);
    EXPECT_NEAR(dual_clip_objective_grad(r, a, 0.2, 3.0), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

macro::MacroState random_macro(Rng& rng) {
  macro::MacroState c;
  for (int d = 0; d < macro::kMacroDim; ++d) c[d] = static_cast<int>(rng.below(macro::kMacroArity[d]));
  return c;
}

TEST(IntrinsicRewardTest, Examples) {
  macro::MacroState a{}, b{};
  macro::MacroGoal g{};
  a[macro::kMonstersTaken] = 0;
  b[macro::kMonstersTaken] = 1;
  g[macro::kMonstersTaken] = 2;
  EXPECT_EQ(intrinsic_reward(a, b, g), 1.0);
  EXPECT_EQ(intrinsic_reward(b, a, g), -1.0);
  EXPECT_EQ(intrinsic_reward(a, a, g), 0.0);
  std::vector<int> three(3, 0), ten(10, 0);
  std::vector<double> w(10, 1.0);
  EXPECT_EQ(error_kind([&] { intrinsic_reward(three, ten, ten, w); }), ErrorKind::shape);
}

TEST(IntrinsicRewardTest, TelescopesExactlyOnRandomTrajectories) {
  Rng rng(4);
  for (int traj = 0; traj < 1000; ++traj) {
    const int len = 2 + static_cast<int>(rng.below(200));
    const macro::MacroGoal g = random_macro(rng);
    macro::GoalWeights w = macro::unit_weights();
    if (traj % 2 == 1) w = macro::hero_weights(w, static_cast<int>(rng.below(sim::kTeamSize)));
    std::vector<macro::MacroState> cs = {random_macro(rng)};
    for (int t = 1; t < len; ++t) {
      macro::MacroState c = cs.back();
      const int d = static_cast<int>(rng.below(macro::kMacroDim));
      c[d] = static_cast<int>(rng.below(macro::kMacroArity[d]));
      cs.push_back(c);
    }
    double sum = 0.0, stationary = 0.0;
    for (int t = 0; t + 1 < len; ++t) {
      sum += intrinsic_reward(cs[t], cs[t + 1], g, w);
      stationary += intrinsic_reward(cs[t], cs[t], g, w);
    }
    ASSERT_EQ(sum, macro::goal_distance(cs.front(), g, w) - macro::goal_distance(cs.back(), g, w));
    ASSERT_EQ(stationary, 0.0);
  }
}

StepValues step_values(double r, double v, bool done = false) {
  StepValues s;
  s.rewards[0] = r;
  s.values[0] = v;
  s.done = done;
  return s;
}

HeadArray first_head() {
  HeadArray w{};
  w[0] = 1.0;
  return w;
}

TEST(AdvantageTest, ZeroDiscountGivesOneStepReturns) {
  Rng rng(5);
  std::vector<StepValues> seq;
  for (int i = 0; i < 6; ++i) {
    StepValues s;
    for (int k = 0; k < kRewardHeads; ++k) {
      s.rewards[k] = rng.uniform();
      s.values[k] = rng.uniform();
    }
    seq.push_back(s);
  }
  const auto res = compute_advantages(seq, 0.0, 0.9, PPOConfig{}.head_weights);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (int k = 0; k < kRewardHeads; ++k) EXPECT_DOUBLE_EQ(res.returns[i][k], seq[i].rewards[k]);
  }
}

TEST(AdvantageTest, LambdaOneIsMonteCarloMinusValue) {
  const std::vector<StepValues> seq = {step_values(1.0, 0.5), step_values(-2.0, 0.1), step_values(3.0, -0.4, true)};
  const double g = 0.9;
  const auto res = compute_advantages(seq, g, 1.0, first_head());
  const double mc[3] = {1.0 + g * (-2.0) + g * g * 3.0, -2.0 + g * 3.0, 3.0};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(res.advantages[i], mc[i] - seq[i].values[0], 1e-12);
    EXPECT_NEAR(res.returns[i][0], mc[i], 1e-12);
  }
}

TEST(AdvantageTest, HandComputedTableWithBootstrap) {
  // gamma 0.5, lambda 0.5, bootstrap V = 2 after the last step
  const std::vector<StepValues> seq = {step_values(1.0, 1.0), step_values(0.0, 2.0), step_values(2.0, 1.0)};
  HeadArray boot{};
  boot[0] = 2.0;
  const auto res = compute_advantages(seq, 0.5, 0.5, first_head(), boot);
  // deltas: 1 + 1 - 1 = 1; 0 + 0.5 - 2 = -1.5; 2 + 1 - 1 = 2
  EXPECT_DOUBLE_EQ(res.advantages[2], 2.0);
  EXPECT_DOUBLE_EQ(res.advantages[1], -1.5 + 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(res.advantages[0], 1.0 + 0.25 * (-1.0));
  EXPECT_DOUBLE_EQ(res.returns[0][0], 1.75);
}

TEST(AdvantageTest, TerminalStepsCutTheRecursion) {
  const std::vector<StepValues> a = {step_values(1.0, 0.0, true), step_values(5.0, 3.0)};
  const auto res = compute_advantages(a, 0.9, 0.9, first_head());
  EXPECT_DOUBLE_EQ(res.advantages[0], 1.0);
  EXPECT_EQ(error_kind([] { compute_advantages({}, 0.9, 0.9, HeadArray{}); }), ErrorKind::data);
}

TEST(AdvantageTest, TotalValueIsLinearInWeights) {
  Rng rng(6);
  HeadArray v{}, w{};
  for (int k = 0; k < kRewardHeads; ++k) {
    v[k] = rng.uniform() - 0.5;
    w[k] = rng.uniform();
  }
  HeadArray w2 = w;
  for (double& x : w2) x *= 4.0;
  EXPECT_EQ(weighted_sum(v, w2), 4.0 * weighted_sum(v, w));
}

TEST(AdvantageTest, NormalizationGivesZeroMeanUnitVariance) {
  std::vector<double> a = {1, 2, 3, 4, 10};
  normalize_advantages(a);
  double m = 0, v = 0;
  for (double x : a) m += x;
  m /= 5;
  for (double x : a) v += (x - m) * (x - m);
  EXPECT_NEAR(m, 0.0, 1e-12);
  EXPECT_NEAR(v / 5, 1.0, 1e-12);
  std::vector<double> c(4, 2.5);
  normalize_advantages(c);
  for (double x : c) EXPECT_EQ(x, 0.0);
}

TEST(ValueLossTest, Examples) {
  HeadArray zero{}, two{};
  two[0] = 2.0;
  EXPECT_EQ(multi_head_value_loss(std::vector<HeadArray>{zero}, std::vector<HeadArray>{zero}), 0.0);
  EXPECT_EQ(multi_head_value_loss(std::vector<HeadArray>{zero}, std::vector<HeadArray>{two}), 4.0);
  HeadArray four{};
  four[0] = 4.0;
  four[3] = -2.0;
  HeadArray half = four;
  for (double& x : half) x /= 2;
  EXPECT_EQ(multi_head_value_loss(std::vector<HeadArray>{zero}, std::vector<HeadArray>{four}),
            4.0 * multi_head_value_loss(std::vector<HeadArray>{zero}, std::vector<HeadArray>{half}));
  EXPECT_EQ(error_kind([&] { multi_head_value_loss(std::vector<HeadArray>{zero}, std::vector<HeadArray>{}); }),
            ErrorKind::shape);
}

// Loss that ppo_gradient differentiates, evaluated directly.
double ppo_loss(const nn::Net& net, const std::vector<Sample>& batch, const PPOConfig& cfg) {
  nn::Cache cache;
  double total = 0.0;
  for (const Sample& s : batch) {
    const PolicyOutput p = evaluate_policy(net, s.tr->input, cache);
    const double r = std::exp(p.logp[s.tr->action] - s.tr->logp);
    double h = 0.0, vl = 0.0;
    for (double lp : p.logp) h -= std::exp(lp) * lp;
    for (int k = 0; k < kRewardHeads; ++k) vl += (p.values[k] - s.returns[k]) * (p.values[k] - s.returns[k]);
    total += -piecewise_oracle(r, s.advantage, cfg.clip, cfg.dual_clip) + cfg.value_coef * vl - cfg.entropy_coef * h;
  }
  return total / static_cast<double>(batch.size());
}

TEST(PPOGradientTest, MatchesFiniteDifferences) {
  PPOConfig cfg;
  cfg.entropy_coef = 0.05;
  for (int instance = 0; instance < 5; ++instance) {
    Rng rng(100 + instance);
    nn::Net net(policy_spec({5, 4}));
    net.init(rng);
    for (double& x : net.mutable_params()) x += 0.2 * (2 * rng.uniform() - 1);
    std::vector<Transition> trs(12);
    std::vector<Sample> batch;
    nn::Cache cache;
    for (auto& tr : trs) {
      tr.input.resize(kPolicyInputWidth);
      for (double& x : tr.input) x = 2 * rng.uniform() - 1;
      tr.action = static_cast<int>(rng.below(kActionCount));
      const double lp = evaluate_policy(net, tr.input, cache).logp[tr.action];
      double shift;
      do {
        shift = 0.8 * rng.uniform() - 0.4;
      } while (std::abs(std::exp(-shift) - 0.8) < 0.02 || std::abs(std::exp(-shift) - 1.2) < 0.02);
      tr.logp = lp + shift;
      Sample s;
      s.tr = &tr;
      s.advantage = 2 * rng.uniform() - 1;
      for (double& v : s.returns) v = rng.uniform();
      batch.push_back(s);
    }
    std::vector<const Sample*> ptrs;
    for (const auto& s : batch) ptrs.push_back(&s);
    std::vector<double> grad;
    ppo_gradient(net, ptrs, cfg, grad, 1);
    const double h = 1e-6;
    for (int k = 0; k < 60; ++k) {
      const std::size_t i = rng.below(net.param_count());
      const double x = net.params()[i];
      net.mutable_params()[i] = x + h;
      const double up = ppo_loss(net, batch, cfg);
      net.mutable_params()[i] = x - h;
      const double down = ppo_loss(net, batch, cfg);
      net.mutable_params()[i] = x;
      const double fd = (up - down) / (2 * h);
      EXPECT_LT(std::abs(fd - grad[i]) / std::max(1e-6, std::abs(fd) + std::abs(grad[i])), 1e-4)
          << "param " << i << " fd " << fd << " analytic " << grad[i];
    }
    std::vector<double> grad3;
    ppo_gradient(net, ptrs, cfg, grad3, 3);
    EXPECT_EQ(grad, grad3);
  }
}

TEST(PPOConfigTest, ValidateRejectsBadValues) {
  auto bad = [](auto mutate) {
    PPOConfig c;
    mutate(c);
    return error_kind([&] { c.validate(); });
  };
  EXPECT_EQ(bad([](PPOConfig& c) { c.clip = 1.0; }), ErrorKind::config);
  EXPECT_EQ(bad([](PPOConfig& c) { c.dual_clip = 1.1; }), ErrorKind::config);
  EXPECT_EQ(bad([](PPOConfig& c) { c.gamma = 0.0; }), ErrorKind::config);
  EXPECT_EQ(bad([](PPOConfig& c) { c.goal_interval = 0; }), ErrorKind::config);
  EXPECT_EQ(bad([](PPOConfig& c) { c.head_weights[2] = -1.0; }), ErrorKind::config);
  EXPECT_EQ(bad([](PPOConfig& c) { c.hidden = {0}; }), ErrorKind::config);
  const Json j = PPOConfig{};
  EXPECT_EQ(j.get<PPOConfig>().head_weights, PPOConfig{}.head_weights);
}

std::shared_ptr<const sim::EnvConfig> short_env(int frames) {
  auto e = std::make_shared<sim::EnvConfig>();
  e->max_frames = frames;
  return e;
}

TEST(PolicyTest, DecodeActionContract) {
  const auto lineup = demo::canonical_lineup(demo::StrategyId::three_lane);
  const sim::GameState s = sim::new_game(lineup, lineup, 1);
  EXPECT_EQ(decode_action(s, 0, 0).kind, sim::HeroAction::Kind::noop);
  EXPECT_EQ(decode_action(s, 0, 3).kind, sim::HeroAction::Kind::move);
  // nothing is in range at spawn
  for (int a : {kActionFarm, kActionHero, kActionStructure}) EXPECT_EQ(decode_action(s, 0, a).kind, sim::HeroAction::Kind::noop);
  EXPECT_EQ(error_kind([&] { decode_action(s, 0, kActionCount); }), ErrorKind::index);
}

TEST(PolicyTest, MovesAreMirroredForRed) {
  const auto lineup = demo::canonical_lineup(demo::StrategyId::three_lane);
  sim::GameState s = sim::new_game(lineup, lineup, 1);
  for (int a = 1; a <= 8; ++a) {
    const auto blue = decode_action(s, 0, a), red = decode_action(s, 5, a);
    const sim::Cell from_b = s.hero(0).position, from_r = s.hero(5).position;
    const sim::Cell to_b{from_b.x + sim::kDirections[blue.direction].x, from_b.y + sim::kDirections[blue.direction].y};
    const sim::Cell to_r{from_r.x + sim::kDirections[red.direction].x, from_r.y + sim::kDirections[red.direction].y};
    EXPECT_EQ(sim::mirror(to_b), to_r) << "action " << a;
  }
}

std::shared_ptr<const nn::Net> tiny_meta(std::uint64_t seed) {
  meta::MetaModelConfig c;
  c.unit_hidden = {4};
  c.query_hidden = {4};
  c.stats_hidden = {4};
  auto net = std::make_shared<nn::Net>(meta::meta_spec(c));
  Rng rng(seed);
  net->init(rng);
  return net;
}

RolloutSettings rollout(std::uint64_t seed, const GoalSource* goals, int frames = 150) {
  RolloutSettings rs;
  rs.env = short_env(frames);
  rs.lineups = {demo::canonical_lineup(demo::StrategyId::three_lane), demo::canonical_lineup(demo::StrategyId::resource_grab)};
  rs.seed = seed;
  rs.goals = goals;
  rs.goal_interval = 20;
  return rs;
}

nn::Net tiny_policy(std::uint64_t seed) {
  nn::Net net(policy_spec({8}));
  Rng rng(seed);
  net.init(rng);
  return net;
}

TEST(RolloutTest, BaselineHasNoGoalSignal) {
  const nn::Net policy = tiny_policy(1);
  const GameRollout g = self_play_game(policy, rollout(3, nullptr));
  EXPECT_EQ(g.length, 150);
  for (const auto& hero : g.heroes) {
    ASSERT_EQ(hero.size(), 150u);
    for (const auto& tr : hero) {
      EXPECT_FALSE(tr.goal);
      EXPECT_EQ(tr.rewards[sim::RewardHead::goal], 0.0);
      if (tr.alive) {
        for (int i = sim::kObservationWidth; i < kPolicyInputWidth; ++i) ASSERT_EQ(tr.input[i], 0.0);
      }
    }
  }
}

TEST(RolloutTest, GoalsAreHeldPerWindowAndRewardsTelescope) {
  const nn::Net policy = tiny_policy(2);
  const MetaGoalSource goals(tiny_meta(4), 1.0);
  const RolloutSettings rs = rollout(5, &goals);
  const GameRollout g = self_play_game(policy, rs);
  ASSERT_EQ(g.macro.size(), static_cast<std::size_t>(g.length + 1));
  int changes = 0;
  for (int h = 0; h < sim::kHeroCount; ++h) {
    const int team = h / sim::kTeamSize;
    const auto w = macro::hero_weights(rs.goal_weights, h % sim::kTeamSize);
    for (int start = 0; start < g.length; start += rs.goal_interval) {
      const int end = std::min(g.length, start + rs.goal_interval);
      const auto& goal = *g.heroes[h][start].goal;
      if (start > 0 && goal.values != g.heroes[h][start - 1].goal->values) ++changes;
      double sum = 0.0;
      for (int t = start; t < end; ++t) {
        ASSERT_EQ(g.heroes[h][t].goal->values, goal.values);
        sum += g.heroes[h][t].rewards[sim::RewardHead::goal];
      }
      ASSERT_EQ(sum, macro::goal_distance(g.macro[start][team], goal, w) - macro::goal_distance(g.macro[end][team], goal, w));
    }
  }
  EXPECT_GT(changes, 0);
}

TEST(RolloutTest, DeterministicForASeed) {
  const nn::Net policy = tiny_policy(2);
  const MetaGoalSource goals(tiny_meta(4), 1.0);
  const GameRollout a = self_play_game(policy, rollout(9, &goals));
  const GameRollout b = self_play_game(policy, rollout(9, &goals));
  for (int h = 0; h < sim::kHeroCount; ++h) {
    ASSERT_EQ(a.heroes[h].size(), b.heroes[h].size());
    for (std::size_t t = 0; t < a.heroes[h].size(); ++t) {
      ASSERT_EQ(a.heroes[h][t].action, b.heroes[h][t].action);
      ASSERT_EQ(a.heroes[h][t].rewards.heads, b.heroes[h][t].rewards.heads);
    }
  }
}

RLTrainOptions small_run(const fs::path& out, int iterations, TrainMode mode = TrainMode::baseline) {
  RLTrainOptions o;
  o.mode = mode;
  o.env = short_env(120);
  o.ppo.hidden = {8};
  o.ppo.games_per_iteration = 1;
  o.ppo.minibatch = 256;
  o.ppo.probe_interval = 2;
  o.ppo.probe_games = 2;
  o.iterations = iterations;
  o.seed = 11;
  o.out_dir = out;
  if (mode == TrainMode::mgg) o.goals = std::make_shared<MetaGoalSource>(tiny_meta(3), 1.0);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(TrainTest, ZeroIterationsKeepsTheInitialization) {
  const fs::path dir = fresh_dir("rl_zero");
  const auto res = train_mgg(small_run(dir, 0));
  EXPECT_EQ(res.iterations_done, 0);
  EXPECT_TRUE(res.log.empty());
  nn::Net init(policy_spec({8}));
  Rng rng(derive_seed(11, {0x696e6974ULL}));
  init.init(rng);
  const nn::Net saved = nn::load_checkpoint(policy_checkpoint_path(dir));
  EXPECT_TRUE(std::equal(saved.params().begin(), saved.params().end(), init.params().begin()));
  EXPECT_EQ(slurp(dir / "train.csv"), rl_csv_header() + "\n");
}

TEST(TrainTest, DeterministicAcrossWorkerCounts) {
  const fs::path a = fresh_dir("rl_det_a"), b = fresh_dir("rl_det_b");
  auto oa = small_run(a, 2, TrainMode::mgg);
  auto ob = small_run(b, 2, TrainMode::mgg);
  ob.workers = 2;
  train_mgg(oa);
  train_mgg(ob);
  EXPECT_EQ(slurp(a / "train.csv"), slurp(b / "train.csv"));
  EXPECT_EQ(slurp(a / "policy.bin"), slurp(b / "policy.bin"));
  EXPECT_EQ(slurp(a / "policy.bin.json"), slurp(b / "policy.bin.json"));
}

TEST(TrainTest, ResumeContinuesTheCsvAndMatchesAStraightRun) {
  const fs::path straight = fresh_dir("rl_straight"), resumed = fresh_dir("rl_resumed");
  const auto full = train_mgg(small_run(straight, 3));
  ASSERT_EQ(full.log.size(), 3u);
  train_mgg(small_run(resumed, 1));
  auto more = small_run(resumed, 3);
  more.resume = true;
  const auto rest = train_mgg(more);
  ASSERT_EQ(rest.log.size(), 2u);
  EXPECT_EQ(rest.log.front().iteration, 2);
  EXPECT_EQ(slurp(straight / "policy.bin"), slurp(resumed / "policy.bin"));
  auto rows = [](const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> out;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  };
  const auto a = rows(straight / "train.csv"), b = rows(resumed / "train.csv");
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  // the probe column is filled on probe iterations and on the last iteration
  // of a run, so the interrupted run's final row carries a probe result
  EXPECT_EQ(a[0].back(), ',');
  EXPECT_NE(b[0].back(), ',');
  EXPECT_EQ(a[0], b[0].substr(0, b[0].rfind(',') + 1));
  EXPECT_EQ(a[1], b[1]);
  EXPECT_EQ(a[2], b[2]);
}

TEST(TrainTest, RejectsInconsistentSetups) {
  const fs::path dir = fresh_dir("rl_bad");
  auto o = small_run(dir, 1, TrainMode::mgg);
  o.goals.reset();
  EXPECT_EQ(error_kind([&] { train_mgg(o); }), ErrorKind::config);
  train_mgg(small_run(dir, 1));
  auto mgg = small_run(dir, 2, TrainMode::mgg);
  mgg.resume = true;
  EXPECT_EQ(error_kind([&] { train_mgg(mgg); }), ErrorKind::config);
}

// One fixed goal region for every hero, rewards from the goal head only.
TEST(TrainTest, FixedGoalRegionIsLearned) {
  macro::MacroGoal g{};
  for (int k = 0; k < macro::kGoalRegionSlots; ++k) g[k] = static_cast<int>(sim::RelRegion::lane_mid);
  RLTrainOptions o;
  o.mode = TrainMode::mgg;
  o.env = short_env(100);
  o.goals = std::make_shared<FixedGoalSource>(g);
  o.ppo.hidden = {16};
  o.ppo.head_weights = {0, 0, 0, 0, 0, 1};
  o.ppo.goal_weights = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  o.ppo.goal_interval = 100;
  o.ppo.games_per_iteration = 1;
  o.ppo.minibatch = 250;
  o.ppo.lr = 3e-3;
  o.ppo.probe_interval = 0;
  o.iterations = 50;
  o.seed = 5;
  const auto res = train_mgg(o);
  double last = 0.0;
  for (int i = 40; i < 50; ++i) last += res.log[i].mean_return[static_cast<int>(sim::RewardHead::goal)] / 10.0;
  EXPECT_GT(last, 0.0);
}

}  // namespace
}  // namespace macrogoal::rl
