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


#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/cli/commands.hpp"

namespace {

using namespace macrogoal;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
};

cli::RunConfig resolve_config(const Globals& g) {
  cli::RunConfig c = g.config.empty() ? cli::RunConfig{} : cli::load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::string require_out(const Globals& g, const char* command) {
  require(!g.out.empty(), ErrorKind::usage, std::string(command) + " needs --out");
  return g.out;
}

int run(int argc, char** argv) {
  CLI::App app{"Macro-goal guided self-play on a miniature MOBA."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run config JSON");
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--workers", g.workers, "Worker threads; 1 is fully deterministic")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file or directory");

  auto* gen = app.add_subcommand("gen-demos", "Generate scripted demonstrations");
  std::string strategy;
  std::optional<int> games;
  std::string opponent;
  gen->add_option("--strategy", strategy, "three_lane | marksman_core | resource_grab | mixed");
  gen->add_option("--games", games, "Games per strategy")->check(CLI::PositiveNumber);
  gen->add_option("--opponent", opponent, "Scripted opponent strategy");

  auto* ext = app.add_subcommand("extract", "Extract macro-goal labels from demonstrations");
  std::string demos;
  ext->add_option("--demos", demos, "Demo directory")->required();

  auto* tm = app.add_subcommand("train-meta", "Train the meta-controller");
  std::vector<std::string> data;
  std::optional<int> epochs;
  tm->add_option("--data", data, "Dataset JSONL (repeatable)")->required();
  tm->add_option("--epochs", epochs, "Epochs")->check(CLI::PositiveNumber);

  auto* tr = app.add_subcommand("train-rl", "Train an RL agent by self-play");
  cli::TrainRLArgs rl_args;
  tr->add_option("--mode", rl_args.mode, "mgg | baseline")->check(CLI::IsMember({"mgg", "baseline"}));
  tr->add_option("--meta", rl_args.meta, "Meta-controller checkpoint (mgg mode)");
  tr->add_option("--iterations", rl_args.iterations, "Training iterations")->check(CLI::NonNegativeNumber);
  tr->add_flag("--resume", rl_args.resume, "Continue from the checkpoint in --out");

  auto* tour = app.add_subcommand("tournament", "Round-robin tournament");
  std::vector<std::string> agents;
  std::optional<int> per_pair;
  tour->add_option("--agent", agents, "[label=]scripted:<strategy> or policy checkpoint (repeatable)")->required();
  tour->add_option("--games", per_pair, "Games per pair")->check(CLI::PositiveNumber);

  auto* ev = app.add_subcommand("evaluate", "Record matches of one agent against an opponent");
  cli::EvaluateArgs ev_args;
  ev->add_option("--agent", ev_args.agent, "Agent spec")->required();
  ev->add_option("--opponent", ev_args.opponent, "Opponent spec");
  ev->add_option("--lineup", ev_args.lineup, "Agent lineup: strategy name or roles joined by '-'");
  ev->add_option("--opponent-lineup", ev_args.opponent_lineup, "Opponent lineup (default: the agent's)");
  ev->add_option("--matches", ev_args.matches, "Match count")->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Diversity and capability report");
  std::vector<std::string> traj_dirs, result_files;
  rep->add_option("--trajectories", traj_dirs, "Evaluation or demo directory (repeatable)");
  rep->add_option("--results", result_files, "Match-result JSONL (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  cli::RunConfig c = resolve_config(g);
  if (*gen) {
    if (!strategy.empty()) c.demos.strategy = strategy;
    if (games) c.demos.games = *games;
    if (!opponent.empty()) c.demos.opponent = opponent;
    c.validate();
    const Json m = cli::cmd_gen_demos(c, require_out(g, "gen-demos"), g.workers);
    std::cout << m.dump(2) << "\n";
  } else if (*ext) {
    const auto s = cli::cmd_extract(c, demos, require_out(g, "extract"), g.workers);
    std::cout << "extracted " << s.examples << " examples from " << s.trajectories << " trajectories\n";
  } else if (*tm) {
    if (epochs) c.meta.epochs = *epochs;
    c.validate();
    std::vector<fs::path> paths(data.begin(), data.end());
    const auto r = cli::cmd_train_meta(c, paths, require_out(g, "train-meta"), g.workers);
    std::cout << "best epoch " << r.best_epoch << " eval loss " << r.best_eval_loss << "\n";
  } else if (*tr) {
    const auto r = cli::cmd_train_rl(c, rl_args, require_out(g, "train-rl"), g.workers);
    std::cout << "trained " << r.log.size() << " iterations\n";
  } else if (*tour) {
    const auto rs = cli::cmd_tournament(c, agents, per_pair, require_out(g, "tournament"), g.workers);
    std::cout << "played " << rs.size() << " matches\n";
  } else if (*ev) {
    const Json m = cli::cmd_evaluate(c, ev_args, require_out(g, "evaluate"), g.workers);
    std::cout << "recorded " << m.at("game_count").get<int>() << " matches\n";
  } else if (*rep) {
    require(!traj_dirs.empty() || !result_files.empty(), ErrorKind::usage, "report needs --trajectories or --results");
    std::vector<fs::path> dirs(traj_dirs.begin(), traj_dirs.end()), files(result_files.begin(), result_files.end());
    const Json r = cli::cmd_report(c, dirs, files, require_out(g, "report"));
    std::cout << r.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const macrogoal::Error& e) {
    std::cerr << "macrogoal: " << e.what() << "\n";
    return macrogoal::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "macrogoal: " << e.what() << "\n";
    return 2;
  }
}
