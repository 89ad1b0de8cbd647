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

#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/metrics/metrics.hpp"
#include "macrogoal/sim/trajectory.hpp"

namespace macrogoal::metrics {

struct ReportOptions {
  int early_window = 300;  // frames
  int embed_stride = 10;
  double elo_k = 16.0;
  int elo_passes = 20;
  std::uint64_t seed = 0;
};

/// One evaluated match as the report sees it: the subject team's agent and lineup.
struct ReportMatch {
  const sim::Trajectory* trajectory = nullptr;
  sim::Team team = sim::Team::blue;
  std::string agent;
  std::string lineup;
};

inline ReportMatch subject_of(const sim::Trajectory& t, sim::Team team = sim::Team::blue) {
  return {&t, team, t.header.agents[sim::team_index(team)], sim::lineup_name(t.header.lineups[sim::team_index(team)])};
}

inline std::optional<int> marksman_id(const sim::Trajectory& t, sim::Team team) {
  const auto& l = t.header.lineups[sim::team_index(team)];
  for (int k = 0; k < sim::kTeamSize; ++k)
    if (l[k] == sim::HeroRole::marksman) return sim::GameState::hero_id(team, k);
  return std::nullopt;
}

/// File-name-safe form of an agent label.
inline std::string file_stem(const std::string& label) {
  std::string out = label;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return out;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Per-agent diversity and case statistics, optional match-result summary.
/// Writes report.json, money_<agent>.csv, embed.csv and (with results) elo.csv
/// into out_dir.
inline Json build_report(const std::vector<ReportMatch>& matches, const std::vector<MatchResult>& results,
                         const ReportOptions& o, const fs::path& out_dir) {
  require(!matches.empty() || !results.empty(), ErrorKind::data, "report needs trajectories or match results");
  fs::create_directories(out_dir);
  std::map<std::string, std::vector<const ReportMatch*>> by_agent;
  for (const auto& m : matches) by_agent[m.agent].push_back(&m);

  Json report;
  report["agents"] = Json::object();
  for (const auto& [agent, ms] : by_agent) {
    std::vector<MacroSequence> seqs;
    std::map<std::string, std::vector<MacroSequence>> by_lineup;
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    std::map<std::string, int> lineup_ids;
    std::vector<const sim::Trajectory*> econ;
    std::vector<int> econ_hero;
    for (const ReportMatch* m : ms) {
      MacroSequence sq = macro_sequence(*m->trajectory, m->team);
      require(!sq.empty(), ErrorKind::data, "report: empty trajectory for agent '" + agent + "'");
      points.push_back(mean_macro_vector(sq));
      const auto [it, _] = lineup_ids.emplace(m->lineup, static_cast<int>(lineup_ids.size()));
      labels.push_back(it->second);
      by_lineup[m->lineup].push_back(sq);
      seqs.push_back(std::move(sq));
      if (const auto h = marksman_id(*m->trajectory, m->team)) {
        econ.push_back(m->trajectory);
        econ_hero.push_back(*h);
      }
    }
    Json a;
    a["matches"] = ms.size();
    a["entropy"] = cross_match_entropy(seqs);
    a["entropy_pooled"] = macro_state_entropy(seqs);
    Json per = Json::object();
    for (const auto& [lineup, s] : by_lineup) per[lineup] = {{"matches", s.size()}, {"entropy", cross_match_entropy(s)}};
    a["entropy_by_lineup"] = std::move(per);
    bool clusterable = lineup_ids.size() >= 2;
    for (const auto& [_, s] : by_lineup) clusterable = clusterable && s.size() >= 2;
    a["dbi"] = clusterable ? Json(davies_bouldin(points, labels)) : Json(nullptr);
    if (!econ.empty()) {
      const CaseStats c = case_stats(econ, econ_hero, o.early_window);
      a["case_stats"] = {{"matches", c.matches},
                         {"midpoint_money_rate", c.midpoint_money_rate},
                         {"midpoint_money_diff", c.midpoint_money_diff},
                         {"near_monsters", c.near_monsters},
                         {"far_monsters", c.far_monsters},
                         {"total_monsters", c.total_monsters},
                         {"early_window", o.early_window}};
      auto csv = open_out(out_dir / ("money_" + file_stem(agent) + ".csv"), std::ios::out | std::ios::binary | std::ios::trunc);
      csv << "frame,money_rate,money_diff\n";
      for (std::size_t f = 0; f < c.money_rate.size(); ++f)
        csv << f << ',' << format_real(c.money_rate[f]) << ',' << format_real(c.money_diff[f]) << '\n';
    } else {
      a["case_stats"] = nullptr;
    }
    report["agents"][agent] = std::move(a);
  }

  if (!matches.empty()) {
    std::vector<EmbedInput> in;
    for (const auto& m : matches) in.push_back({m.trajectory, m.team, m.agent, m.lineup});
    report["embed_rows"] = embed_macro_states(in, o.embed_stride, out_dir / "embed.csv");
  }

  if (!results.empty()) {
    const auto elo = elo_scores(results, o.elo_k, o.elo_passes, o.seed);
    report["elo"] = elo;
    auto csv = open_out(out_dir / "elo.csv", std::ios::out | std::ios::binary | std::ios::trunc);
    csv << "agent,elo\n";
    for (const auto& [agent, score] : elo) csv << agent << ',' << format_real(score) << '\n';
    std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& r : results) {
      auto& p = pairs[{r.agent_a, r.agent_b}];
      p.first += r.a_won ? 1 : 0;
      p.second += 1;
    }
    Json pj = Json::array();
    for (const auto& [k, v] : pairs) {
      const Interval ci = wilson_interval(v.first, v.second);
      pj.push_back({{"agent_a", k.first},
                    {"agent_b", k.second},
                    {"games", v.second},
                    {"a_wins", v.first},
                    {"a_win_rate", static_cast<double>(v.first) / static_cast<double>(v.second)},
                    {"wilson_low", ci.low},
                    {"wilson_high", ci.high}});
    }
    report["pairs"] = std::move(pj);
  } else {
    report["elo"] = nullptr;
    report["pairs"] = Json::array();
  }
  write_json(out_dir / "report.json", report);
  return report;
}

}  // namespace macrogoal::metrics
