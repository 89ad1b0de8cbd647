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
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/io.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/sim/trajectory.hpp"

namespace macrogoal::metrics {

using macro::MacroState;
using MacroSequence = std::vector<MacroState>;

// ---- entropy --------------------------------------------------------------------

inline double entropy_of_counts(const std::map<MacroState, std::size_t>& counts) {
  std::size_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

/// Natural-log entropy of the macro-state distribution pooled over every frame.
inline double macro_state_entropy(const std::vector<MacroSequence>& matches) {
  require(!matches.empty(), ErrorKind::data, "entropy needs at least one trajectory");
  std::map<MacroState, std::size_t> counts;
  for (const auto& m : matches)
    for (const auto& c : m) counts[c] += 1;
  require(!counts.empty(), ErrorKind::data, "entropy needs at least one frame");
  return entropy_of_counts(counts);
}

/// Mean over frame index t of the entropy of {f(s_t) across matches}; a match
/// that has ended contributes its final macro-state.
inline double cross_match_entropy(const std::vector<MacroSequence>& matches) {
  require(!matches.empty(), ErrorKind::data, "entropy needs at least one trajectory");
  std::size_t len = 0;
  for (const auto& m : matches) {
    require(!m.empty(), ErrorKind::data, "entropy: empty trajectory");
    len = std::max(len, m.size());
  }
  double total = 0.0;
  std::map<MacroState, std::size_t> counts;
  for (std::size_t t = 0; t < len; ++t) {
    counts.clear();
    for (const auto& m : matches) counts[m[std::min(t, m.size() - 1)]] += 1;
    total += entropy_of_counts(counts);
  }
  return total / static_cast<double>(len);
}

inline MacroSequence macro_sequence(const sim::Trajectory& t, sim::Team team) {
  MacroSequence out;
  out.reserve(t.frames.size());
  for (const auto& f : t.frames) out.push_back(f.macro[sim::team_index(team)]);
  return out;
}

// ---- Davies-Bouldin --------------------------------------------------------------

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// (1/k) sum_i max_{j != i} (sigma_i + sigma_j) / d(mu_i, mu_j), sigma = mean
/// distance to the centroid.
inline double davies_bouldin(const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
  require(points.size() == labels.size(), ErrorKind::shape, "davies_bouldin: one label per point");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  require(groups.size() >= 2, ErrorKind::data, "davies_bouldin needs at least two labels");
  const std::size_t dim = points.front().size();
  std::vector<std::vector<double>> mu;
  std::vector<double> sigma;
  for (const auto& [label, idx] : groups) {
    require(idx.size() >= 2, ErrorKind::data, "davies_bouldin: label " + std::to_string(label) + " has fewer than 2 points");
    std::vector<double> c(dim, 0.0);
    for (std::size_t i : idx) {
      require(points[i].size() == dim, ErrorKind::shape, "davies_bouldin: ragged points");
      for (std::size_t d = 0; d < dim; ++d) c[d] += points[i][d];
    }
    for (double& v : c) v /= static_cast<double>(idx.size());
    double s = 0.0;
    for (std::size_t i : idx) s += euclidean(points[i], c);
    sigma.push_back(s / static_cast<double>(idx.size()));
    mu.push_back(std::move(c));
  }
  const std::size_t k = mu.size();
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = euclidean(mu[i], mu[j]);
      require(d > 0.0, ErrorKind::degenerate_cluster, "davies_bouldin: coincident cluster centroids");
      worst = std::max(worst, (sigma[i] + sigma[j]) / d);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

/// Mean macro-state vector of one match.
inline std::vector<double> mean_macro_vector(const MacroSequence& m) {
  std::vector<double> out(macro::kMacroDim, 0.0);
  for (const auto& c : m)
    for (int d = 0; d < macro::kMacroDim; ++d) out[d] += c.values[d];
  for (double& v : out) v /= static_cast<double>(std::max<std::size_t>(1, m.size()));
  return out;
}

// ---- Elo ------------------------------------------------------------------------

struct MatchResult {
  std::string agent_a;
  std::string agent_b;
  bool a_won = true;
  int length = 0;
  std::uint64_t seed = 0;
  std::string a_side = "blue";
};

inline Json to_json(const MatchResult& r) {
  return {{"agent_a", r.agent_a}, {"agent_b", r.agent_b}, {"winner", r.a_won ? "a" : "b"},
          {"length", r.length},   {"seed", r.seed},       {"a_side", r.a_side}};
}

inline MatchResult match_from_json(const Json& j) {
  MatchResult r;
  r.agent_a = j.at("agent_a");
  r.agent_b = j.at("agent_b");
  const std::string w = j.at("winner");
  require(w == "a" || w == "b", ErrorKind::data, "match winner must be 'a' or 'b'");
  r.a_won = w == "a";
  r.length = j.value("length", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.a_side = j.value("a_side", std::string("blue"));
  return r;
}

inline constexpr double kEloMean = 1500.0;

/// Mean over `passes` seed-shuffled orderings of a sequential Elo run that
/// starts every agent at 1500, shifted to mean 1500. Results are put in a
/// canonical order before shuffling, so the table depends only on the
/// multiset of results. `agents` fixes the table keys.
inline std::map<std::string, double> elo_scores(const std::vector<MatchResult>& results, const std::vector<std::string>& agents,
                                                double k = 16.0, int passes = 20, std::uint64_t seed = 0) {
  require(passes >= 1, ErrorKind::config, "elo passes must be >= 1");
  std::map<std::string, double> table;
  for (const auto& a : agents) table[a] = 0.0;
  for (const auto& m : results) {
    require(table.count(m.agent_a) && table.count(m.agent_b), ErrorKind::data,
            "match between unknown agents '" + m.agent_a + "' and '" + m.agent_b + "'");
  }
  for (const auto& a : agents)
    require(std::any_of(results.begin(), results.end(), [&](const MatchResult& m) { return m.agent_a == a || m.agent_b == a; }),
            ErrorKind::data, "agent '" + a + "' has no matches");
  std::vector<std::size_t> order(results.size());
  Rng rng(derive_seed(seed, {0x656c6fULL}));
  std::vector<MatchResult> sorted = results;
  std::sort(sorted.begin(), sorted.end(), [](const MatchResult& x, const MatchResult& y) {
    return std::tie(x.agent_a, x.agent_b, x.a_won, x.seed, x.length, x.a_side) <
           std::tie(y.agent_a, y.agent_b, y.a_won, y.seed, y.length, y.a_side);
  });
  for (int p = 0; p < passes; ++p) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    std::map<std::string, double> r;
    for (const auto& a : agents) r[a] = kEloMean;
    for (std::size_t i : order) {
      const MatchResult& m = sorted[i];
      double& ra = r[m.agent_a];
      double& rb = r[m.agent_b];
      const double ea = 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0));
      const double sa = m.a_won ? 1.0 : 0.0;
      ra += k * (sa - ea);
      rb -= k * (sa - ea);
    }
    for (const auto& [a, v] : r) table[a] += v / passes;
  }
  double mean = 0.0;
  for (const auto& [_, v] : table) mean += v;
  mean /= static_cast<double>(table.size());
  for (auto& [_, v] : table) v += kEloMean - mean;
  return table;
}

inline std::map<std::string, double> elo_scores(const std::vector<MatchResult>& results, double k = 16.0, int passes = 20,
                                                std::uint64_t seed = 0) {
  std::vector<std::string> agents;
  for (const auto& m : results)
    for (const auto& a : {m.agent_a, m.agent_b})
      if (std::find(agents.begin(), agents.end(), a) == agents.end()) agents.push_back(a);
  std::sort(agents.begin(), agents.end());
  return elo_scores(results, agents, k, passes, seed);
}

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t wins, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double p = static_cast<double>(wins) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {centre - half, centre + half};
}

// ---- case statistics --------------------------------------------------------------

struct CaseStats {
  std::vector<double> money_rate;        // per frame, mean over matches alive at that frame
  std::vector<double> money_diff;
  double midpoint_money_rate = 0.0;      // mean over matches of the rate at frame len/2
  double midpoint_money_diff = 0.0;
  double near_monsters = 0.0;            // per match, within the early window
  double far_monsters = 0.0;
  double total_monsters = 0.0;
  int matches = 0;
};

inline Json to_json(const CaseStats& c) {
  return {{"money_rate", c.money_rate},
          {"money_diff", c.money_diff},
          {"midpoint_money_rate", c.midpoint_money_rate},
          {"midpoint_money_diff", c.midpoint_money_diff},
          {"near_monsters", c.near_monsters},
          {"far_monsters", c.far_monsters},
          {"total_monsters", c.total_monsters},
          {"matches", c.matches}};
}

namespace detail {

inline double money_rate_at(const sim::FrameRecord& f, int hero) {
  const int first = hero < sim::kTeamSize ? 0 : sim::kTeamSize;
  double team = 0.0;
  for (int k = 0; k < sim::kTeamSize; ++k) team += f.gold[first + k];
  return team > 0 ? f.gold[hero] / team : 1.0 / sim::kTeamSize;
}

inline double money_diff_at(const sim::FrameRecord& f, int hero) {
  const int enemy = hero < sim::kTeamSize ? sim::kTeamSize : 0;
  double e = 0.0;
  for (int k = 0; k < sim::kTeamSize; ++k) e += f.gold[enemy + k];
  return f.gold[hero] - e / sim::kTeamSize;
}

}  // namespace detail

/// Economy of hero `hero` (per trajectory, since agents may sit on either side)
/// and the neutral camps its team takes before early_window.
inline CaseStats case_stats(const std::vector<const sim::Trajectory*>& trajs, const std::vector<int>& hero, int early_window) {
  require(trajs.size() == hero.size(), ErrorKind::shape, "case_stats: one hero id per trajectory");
  CaseStats out;
  out.matches = static_cast<int>(trajs.size());
  if (trajs.empty()) return out;
  std::vector<double> rate_sum, diff_sum;
  std::vector<int> count;
  for (std::size_t m = 0; m < trajs.size(); ++m) {
    const sim::Trajectory& t = *trajs[m];
    const int h = hero[m];
    require(h >= 0 && h < sim::kHeroCount, ErrorKind::data, "case_stats: no hero " + std::to_string(h));
    require(!t.frames.empty(), ErrorKind::data, "case_stats: empty trajectory");
    const sim::Team team = h < sim::kTeamSize ? sim::Team::blue : sim::Team::red;
    if (rate_sum.size() < t.frames.size()) {
      rate_sum.resize(t.frames.size(), 0.0);
      diff_sum.resize(t.frames.size(), 0.0);
      count.resize(t.frames.size(), 0);
    }
    for (std::size_t i = 0; i < t.frames.size(); ++i) {
      rate_sum[i] += detail::money_rate_at(t.frames[i], h);
      diff_sum[i] += detail::money_diff_at(t.frames[i], h);
      count[i] += 1;
    }
    const auto& mid = t.frames[t.frames.size() / 2];
    out.midpoint_money_rate += detail::money_rate_at(mid, h);
    out.midpoint_money_diff += detail::money_diff_at(mid, h);
    for (const auto& f : t.frames) {
      for (const auto& e : f.events) {
        if (e.frame >= early_window || e.victim_kind != sim::UnitKind::monster || e.killer_kind != sim::UnitKind::hero) continue;
        if ((e.killer < sim::kTeamSize) != (team == sim::Team::blue)) continue;
        if (sim::MapLayout::camp_is_near(e.camp, team))
          out.near_monsters += 1;
        else
          out.far_monsters += 1;
      }
    }
  }
  for (std::size_t i = 0; i < rate_sum.size(); ++i) {
    out.money_rate.push_back(rate_sum[i] / count[i]);
    out.money_diff.push_back(diff_sum[i] / count[i]);
  }
  const double n = static_cast<double>(trajs.size());
  out.midpoint_money_rate /= n;
  out.midpoint_money_diff /= n;
  out.near_monsters /= n;
  out.far_monsters /= n;
  out.total_monsters = out.near_monsters + out.far_monsters;
  return out;
}

// ---- embedding export ---------------------------------------------------------------

struct EmbedInput {
  const sim::Trajectory* trajectory = nullptr;
  sim::Team team = sim::Team::blue;
  std::string agent;
  std::string lineup;
};

/// One CSV row per `stride`-th frame: D_g components, agent label, lineup label.
inline std::size_t embed_macro_states(const std::vector<EmbedInput>& inputs, int stride, const fs::path& out_path) {
  require(stride >= 1, ErrorKind::config, "embed stride must be >= 1");
  auto out = open_out(out_path, std::ios::out | std::ios::binary | std::ios::trunc);
  for (int d = 0; d < macro::kMacroDim; ++d) out << "g" << d << ',';
  out << "agent,lineup\n";
  std::size_t rows = 0;
  for (const auto& in : inputs) {
    const auto& frames = in.trajectory->frames;
    for (std::size_t i = 0; i < frames.size(); i += static_cast<std::size_t>(stride)) {
      for (int v : frames[i].macro[sim::team_index(in.team)].values) out << v << ',';
      out << in.agent << ',' << in.lineup << '\n';
      ++rows;
    }
  }
  if (!out) fail(ErrorKind::io, "write failed: " + out_path.string());
  return rows;
}

}  // namespace macrogoal::metrics
