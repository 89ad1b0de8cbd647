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

#include <cmath>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/macro/features.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/sim/trajectory.hpp"

namespace macrogoal::macro {

struct LabelConfig {
  double horizon_seconds = 30.0;  // C
  double noise_seconds = 3.0;     // epsilon
  int gold_bucket = kDefaultGoldBucket;
  int frame_stride = 1;           // emit every k-th eligible frame
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LabelConfig, horizon_seconds, noise_seconds, gold_bucket, frame_stride)

/// Window in frames after the seconds-to-frames conversion.
struct LabelWindow {
  int horizon = 0;
  int noise = 0;
};

inline LabelWindow label_window(const LabelConfig& c, const sim::EnvConfig& env) {
  LabelWindow w{env.seconds_to_frames(c.horizon_seconds), env.seconds_to_frames(c.noise_seconds)};
  require(w.horizon > w.noise && w.noise >= 0, ErrorKind::config, "label window needs C > epsilon >= 0");
  return w;
}

struct LabeledExample {
  std::vector<double> features;  // team_features of the source frame
  MacroGoal goal;
  std::vector<double> aux;       // lineup one-hot of the labelled team
  sim::Team team = sim::Team::blue;
  int frame = 0;
  int target_frame = 0;
  int source = 0;                // trajectory index within the extraction run
};

/// Target offsets C' for every eligible frame t of a sequence of `length`
/// recorded states: t + C + eps <= length - 1.
inline std::vector<int> label_offsets(int length, LabelWindow w, Rng& rng) {
  std::vector<int> out;
  const int eligible = length - w.horizon - w.noise;
  for (int t = 0; t < eligible; ++t) out.push_back(static_cast<int>(rng.between(w.horizon - w.noise, w.horizon + w.noise)));
  return out;
}

inline double round_feature(double x) { return std::round(x * 1e6) / 1e6; }

inline std::uint64_t label_seed(std::uint64_t master, int source, sim::Team team) {
  return derive_seed(master, {0x6c6162656cULL, static_cast<std::uint64_t>(source), static_cast<std::uint64_t>(team)});
}

/// Labels for one team of one trajectory. The trajectory is replayed to
/// rebuild state features; the goal of frame t is f(s_{t+C'}).
inline std::vector<LabeledExample> extract_labels(const sim::Trajectory& traj, sim::Team team, LabelWindow w, Rng& rng,
                                                  int gold_bucket = kDefaultGoldBucket, int stride = 1, int source = 0) {
  require(w.horizon > w.noise && w.noise >= 0, ErrorKind::config, "label window needs C > epsilon >= 0");
  require(stride >= 1, ErrorKind::config, "frame_stride must be >= 1");
  const std::vector<int> offsets = label_offsets(traj.length(), w, rng);
  if (offsets.empty()) return {};
  std::vector<MacroState> macro;
  std::vector<std::vector<double>> feats;
  macro.reserve(traj.frames.size());
  sim::replay(traj, [&](const sim::GameState& s) {
    macro.push_back(extract_macro_state(s, team, gold_bucket));
    if (feats.size() < offsets.size()) {
      auto f = team_features(s, team);
      for (double& x : f) x = round_feature(x);
      feats.push_back(std::move(f));
    }
  });
  const auto aux = lineup_one_hot(traj.header.lineups[team_index(team)]);
  std::vector<LabeledExample> out;
  for (std::size_t t = 0; t < offsets.size(); ++t) {
    if (t % static_cast<std::size_t>(stride) != 0) continue;
    LabeledExample e;
    e.features = std::move(feats[t]);
    e.goal = macro[t + offsets[t]];
    e.aux = aux;
    e.team = team;
    e.frame = static_cast<int>(t);
    e.target_frame = static_cast<int>(t) + offsets[t];
    e.source = source;
    out.push_back(std::move(e));
  }
  return out;
}

// ---- dataset file ------------------------------------------------------------

struct DatasetHeader {
  int goal_dim = kMacroDim;
  int horizon_frames = 0;
  int noise_frames = 0;
  double horizon_seconds = 0;
  double noise_seconds = 0;
  int frames_per_second = 0;
  int gold_bucket = kDefaultGoldBucket;
  int layout_version = kMacroLayoutVersion;
  int feature_width = kTeamFeatureWidth;
  int aux_width = kLineupWidth;
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetHeader header;
  std::vector<LabeledExample> examples;
};

inline Json dataset_header_to_json(const DatasetHeader& h) {
  return {{"type", "header"},
          {"D_g", h.goal_dim},
          {"C_frames", h.horizon_frames},
          {"epsilon_frames", h.noise_frames},
          {"C_seconds", h.horizon_seconds},
          {"epsilon_seconds", h.noise_seconds},
          {"frames_per_second", h.frames_per_second},
          {"gold_bucket", h.gold_bucket},
          {"layout_version", h.layout_version},
          {"feature_width", h.feature_width},
          {"aux_width", h.aux_width},
          {"seed", h.seed}};
}

inline DatasetHeader dataset_header_from_json(const Json& j) {
  DatasetHeader h;
  h.goal_dim = j.at("D_g");
  h.horizon_frames = j.at("C_frames");
  h.noise_frames = j.at("epsilon_frames");
  h.horizon_seconds = j.at("C_seconds");
  h.noise_seconds = j.at("epsilon_seconds");
  h.frames_per_second = j.at("frames_per_second");
  h.gold_bucket = j.at("gold_bucket");
  h.layout_version = j.at("layout_version");
  h.feature_width = j.at("feature_width");
  h.aux_width = j.at("aux_width");
  h.seed = j.value("seed", std::uint64_t{0});
  return h;
}

inline Json example_to_json(const LabeledExample& e) {
  return {{"team", sim::to_string(e.team)}, {"frame", e.frame},  {"target_frame", e.target_frame},
          {"source", e.source},             {"x", e.features},   {"g", e.goal.values},
          {"aux", e.aux}};
}

inline LabeledExample example_from_json(const Json& j) {
  LabeledExample e;
  e.team = j.at("team") == "red" ? sim::Team::red : sim::Team::blue;
  e.frame = j.at("frame");
  e.target_frame = j.at("target_frame");
  e.source = j.at("source");
  e.features = j.at("x").get<std::vector<double>>();
  e.goal = macro_from_json(j.at("g"));
  e.aux = j.at("aux").get<std::vector<double>>();
  return e;
}

class DatasetWriter {
 public:
  DatasetWriter(const fs::path& path, const DatasetHeader& h)
      : out_(open_out(path, std::ios::out | std::ios::binary | std::ios::trunc)), path_(path) {
    out_ << dataset_header_to_json(h).dump() << '\n';
  }
  void write(const LabeledExample& e) {
    out_ << example_to_json(e).dump() << '\n';
    ++count_;
  }
  std::size_t count() const { return count_; }
  void close() {
    out_.flush();
    if (!out_) fail(ErrorKind::io, "write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  fs::path path_;
  std::size_t count_ = 0;
};

inline Dataset read_dataset(const fs::path& path) {
  Dataset d;
  bool have_header = false;
  for_each_jsonl(path, [&](const Json& j) {
    if (j.contains("type") && j["type"] == "header") {
      d.header = dataset_header_from_json(j);
      have_header = true;
      return;
    }
    d.examples.push_back(example_from_json(j));
  });
  require(have_header, ErrorKind::data, path.string() + ": missing dataset header");
  require(d.header.goal_dim == kMacroDim && d.header.layout_version == kMacroLayoutVersion, ErrorKind::data,
          path.string() + ": macro-state layout does not match this build");
  for (const auto& e : d.examples)
    require(static_cast<int>(e.features.size()) == d.header.feature_width &&
                static_cast<int>(e.aux.size()) == d.header.aux_width,
            ErrorKind::data, path.string() + ": example width does not match the header");
  return d;
}

}  // namespace macrogoal::macro
