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
#include <span>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/core/parallel.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/macro/features.hpp"
#include "macrogoal/macro/labels.hpp"
#include "macrogoal/macro/macro_state.hpp"
#include "macrogoal/nn/adam.hpp"
#include "macrogoal/nn/checkpoint.hpp"
#include "macrogoal/nn/loss.hpp"
#include "macrogoal/nn/net.hpp"

namespace macrogoal::meta {

using macro::kMacroArity;
using macro::kMacroDim;

inline constexpr int kAuxSlots = sim::kTeamSize;
inline constexpr int kAuxClasses = sim::kRoleCount;
inline constexpr int kAuxHead = kMacroDim;  // head index of the lineup reconstruction head

struct MetaModelConfig {
  std::vector<int> unit_hidden = {32, 32};
  std::vector<int> query_hidden = {32};
  std::vector<int> stats_hidden = {32};
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MetaModelConfig, unit_hidden, query_hidden, stats_hidden)

/// Shared unit MLP over the unit slots, lineup MLP as attention query, a stats
/// MLP over [stats | lineup]; goal heads read [stats embedding | strategy
/// embedding], the lineup head reads the strategy embedding.
inline nn::NetSpec meta_spec(const MetaModelConfig& c = {}) {
  nn::NetSpec s;
  s.input_width = macro::kStatsWidth;
  s.hidden = c.stats_hidden;
  s.activation = nn::Activation::relu;
  s.attention = nn::AttentionSpec{macro::kUnitSlots, macro::kUnitWidth, c.unit_hidden, macro::kLineupWidth, c.query_hidden};
  for (int d = 0; d < kMacroDim; ++d) s.heads.push_back({"goal_" + std::to_string(d), kMacroArity[d]});
  s.heads.push_back({"aux", macro::kLineupWidth, nn::HeadSource::attention});
  return s;
}

struct MetaTrainConfig {
  double lambda = 1.0;
  double alpha = 0.75;
  double gamma = 2.0;
  double lr = 1e-4;
  int batch_size = 64;
  int epochs = 20;
  double eval_fraction = 0.1;
  double temperature = 1.0;
  MetaModelConfig model;

  void validate() const {
    require(lambda >= 0.0, ErrorKind::config, "meta.lambda must be >= 0");
    require(eval_fraction > 0.0 && eval_fraction < 1.0, ErrorKind::config, "meta.eval_fraction must be in (0, 1)");
    require(batch_size >= 1 && epochs >= 0 && lr > 0.0, ErrorKind::config, "meta batch/epochs/lr out of range");
    require(temperature > 0.0, ErrorKind::config, "meta.temperature must be > 0");
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MetaTrainConfig, lambda, alpha, gamma, lr, batch_size, epochs,
                                                eval_fraction, temperature, model)

/// Role index of each lineup slot, read from the one-hot block.
inline std::array<int, kAuxSlots> aux_labels(std::span<const double> aux) {
  require(static_cast<int>(aux.size()) == macro::kLineupWidth, ErrorKind::shape, "aux label width mismatch");
  std::array<int, kAuxSlots> out{};
  for (int s = 0; s < kAuxSlots; ++s) {
    int hit = -1;
    for (int r = 0; r < kAuxClasses; ++r)
      if (aux[s * kAuxClasses + r] > 0.5) hit = r;
    require(hit >= 0, ErrorKind::shape, "aux label slot has no active role");
    out[s] = hit;
  }
  return out;
}

/// Batch-mean focal and auxiliary terms; total = focal + lambda * aux.
struct MetaLoss {
  double focal = 0.0;
  double aux = 0.0;
  double total = 0.0;
  std::array<int, kMacroDim> correct{};
  int count = 0;
};

namespace detail {

struct Partial {
  double focal = 0.0;
  double aux = 0.0;
  std::array<int, kMacroDim> correct{};
  std::vector<double> grad;
};

// Sums over examples [begin, end); per-example gradients are scaled by `scale`.
inline void accumulate(const nn::Net& net, std::span<const macro::LabeledExample* const> batch, const MetaTrainConfig& cfg,
                       double scale, Partial& out, bool want_grad) {
  nn::Cache cache;
  std::vector<std::vector<double>> dheads(net.spec().heads.size());
  if (want_grad) out.grad.assign(net.param_count(), 0.0);
  for (const macro::LabeledExample* e : batch) {
    net.forward(e->features, cache);
    for (int d = 0; d < kMacroDim; ++d) {
      const int y = e->goal.values[d];
      const auto& z = cache.heads[d];
      require(y >= 0 && y < static_cast<int>(z.size()), ErrorKind::shape,
              "goal label " + std::to_string(y) + " outside the arity of dimension " + std::to_string(d));
      dheads[d].resize(z.size());
      out.focal += nn::focal_loss_logits(z, y, cfg.alpha, cfg.gamma, dheads[d]);
      for (double& g : dheads[d]) g *= scale;
      if (std::max_element(z.begin(), z.end()) - z.begin() == y) out.correct[d] += 1;
    }
    const auto roles = aux_labels(e->aux);
    const auto& za = cache.heads[kAuxHead];
    auto& da = dheads[kAuxHead];
    da.assign(za.size(), 0.0);
    for (int s = 0; s < kAuxSlots; ++s) {
      std::span<const double> zs(za.data() + s * kAuxClasses, kAuxClasses);
      std::span<double> gs(da.data() + s * kAuxClasses, kAuxClasses);
      out.aux += nn::cross_entropy_logits(zs, roles[s], gs);
    }
    for (double& g : da) g *= scale * cfg.lambda;
    if (want_grad) net.backward(cache, dheads, out.grad);
  }
}

}  // namespace detail

inline constexpr std::size_t kGradChunk = 32;

/// Eq.-1 loss and gradient, mean over the batch. Gradients are accumulated in
/// fixed chunks and summed in order, so results do not depend on `workers`.
inline MetaLoss meta_loss(const nn::Net& net, std::span<const macro::LabeledExample* const> batch, const MetaTrainConfig& cfg,
                          std::vector<double>* grad = nullptr, int workers = 1) {
  require(!batch.empty(), ErrorKind::data, "meta_loss needs a non-empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t chunks = (batch.size() + kGradChunk - 1) / kGradChunk;
  std::vector<detail::Partial> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t b = c * kGradChunk;
    const std::size_t e = std::min(batch.size(), b + kGradChunk);
    detail::accumulate(net, batch.subspan(b, e - b), cfg, scale, parts[c], grad != nullptr);
  });
  MetaLoss out;
  double focal = 0.0, aux = 0.0;
  if (grad) grad->assign(net.param_count(), 0.0);
  for (const auto& p : parts) {
    focal += p.focal;
    aux += p.aux;
    for (int d = 0; d < kMacroDim; ++d) out.correct[d] += p.correct[d];
    if (grad)
      for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += p.grad[i];
  }
  out.count = static_cast<int>(batch.size());
  out.focal = focal * scale;
  out.aux = aux * scale;
  out.total = out.focal + cfg.lambda * out.aux;
  return out;
}

inline MetaLoss meta_loss(const nn::Net& net, const std::vector<macro::LabeledExample>& batch, const MetaTrainConfig& cfg,
                          std::vector<double>* grad = nullptr, int workers = 1) {
  std::vector<const macro::LabeledExample*> ptrs;
  for (const auto& e : batch) ptrs.push_back(&e);
  return meta_loss(net, ptrs, cfg, grad, workers);
}

using GoalDistribution = std::array<std::vector<double>, kMacroDim>;

inline GoalDistribution predict_goal_distribution(const nn::Net& net, std::span<const double> features,
                                                  double temperature = 1.0) {
  require(static_cast<int>(features.size()) == net.spec().total_input_width(), ErrorKind::shape,
          "meta-controller feature width mismatch");
  nn::Cache cache;
  net.forward(features, cache);
  GoalDistribution out;
  for (int d = 0; d < kMacroDim; ++d) out[d] = nn::softmax(cache.heads[d], temperature);
  return out;
}

inline constexpr double kArgmaxTemperature = 1e-6;

/// Each dimension drawn independently from its temperature-scaled
/// categorical; below kArgmaxTemperature the mode is returned.
inline macro::MacroGoal sample_goal(const nn::Net& net, std::span<const double> features, double temperature, Rng& rng) {
  require(temperature > 0.0, ErrorKind::config, "temperature must be > 0");
  macro::MacroGoal g;
  if (temperature < kArgmaxTemperature) {
    nn::Cache cache;
    require(static_cast<int>(features.size()) == net.spec().total_input_width(), ErrorKind::shape,
            "meta-controller feature width mismatch");
    net.forward(features, cache);
    for (int d = 0; d < kMacroDim; ++d) {
      const auto& z = cache.heads[d];
      g.values[d] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    }
    return g;
  }
  const auto dist = predict_goal_distribution(net, features, temperature);
  for (int d = 0; d < kMacroDim; ++d) g.values[d] = static_cast<int>(rng.categorical(dist[d]));
  return g;
}

// ---- training -------------------------------------------------------------------

struct MetaEpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double eval_loss = 0.0;
  double eval_focal = 0.0;
  double eval_aux = 0.0;
  std::array<double, kMacroDim> eval_accuracy{};
};

struct MetaTrainResult {
  nn::Net net;
  std::vector<MetaEpochLog> log;
  int best_epoch = 0;
  double best_eval_loss = 0.0;
};

inline std::string meta_csv_header() {
  std::string h = "epoch,train_loss,eval_loss,eval_focal,eval_aux";
  for (int d = 0; d < kMacroDim; ++d) h += ",acc_" + std::to_string(d);
  return h;
}

inline std::string meta_csv_row(const MetaEpochLog& l) {
  char buf[64];
  std::string row = std::to_string(l.epoch);
  for (double v : {l.train_loss, l.eval_loss, l.eval_focal, l.eval_aux}) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    row += buf;
  }
  for (double a : l.eval_accuracy) {
    std::snprintf(buf, sizeof buf, ",%.6f", a);
    row += buf;
  }
  return row;
}

/// Deterministic train/eval split of example indices.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_examples(std::size_t n, double eval_fraction,
                                                                                  Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(idx));
  std::size_t n_eval = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(n)));
  n_eval = std::clamp<std::size_t>(n_eval, n > 1 ? 1 : 0, n > 1 ? n - 1 : 0);
  std::vector<std::size_t> eval(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_eval));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_eval), idx.end());
  std::sort(eval.begin(), eval.end());
  return {train, eval};
}

/// Minibatch Adam on Eq. 1. Writes `meta.csv` and the best-eval checkpoint
/// `meta.bin` into out_dir when it is non-empty.
inline MetaTrainResult train_meta(const std::vector<macro::LabeledExample>& examples, const MetaTrainConfig& cfg,
                                  std::uint64_t seed, const fs::path& out_dir = {}, int workers = 1) {
  cfg.validate();
  require(!examples.empty(), ErrorKind::data, "meta training needs a non-empty dataset");
  require(examples.size() >= static_cast<std::size_t>(cfg.batch_size), ErrorKind::data,
          "dataset has fewer examples than one batch");
  Rng rng(derive_seed(seed, {0x6d657461ULL}));
  MetaTrainResult res{nn::Net(meta_spec(cfg.model)), {}, 0, 0.0};
  nn::Net& net = res.net;
  net.init(rng);
  auto [train, eval] = split_examples(examples.size(), cfg.eval_fraction, rng);
  std::vector<const macro::LabeledExample*> eval_ptrs;
  for (std::size_t i : eval) eval_ptrs.push_back(&examples[i]);

  nn::AdamState adam(net.param_count(), cfg.lr);
  std::vector<double> grad;
  std::vector<double> best(net.params().begin(), net.params().end());
  std::optional<std::ofstream> csv;
  if (!out_dir.empty()) {
    csv.emplace(open_out(out_dir / "meta.csv", std::ios::out | std::ios::binary | std::ios::trunc));
    *csv << meta_csv_header() << '\n';
  }
  auto evaluate = [&](MetaEpochLog& l) {
    const MetaLoss ev = meta_loss(net, eval_ptrs, cfg, nullptr, workers);
    l.eval_loss = ev.total;
    l.eval_focal = ev.focal;
    l.eval_aux = ev.aux;
    for (int d = 0; d < kMacroDim; ++d) l.eval_accuracy[d] = static_cast<double>(ev.correct[d]) / ev.count;
  };
  MetaEpochLog init_log;
  evaluate(init_log);
  res.best_eval_loss = init_log.eval_loss;

  std::vector<const macro::LabeledExample*> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(train));
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < train.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      batch.clear();
      for (std::size_t i = b; i < std::min(train.size(), b + cfg.batch_size); ++i) batch.push_back(&examples[train[i]]);
      const MetaLoss l = meta_loss(net, batch, cfg, &grad, workers);
      sum += l.total * static_cast<double>(batch.size());
      seen += batch.size();
      nn::adam_step(net.mutable_params(), grad, adam);
    }
    MetaEpochLog l;
    l.epoch = epoch;
    l.train_loss = sum / static_cast<double>(seen);
    evaluate(l);
    require(std::isfinite(l.train_loss) && std::isfinite(l.eval_loss), ErrorKind::numeric,
            "meta training diverged at epoch " + std::to_string(epoch));
    if (l.eval_loss < res.best_eval_loss || res.best_epoch == 0) {
      res.best_eval_loss = l.eval_loss;
      res.best_epoch = epoch;
      best.assign(net.params().begin(), net.params().end());
    }
    if (csv) *csv << meta_csv_row(l) << '\n';
    res.log.push_back(l);
  }
  net.set_params(best);
  if (!out_dir.empty()) {
    csv->flush();
    Json extra = {{"kind", "meta_controller"},
                  {"best_epoch", res.best_epoch},
                  {"best_eval_loss", res.best_eval_loss},
                  {"temperature", cfg.temperature},
                  {"train_config", cfg}};
    nn::save_checkpoint(out_dir / "meta.bin", net, extra);
  }
  return res;
}

}  // namespace macrogoal::meta
