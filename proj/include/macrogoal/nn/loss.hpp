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
#include <span>
#include <vector>

#include "macrogoal/core/error.hpp"

namespace macrogoal::nn {

/// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp((logits[i] - mx) / temperature);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - mx);
  const double lse = mx + std::log(total);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

inline void check_label(int label, std::size_t width) {
  if (label < 0 || static_cast<std::size_t>(label) >= width)
    fail(ErrorKind::index, "label " + std::to_string(label) + " outside [0, " + std::to_string(width) + ")");
}

/// -alpha (1 - p)^gamma log p on a probability vector.
inline double focal_loss(std::span<const double> probs, int label, double alpha, double gamma) {
  check_label(label, probs.size());
  const double p = probs[static_cast<std::size_t>(label)];
  require(p > 0.0, ErrorKind::numeric, "focal loss needs a positive label probability");
  if (p >= 1.0) return 0.0;
  return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
}

/// Focal loss on logits; writes d(loss)/d(logits) into grad (overwrites).
inline double focal_loss_logits(std::span<const double> logits, int label, double alpha, double gamma,
                                std::span<double> grad) {
  check_label(label, logits.size());
  const auto logp = log_softmax(logits);
  const double lp = logp[static_cast<std::size_t>(label)];
  const double p = std::exp(lp);
  const double q = 1.0 - p;
  const double loss = q > 0.0 ? -alpha * std::pow(q, gamma) * lp : 0.0;
  // d loss / d z_j = A (delta_{label,j} - p_j), A = p * d loss / d p
  double a;
  if (q > 0.0)
    a = alpha * gamma * std::pow(q, gamma - 1.0) * p * lp - alpha * std::pow(q, gamma);
  else
    a = gamma == 0.0 ? -alpha : 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double pj = std::exp(logp[j]);
    grad[j] = a * ((static_cast<int>(j) == label ? 1.0 : 0.0) - pj);
  }
  return loss;
}

/// -log softmax(z)_label; writes the gradient into grad (overwrites).
inline double cross_entropy_logits(std::span<const double> logits, int label, std::span<double> grad) {
  check_label(label, logits.size());
  const auto logp = log_softmax(logits);
  for (std::size_t j = 0; j < logits.size(); ++j)
    grad[j] = std::exp(logp[j]) - (static_cast<int>(j) == label ? 1.0 : 0.0);
  return -logp[static_cast<std::size_t>(label)];
}

inline double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace macrogoal::nn
