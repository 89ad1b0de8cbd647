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
#include <cstdint>
#include <span>
#include <vector>

#include "macrogoal/core/error.hpp"

namespace macrogoal::nn {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate) : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

/// One bias-corrected Adam update.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s) {
  require(params.size() == grads.size() && s.m.size() == params.size() && s.v.size() == params.size(),
          ErrorKind::shape, "adam: parameter, gradient and moment lengths differ");
  for (std::size_t i = 0; i < grads.size(); ++i)
    require(std::isfinite(grads[i]), ErrorKind::numeric, "non-finite gradient at index " + std::to_string(i));
  s.t += 1;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grads[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
    const double mh = s.m[i] / c1;
    const double vh = s.v[i] / c2;
    params[i] -= s.lr * mh / (std::sqrt(vh) + s.eps);
  }
}

/// Rescales grads to at most max_norm in L2; returns the norm before clipping.
inline double clip_grad_norm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double k = max_norm / norm;
    for (double& g : grads) g *= k;
  }
  return norm;
}

}  // namespace macrogoal::nn
