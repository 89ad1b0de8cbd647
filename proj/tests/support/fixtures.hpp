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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/rng.hpp"
#include "macrogoal/macro/features.hpp"
#include "macrogoal/macro/labels.hpp"
#include "macrogoal/sim/controller.hpp"
#include "macrogoal/sim/types.hpp"
#include "support/synthetic.hpp"

namespace macrogoal::testing {

/// Kind of the Error thrown by fn; records a failure when nothing is thrown.
template <class Fn>
ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::usage;
}

/// Picks uniformly among the legal actions of each hero.
class RandomController : public sim::Controller {
 public:
  explicit RandomController(std::uint64_t seed) : rng_(seed) {}
  std::string id() const override { return "random"; }
  void act(const sim::GameState& s, sim::Team team, sim::TeamActions& out) override {
    for (int k = 0; k < sim::kTeamSize; ++k) {
      const auto legal = sim::legal_actions(s, sim::GameState::hero_id(team, k));
      out[k] = legal[rng_.below(legal.size())];
    }
  }

 private:
  Rng rng_;
};

/// Joint random legal actions for all ten heroes.
inline std::array<sim::HeroAction, sim::kHeroCount> random_actions(const sim::GameState& s, Rng& rng) {
  std::array<sim::HeroAction, sim::kHeroCount> a{};
  for (int h = 0; h < sim::kHeroCount; ++h) {
    const auto legal = sim::legal_actions(s, h);
    a[h] = legal[rng.below(legal.size())];
  }
  return a;
}

}  // namespace macrogoal::testing
