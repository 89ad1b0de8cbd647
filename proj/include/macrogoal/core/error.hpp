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

#include <stdexcept>
#include <string>

namespace macrogoal {

enum class ErrorKind {
  usage,
  config,
  invalid_lineup,
  game_over,
  not_found,
  shape,
  index,
  cache,
  data,
  io,
  degenerate_cluster,
  numeric,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::config: return "config";
    case ErrorKind::invalid_lineup: return "invalid-lineup";
    case ErrorKind::game_over: return "game-over";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::shape: return "shape";
    case ErrorKind::index: return "index";
    case ErrorKind::cache: return "cache";
    case ErrorKind::data: return "data";
    case ErrorKind::io: return "io";
    case ErrorKind::degenerate_cluster: return "degenerate-cluster";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

// Process exit codes: 0 success, 1 usage/config, 2 data, 3 numeric divergence.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::config:
    case ErrorKind::invalid_lineup:
      return 1;
    case ErrorKind::numeric:
      return 3;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace macrogoal
