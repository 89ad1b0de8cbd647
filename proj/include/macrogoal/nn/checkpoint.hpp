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

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "macrogoal/core/io.hpp"
#include "macrogoal/nn/adam.hpp"
#include "macrogoal/nn/net.hpp"

namespace macrogoal::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

inline std::uint64_t get_u64(std::istream& in, const std::string& what) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  require(static_cast<bool>(in), ErrorKind::data, what + ": truncated checkpoint");
  return v;
}

inline void put_reals(std::ostream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> get_reals(std::istream& in, std::size_t n, const std::string& what) {
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  require(static_cast<bool>(in), ErrorKind::data, what + ": truncated checkpoint");
  return v;
}

}  // namespace detail

inline fs::path sidecar_path(const fs::path& p) { return fs::path(p.string() + ".json"); }
inline fs::path adam_path(const fs::path& p) { return fs::path(p.string() + ".adam"); }

/// Binary: u64 spec hash, u64 parameter count, raw 64-bit reals. The NetSpec
/// goes to a JSON sidecar next to it; `extra` is merged into the sidecar.
inline void save_checkpoint(const fs::path& path, const Net& net, const Json& extra = Json::object()) {
  {
    auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    detail::put_u64(out, spec_hash(net.spec()));
    detail::put_u64(out, net.param_count());
    detail::put_reals(out, net.params());
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
  }
  Json side = extra;
  side["spec"] = spec_to_json(net.spec());
  side["spec_hash"] = spec_hash(net.spec());
  side["param_count"] = net.param_count();
  write_json(sidecar_path(path), side);
}

inline Json read_sidecar(const fs::path& path) {
  require(fs::exists(sidecar_path(path)), ErrorKind::data, "missing checkpoint sidecar for " + path.string());
  return read_json(sidecar_path(path));
}

/// Loads a checkpoint, rebuilding the net from its sidecar spec.
inline Net load_checkpoint(const fs::path& path) {
  const Json side = read_sidecar(path);
  Net net(spec_from_json(side.at("spec")));
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::uint64_t hash = detail::get_u64(in, path.string());
  const std::uint64_t count = detail::get_u64(in, path.string());
  require(hash == spec_hash(net.spec()), ErrorKind::config, path.string() + ": checkpoint does not match its spec");
  require(count == net.param_count(), ErrorKind::config, path.string() + ": parameter count mismatch");
  net.set_params(detail::get_reals(in, count, path.string()));
  return net;
}

/// Loads a checkpoint into an existing net; the spec must match.
inline void load_checkpoint_into(const fs::path& path, Net& net) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::uint64_t hash = detail::get_u64(in, path.string());
  const std::uint64_t count = detail::get_u64(in, path.string());
  require(hash == spec_hash(net.spec()) && count == net.param_count(), ErrorKind::config,
          path.string() + ": checkpoint spec is incompatible with this model");
  net.set_params(detail::get_reals(in, count, path.string()));
}

inline void save_adam(const fs::path& path, const AdamState& s) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  detail::put_u64(out, s.m.size());
  detail::put_u64(out, static_cast<std::uint64_t>(s.t));
  detail::put_reals(out, s.m);
  detail::put_reals(out, s.v);
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

inline void load_adam(const fs::path& path, AdamState& s) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::uint64_t n = detail::get_u64(in, path.string());
  require(n == s.m.size(), ErrorKind::config, path.string() + ": optimizer state length mismatch");
  s.t = static_cast<std::int64_t>(detail::get_u64(in, path.string()));
  s.m = detail::get_reals(in, n, path.string());
  s.v = detail::get_reals(in, n, path.string());
}

}  // namespace macrogoal::nn
