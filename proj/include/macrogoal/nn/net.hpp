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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "macrogoal/core/error.hpp"
#include "macrogoal/core/io.hpp"
#include "macrogoal/core/rng.hpp"

namespace macrogoal::nn {

enum class Activation { relu, tanh };
enum class HeadSource { trunk, attention };

inline const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
inline const char* to_string(HeadSource s) { return s == HeadSource::trunk ? "trunk" : "attention"; }

struct HeadSpec {
  std::string name;
  int width = 0;
  HeadSource source = HeadSource::trunk;
  double init_scale = 1.0;  // multiplies the initial weight range
};

/// Shared per-unit MLP producing keys/values, and a query MLP whose last layer
/// is linear and projects to the key width.
struct AttentionSpec {
  int slots = 0;
  int unit_width = 0;
  std::vector<int> unit_hidden;  // last entry is the key/value width
  int query_width = 0;
  std::vector<int> query_hidden;
};

/// Input layout: [main (input_width) | slots x unit_width | query_width].
/// The trunk MLP reads [main | query]. Trunk heads read [trunk output | attention
/// output]; attention heads read the attention output alone.
struct NetSpec {
  int input_width = 0;
  std::vector<int> hidden;
  Activation activation = Activation::relu;
  std::vector<HeadSpec> heads;
  std::optional<AttentionSpec> attention;

  int key_width() const { return attention ? attention->unit_hidden.back() : 0; }
  int query_input_width() const { return attention ? attention->query_width : 0; }
  int total_input_width() const {
    return input_width + (attention ? attention->slots * attention->unit_width + attention->query_width : 0);
  }
  int trunk_input_width() const { return input_width + query_input_width(); }
  int trunk_output_width() const { return hidden.empty() ? trunk_input_width() : hidden.back(); }
  int feature_width() const { return trunk_output_width() + key_width(); }

  void validate() const {
    require(input_width >= 0 && total_input_width() > 0, ErrorKind::shape, "net input width must be positive");
    for (int h : hidden) require(h > 0, ErrorKind::shape, "hidden widths must be positive");
    require(!heads.empty(), ErrorKind::shape, "net needs at least one head");
    for (std::size_t i = 0; i < heads.size(); ++i) {
      require(heads[i].width > 0, ErrorKind::shape, "head '" + heads[i].name + "' must have positive width");
      for (std::size_t j = 0; j < i; ++j)
        require(heads[i].name != heads[j].name, ErrorKind::shape, "duplicate head name '" + heads[i].name + "'");
      require(heads[i].source == HeadSource::trunk || attention, ErrorKind::shape,
              "head '" + heads[i].name + "' reads attention but the net has none");
    }
    if (attention) {
      require(attention->slots >= 1 && attention->unit_width >= 1, ErrorKind::shape, "attention needs slots and unit width");
      require(!attention->unit_hidden.empty(), ErrorKind::shape, "attention needs a unit MLP");
      for (int h : attention->unit_hidden) require(h > 0, ErrorKind::shape, "unit widths must be positive");
      for (int h : attention->query_hidden) require(h > 0, ErrorKind::shape, "query widths must be positive");
      require(attention->query_width >= 1, ErrorKind::shape, "attention needs a query input");
    }
  }
};

inline Json spec_to_json(const NetSpec& s) {
  Json j;
  j["input_width"] = s.input_width;
  j["hidden"] = s.hidden;
  j["activation"] = to_string(s.activation);
  j["heads"] = Json::array();
  for (const auto& h : s.heads)
    j["heads"].push_back({{"name", h.name}, {"width", h.width}, {"source", to_string(h.source)}, {"init_scale", h.init_scale}});
  if (s.attention) {
    const auto& a = *s.attention;
    j["attention"] = {{"slots", a.slots},
                      {"unit_width", a.unit_width},
                      {"unit_hidden", a.unit_hidden},
                      {"query_width", a.query_width},
                      {"query_hidden", a.query_hidden}};
  } else {
    j["attention"] = nullptr;
  }
  return j;
}

inline NetSpec spec_from_json(const Json& j) {
  NetSpec s;
  s.input_width = j.at("input_width");
  s.hidden = j.at("hidden").get<std::vector<int>>();
  const std::string act = j.at("activation");
  require(act == "relu" || act == "tanh", ErrorKind::config, "unknown activation '" + act + "'");
  s.activation = act == "relu" ? Activation::relu : Activation::tanh;
  for (const auto& h : j.at("heads")) {
    const std::string src = h.at("source");
    s.heads.push_back({h.at("name"), h.at("width"), src == "attention" ? HeadSource::attention : HeadSource::trunk,
                       h.value("init_scale", 1.0)});
  }
  if (j.contains("attention") && !j["attention"].is_null()) {
    const auto& a = j["attention"];
    s.attention = AttentionSpec{a.at("slots"), a.at("unit_width"), a.at("unit_hidden").get<std::vector<int>>(),
                                a.at("query_width"), a.at("query_hidden").get<std::vector<int>>()};
  }
  s.validate();
  return s;
}

inline std::uint64_t spec_hash(const NetSpec& s) { return fnv1a(spec_to_json(s).dump()); }

// ---- primitives ----------------------------------------------------------------

inline double activate(Activation a, double x) { return a == Activation::relu ? (x > 0 ? x : 0.0) : std::tanh(x); }

// Derivative expressed through the activation output y.
inline double activate_grad(Activation a, double y) { return a == Activation::relu ? (y > 0 ? 1.0 : 0.0) : 1.0 - y * y; }

/// Dense layer: weights stored [in][out] row-major, followed by `out` biases.
struct Dense {
  int in = 0;
  int out = 0;
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(in) * out + out; }
  std::size_t bias() const { return offset + static_cast<std::size_t>(in) * out; }

  // y = b + x W
  void forward(const double* p, const double* x, double* y) const {
    const double* w = p + offset;
    const double* b = p + bias();
    for (int o = 0; o < out; ++o) y[o] = b[o];
    for (int i = 0; i < in; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(i) * out;
      for (int o = 0; o < out; ++o) y[o] += xi * row[o];
    }
  }

  // Accumulates dW, db into g and writes dx when non-null.
  void backward(const double* p, const double* x, const double* dy, double* g, double* dx) const {
    const double* w = p + offset;
    double* gw = g + offset;
    double* gb = g + bias();
    for (int o = 0; o < out; ++o) gb[o] += dy[o];
    for (int i = 0; i < in; ++i) {
      const double* row = w + static_cast<std::size_t>(i) * out;
      const double xi = x[i];
      if (xi != 0.0) {
        double* grow = gw + static_cast<std::size_t>(i) * out;
        for (int o = 0; o < out; ++o) grow[o] += xi * dy[o];
      }
      if (dx != nullptr) {
        double acc = 0.0;
        for (int o = 0; o < out; ++o) acc += row[o] * dy[o];
        dx[i] = acc;
      }
    }
  }
};

/// softmax(q . k_i / sqrt(d)) over unmasked slots; returns the weights.
/// All-masked input yields all-zero weights.
inline void attention_weights(const double* q, const double* keys, int slots, int d, const std::vector<char>& mask,
                              double* alpha) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  double mx = -INFINITY;
  for (int i = 0; i < slots; ++i) {
    if (!mask[i]) continue;
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += q[k] * keys[static_cast<std::size_t>(i) * d + k];
    alpha[i] = s * scale;
    mx = std::max(mx, alpha[i]);
  }
  double total = 0.0;
  for (int i = 0; i < slots; ++i) {
    alpha[i] = mask[i] ? std::exp(alpha[i] - mx) : 0.0;
    total += alpha[i];
  }
  if (total > 0)
    for (int i = 0; i < slots; ++i) alpha[i] /= total;
}

/// Stand-alone scaled dot-product attention over key/value lists.
inline std::vector<double> attention(std::span<const double> query, const std::vector<std::vector<double>>& keys,
                                     const std::vector<std::vector<double>>& values) {
  require(!keys.empty() && keys.size() == values.size(), ErrorKind::shape, "attention needs matching non-empty slots");
  const int d = static_cast<int>(query.size());
  const std::size_t vd = values[0].size();
  std::vector<double> flat;
  for (const auto& k : keys) {
    require(static_cast<int>(k.size()) == d, ErrorKind::shape, "key width differs from query width");
    flat.insert(flat.end(), k.begin(), k.end());
  }
  std::vector<char> mask(keys.size(), 1);
  std::vector<double> alpha(keys.size());
  attention_weights(query.data(), flat.data(), static_cast<int>(keys.size()), d, mask, alpha.data());
  std::vector<double> out(vd, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i].size() == vd, ErrorKind::shape, "value widths differ");
    for (std::size_t k = 0; k < vd; ++k) out[k] += alpha[i] * values[i][k];
  }
  return out;
}

// ---- network -------------------------------------------------------------------

/// Activations of one forward pass, reusable across calls.
struct Cache {
  std::uint64_t version = 0;
  std::uint64_t owner = 0;
  std::vector<double> input;
  std::vector<double> trunk_in;
  std::vector<std::vector<double>> trunk;  // post-activation per hidden layer
  std::vector<std::vector<double>> units;  // per unit layer: slots x width
  std::vector<char> mask;
  std::vector<std::vector<double>> query;  // per query hidden layer, then the projected query
  std::vector<double> alpha;
  std::vector<double> attn;
  std::vector<double> features;
  std::vector<std::vector<double>> heads;  // raw head outputs (logits / values)
};

class Net {
 public:
  Net() = default;
  explicit Net(NetSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::size_t off = 0;
    auto add = [&off](int in, int out) {
      Dense d{in, out, off};
      off += d.size();
      return d;
    };
    int w = spec_.trunk_input_width();
    for (int h : spec_.hidden) {
      trunk_.push_back(add(w, h));
      w = h;
    }
    if (spec_.attention) {
      const auto& a = *spec_.attention;
      int u = a.unit_width;
      for (int h : a.unit_hidden) {
        unit_.push_back(add(u, h));
        u = h;
      }
      int q = a.query_width;
      for (int h : a.query_hidden) {
        query_.push_back(add(q, h));
        q = h;
      }
      query_.push_back(add(q, spec_.key_width()));
    }
    for (const auto& h : spec_.heads)
      heads_.push_back(add(h.source == HeadSource::trunk ? spec_.feature_width() : spec_.key_width(), h.width));
    params_.assign(off, 0.0);
    owner_ = next_owner();
  }

  // Copies get their own identity so caches never cross instances.
  Net(const Net& o) : spec_(o.spec_), trunk_(o.trunk_), unit_(o.unit_), query_(o.query_), heads_(o.heads_),
                      params_(o.params_), owner_(next_owner()) {}
  Net& operator=(const Net& o) {
    if (this != &o) {
      Net tmp(o);
      *this = std::move(tmp);
    }
    return *this;
  }
  Net(Net&&) noexcept = default;
  Net& operator=(Net&&) noexcept = default;

  const NetSpec& spec() const { return spec_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  /// Mutable access invalidates caches produced before the call.
  std::span<double> mutable_params() {
    ++version_;
    return params_;
  }
  std::uint64_t version() const { return version_; }

  int head_index(const std::string& name) const {
    for (std::size_t i = 0; i < spec_.heads.size(); ++i)
      if (spec_.heads[i].name == name) return static_cast<int>(i);
    fail(ErrorKind::not_found, "no head named '" + name + "'");
  }

  /// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases; head
  /// weights are further multiplied by the head's init_scale.
  void init(Rng& rng) {
    ++version_;
    auto fill = [&](const Dense& d, double scale) {
      const double lim = scale * std::sqrt(6.0 / (d.in + d.out));
      for (std::size_t i = 0; i < static_cast<std::size_t>(d.in) * d.out; ++i)
        params_[d.offset + i] = (2.0 * rng.uniform() - 1.0) * lim;
      for (int o = 0; o < d.out; ++o) params_[d.bias() + o] = 0.0;
    };
    for (const auto& d : trunk_) fill(d, 1.0);
    for (const auto& d : unit_) fill(d, 1.0);
    for (const auto& d : query_) fill(d, 1.0);
    for (std::size_t h = 0; h < heads_.size(); ++h) fill(heads_[h], spec_.heads[h].init_scale);
  }

  void forward(std::span<const double> x, Cache& c) const {
    require(static_cast<int>(x.size()) == spec_.total_input_width(), ErrorKind::shape,
            "net input has width " + std::to_string(x.size()) + ", expected " + std::to_string(spec_.total_input_width()));
    const double* p = params_.data();
    const Activation act = spec_.activation;
    c.version = version_;
    c.owner = owner_;
    c.input.assign(x.begin(), x.end());

    // trunk input: [main | query]
    const int qw = spec_.query_input_width();
    const std::size_t qoff = x.size() - static_cast<std::size_t>(qw);
    c.trunk_in.assign(x.begin(), x.begin() + spec_.input_width);
    c.trunk_in.insert(c.trunk_in.end(), x.begin() + static_cast<std::ptrdiff_t>(qoff), x.end());
    c.trunk.resize(trunk_.size());
    const double* h = c.trunk_in.data();
    for (std::size_t l = 0; l < trunk_.size(); ++l) {
      c.trunk[l].resize(trunk_[l].out);
      trunk_[l].forward(p, h, c.trunk[l].data());
      for (double& v : c.trunk[l]) v = activate(act, v);
      h = c.trunk[l].data();
    }
    const int tw = spec_.trunk_output_width();

    const int kw = spec_.key_width();
    if (spec_.attention) {
      const auto& a = *spec_.attention;
      c.mask.assign(a.slots, 0);
      c.units.resize(unit_.size());
      for (std::size_t l = 0; l < unit_.size(); ++l) c.units[l].assign(static_cast<std::size_t>(a.slots) * unit_[l].out, 0.0);
      for (int s = 0; s < a.slots; ++s) {
        const double* u = x.data() + spec_.input_width + static_cast<std::size_t>(s) * a.unit_width;
        for (int k = 0; k < a.unit_width; ++k)
          if (u[k] != 0.0) c.mask[s] = 1;
        if (!c.mask[s]) continue;
        const double* in = u;
        for (std::size_t l = 0; l < unit_.size(); ++l) {
          double* out = c.units[l].data() + static_cast<std::size_t>(s) * unit_[l].out;
          unit_[l].forward(p, in, out);
          for (int k = 0; k < unit_[l].out; ++k) out[k] = activate(act, out[k]);
          in = out;
        }
      }
      c.query.resize(query_.size());
      const double* qin = x.data() + qoff;
      for (std::size_t l = 0; l < query_.size(); ++l) {
        c.query[l].resize(query_[l].out);
        query_[l].forward(p, qin, c.query[l].data());
        if (l + 1 < query_.size())
          for (double& v : c.query[l]) v = activate(act, v);
        qin = c.query[l].data();
      }
      c.alpha.assign(a.slots, 0.0);
      const auto& keys = c.units.back();
      attention_weights(c.query.back().data(), keys.data(), a.slots, kw, c.mask, c.alpha.data());
      c.attn.assign(kw, 0.0);
      for (int s = 0; s < a.slots; ++s) {
        if (c.alpha[s] == 0.0) continue;
        for (int k = 0; k < kw; ++k) c.attn[k] += c.alpha[s] * keys[static_cast<std::size_t>(s) * kw + k];
      }
    } else {
      c.attn.clear();
    }

    c.features.assign(h, h + tw);
    c.features.insert(c.features.end(), c.attn.begin(), c.attn.end());
    c.heads.resize(heads_.size());
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      c.heads[i].resize(heads_[i].out);
      const double* in = spec_.heads[i].source == HeadSource::trunk ? c.features.data() : c.attn.data();
      heads_[i].forward(p, in, c.heads[i].data());
    }
  }

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(head output)
  /// for each head. An empty entry means the head does not enter the loss.
  void backward(const Cache& c, const std::vector<std::vector<double>>& dheads, std::span<double> grad) const {
    require(c.owner == owner_ && c.version == version_, ErrorKind::cache, "cache does not belong to the current parameters");
    require(dheads.size() == heads_.size(), ErrorKind::shape, "one gradient entry per head required");
    require(grad.size() == params_.size(), ErrorKind::shape, "gradient buffer has the wrong length");
    const double* p = params_.data();
    double* g = grad.data();
    const Activation act = spec_.activation;
    const int tw = spec_.trunk_output_width();
    const int kw = spec_.key_width();

    std::vector<double> dfeat(static_cast<std::size_t>(spec_.feature_width()), 0.0);
    std::vector<double> dattn(static_cast<std::size_t>(kw), 0.0);
    std::vector<double> tmp;
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      if (dheads[i].empty()) continue;
      require(static_cast<int>(dheads[i].size()) == heads_[i].out, ErrorKind::shape, "head gradient width mismatch");
      const bool trunk = spec_.heads[i].source == HeadSource::trunk;
      const double* in = trunk ? c.features.data() : c.attn.data();
      tmp.assign(static_cast<std::size_t>(heads_[i].in), 0.0);
      heads_[i].backward(p, in, dheads[i].data(), g, tmp.data());
      if (trunk)
        for (std::size_t k = 0; k < tmp.size(); ++k) dfeat[k] += tmp[k];
      else
        for (std::size_t k = 0; k < tmp.size(); ++k) dattn[k] += tmp[k];
    }
    for (int k = 0; k < kw; ++k) dattn[k] += dfeat[static_cast<std::size_t>(tw) + k];

    // trunk
    std::vector<double> dh(dfeat.begin(), dfeat.begin() + tw);
    std::vector<double> dtrunk_in;
    for (std::size_t l = trunk_.size(); l-- > 0;) {
      for (int k = 0; k < trunk_[l].out; ++k) dh[k] *= activate_grad(act, c.trunk[l][k]);
      const double* in = l == 0 ? c.trunk_in.data() : c.trunk[l - 1].data();
      tmp.assign(static_cast<std::size_t>(trunk_[l].in), 0.0);
      trunk_[l].backward(p, in, dh.data(), g, l > 0 ? tmp.data() : nullptr);
      dh = tmp;
    }

    if (!spec_.attention) return;
    const auto& a = *spec_.attention;
    const auto& keys = c.units.back();
    const double scale = 1.0 / std::sqrt(static_cast<double>(kw));
    const double* q = c.query.back().data();

    // attn = sum_s alpha_s e_s
    std::vector<double> dkeys(keys.size(), 0.0);
    std::vector<double> dalpha(static_cast<std::size_t>(a.slots), 0.0);
    double weighted = 0.0;
    for (int s = 0; s < a.slots; ++s) {
      if (!c.mask[s]) continue;
      const double* e = keys.data() + static_cast<std::size_t>(s) * kw;
      double acc = 0.0;
      for (int k = 0; k < kw; ++k) acc += dattn[k] * e[k];
      dalpha[s] = acc;
      weighted += c.alpha[s] * acc;
    }
    std::vector<double> dq(static_cast<std::size_t>(kw), 0.0);
    for (int s = 0; s < a.slots; ++s) {
      if (!c.mask[s]) continue;
      const double ds = c.alpha[s] * (dalpha[s] - weighted) * scale;
      const double* e = keys.data() + static_cast<std::size_t>(s) * kw;
      double* de = dkeys.data() + static_cast<std::size_t>(s) * kw;
      for (int k = 0; k < kw; ++k) {
        de[k] += c.alpha[s] * dattn[k] + ds * q[k];
        dq[k] += ds * e[k];
      }
    }

    // unit MLP, per slot
    std::vector<double> du;
    for (int s = 0; s < a.slots; ++s) {
      if (!c.mask[s]) continue;
      du.assign(dkeys.begin() + static_cast<std::ptrdiff_t>(s) * kw, dkeys.begin() + static_cast<std::ptrdiff_t>(s + 1) * kw);
      for (std::size_t l = unit_.size(); l-- > 0;) {
        const double* out = c.units[l].data() + static_cast<std::size_t>(s) * unit_[l].out;
        for (int k = 0; k < unit_[l].out; ++k) du[k] *= activate_grad(act, out[k]);
        const double* in = l == 0 ? c.input.data() + spec_.input_width + static_cast<std::size_t>(s) * a.unit_width
                                  : c.units[l - 1].data() + static_cast<std::size_t>(s) * unit_[l - 1].out;
        tmp.assign(static_cast<std::size_t>(unit_[l].in), 0.0);
        unit_[l].backward(p, in, du.data(), g, l > 0 ? tmp.data() : nullptr);
        du = tmp;
      }
    }

    // query MLP; the trunk also consumed the query input but input gradients are not needed
    std::vector<double> dqv = dq;
    const double* qin0 = c.input.data() + (c.input.size() - static_cast<std::size_t>(a.query_width));
    for (std::size_t l = query_.size(); l-- > 0;) {
      if (l + 1 < query_.size())
        for (int k = 0; k < query_[l].out; ++k) dqv[k] *= activate_grad(act, c.query[l][k]);
      const double* in = l == 0 ? qin0 : c.query[l - 1].data();
      tmp.assign(static_cast<std::size_t>(query_[l].in), 0.0);
      query_[l].backward(p, in, dqv.data(), g, l > 0 ? tmp.data() : nullptr);
      dqv = tmp;
    }
  }

  void set_params(std::span<const double> values) {
    require(values.size() == params_.size(), ErrorKind::shape, "parameter count mismatch");
    ++version_;
    params_.assign(values.begin(), values.end());
  }

  // Layer tables, exposed for tests that re-derive the arithmetic.
  const std::vector<Dense>& trunk_layers() const { return trunk_; }
  const std::vector<Dense>& unit_layers() const { return unit_; }
  const std::vector<Dense>& query_layers() const { return query_; }
  const std::vector<Dense>& head_layers() const { return heads_; }

 private:
  static std::uint64_t next_owner() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
  }

  NetSpec spec_;
  std::vector<Dense> trunk_, unit_, query_, heads_;
  std::vector<double> params_;
  std::uint64_t version_ = 0;
  std::uint64_t owner_ = 0;
};

}  // namespace macrogoal::nn
