// Copyright 2026 The gestures Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Checkpoint file, little-endian:
//
//   "GSTM0001"
//   u32 config_length, config_length bytes of JSON (config echo)
//   u32 tensor_count
//   tensor_count x { u32 name_length, name bytes, u32 rank, rank x u32 dim,
//                    prod(dims) x f64 row-major payload }

#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "gestures/error.hpp"
#include "gestures/io.hpp"
#include "gestures/nn/adamw.hpp"
#include "gestures/nn/tensor.hpp"

namespace gestures::nn {

inline constexpr char kCheckpointMagic[8] = {'G', 'S', 'T', 'M', '0', '0', '0', '1'};

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Trained parameters plus whatever metadata the producer echoes (config,
/// chosen epoch, optimizer step).
struct ModelBundle {
  nlohmann::json config = nlohmann::json::object();
  std::vector<NamedTensor> tensors;

  void add(const TensorView& view, const std::string& prefix = {}) {
    tensors.push_back({prefix + view.name, view.shape, {view.values.begin(), view.values.end()}});
  }

  const NamedTensor* find(const std::string& name) const {
    auto it = std::find_if(tensors.begin(), tensors.end(), [&](const auto& t) { return t.name == name; });
    return it == tensors.end() ? nullptr : &*it;
  }

  /// Copies a stored tensor into `view`; shapes must agree.
  void restore(const TensorView& view, const std::string& prefix = {}) const {
    const auto* t = find(prefix + view.name);
    if (!t) throw DataError("checkpoint has no tensor '" + prefix + view.name + "'");
    if (t->shape != view.shape) throw DataError("checkpoint tensor '" + t->name + "' has the wrong shape");
    std::copy(t->values.begin(), t->values.end(), view.values.begin());
  }

  /// Stores optimizer moments as "adamw.m/<name>" and "adamw.v/<name>".
  void add_optimizer_state(const AdamWState& state, std::span<const TensorView> params) {
    config["adamw_step"] = state.step;
    for (const auto& p : params) {
      auto it = state.moments.find(p.name);
      if (it == state.moments.end()) continue;
      tensors.push_back({"adamw.m/" + p.name, p.shape, it->second.first});
      tensors.push_back({"adamw.v/" + p.name, p.shape, it->second.second});
    }
  }

  AdamWState optimizer_state() const {
    AdamWState state;
    state.step = config.value("adamw_step", std::uint64_t{0});
    for (const auto& t : tensors) {
      if (t.name.rfind("adamw.m/", 0) == 0) state.moments[t.name.substr(8)].first = t.values;
      if (t.name.rfind("adamw.v/", 0) == 0) state.moments[t.name.substr(8)].second = t.values;
    }
    return state;
  }
};

inline void write_checkpoint(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot create checkpoint");
  out.write(kCheckpointMagic, 8);
  const std::string config = bundle.config.dump();
  gestures::detail::write_pod(out, static_cast<std::uint32_t>(config.size()));
  out.write(config.data(), static_cast<std::streamsize>(config.size()));
  gestures::detail::write_pod(out, static_cast<std::uint32_t>(bundle.tensors.size()));
  for (const auto& t : bundle.tensors) {
    const std::size_t count = std::accumulate(t.shape.begin(), t.shape.end(), std::size_t{1}, std::multiplies<>());
    if (count != t.values.size()) throw ShapeError("tensor '" + t.name + "' payload does not match its shape");
    gestures::detail::write_pod(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    gestures::detail::write_pod(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) gestures::detail::write_pod(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  }
  if (!out) throw IoError(path, "write failed");
}

inline ModelBundle read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open checkpoint");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) throw IoError(path, "bad checkpoint magic");
  using gestures::detail::read_pod;
  ModelBundle bundle;
  const auto config_length = read_pod<std::uint32_t>(in, path);
  std::string config(config_length, '\0');
  in.read(config.data(), config_length);
  if (!in) throw IoError(path, "truncated config");
  try {
    bundle.config = nlohmann::json::parse(config);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("bad config echo: ") + e.what());
  }
  const auto count = read_pod<std::uint32_t>(in, path);
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    const auto name_length = read_pod<std::uint32_t>(in, path);
    t.name.resize(name_length);
    in.read(t.name.data(), name_length);
    const auto rank = read_pod<std::uint32_t>(in, path);
    std::size_t size = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.shape.push_back(read_pod<std::uint32_t>(in, path));
      size *= t.shape.back();
    }
    t.values.resize(size);
    in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(size * sizeof(double)));
    if (!in) throw IoError(path, "truncated tensor '" + t.name + "'");
    bundle.tensors.push_back(std::move(t));
  }
  return bundle;
}

}  // namespace gestures::nn
