// Copyright 2026 The hetgl Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hetgl/app/config.hpp"
#include "hetgl/engine/optim.hpp"

namespace hetgl::app {

inline constexpr char kCheckpointMagic[8] = {'H', 'E', 'T', 'G', 'L', 'C', 'K', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointManifest {
  TrainConfig config;
  std::string ratings_path;
  std::string links_path;
  std::vector<double> scale;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t best_epoch = 0;
};

nlohmann::json to_json(const CheckpointManifest& m);
CheckpointManifest manifest_from_json(const nlohmann::json& j);

struct Checkpoint {
  CheckpointManifest manifest;
  std::vector<std::pair<std::string, Tensor>> params;
};

// Layout, all integers and doubles little-endian:
//   magic[8] u32 version u64 n + manifest JSON bytes
//   u64 count, then per parameter: u32 n + name, u64 rows, u64 cols, f64[rows·cols]
void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointManifest& manifest, const ParamStore& params);

// Throws ParseError on a bad magic, unknown version or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies values by name. Throws ContractError on a missing or extra name,
// ShapeError on a shape mismatch.
void apply_checkpoint(const Checkpoint& ckpt, ParamStore& params);

}  // namespace hetgl::app
