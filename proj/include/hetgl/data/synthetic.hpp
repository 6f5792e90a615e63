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
#include <utility>
#include <vector>

#include "hetgl/data/dataset.hpp"

namespace hetgl::data {

struct SyntheticConfig {
  std::size_t n_users = 500;
  std::size_t n_items = 800;
  std::size_t n_ratings = 8000;
  std::size_t n_links = 3000;
  double noise_frac = 0.3;
  std::uint64_t seed = 1;
  std::size_t latent_dim = 8;
  // Every factor coordinate is drawn from N(factor_mean, 1).
  double factor_mean = 0.5;
  // Clean links join users whose latent cosine exceeds this; noise links
  // are drawn uniformly among pairs at or below it.
  double cosine_threshold = 0.5;
  double rating_scale = 0.4;
  double rating_noise = 0.25;
};

struct SyntheticData {
  std::vector<InteractionTriple> ratings;
  std::vector<SocialLink> links;
  std::vector<SocialLink> noise_links;
  std::vector<std::vector<double>> user_factors;
  std::vector<std::vector<double>> item_factors;
};

// Latent-factor world: d-dimensional N(μ,1) factors per user and item;
// rating = clamp(round(3 + scale·(⟨u,v⟩ − dμ²) + noise), 1, 5) on distinct
// uniformly drawn pairs; round(noise_frac·n_links) planted noise links.
// Throws ContractError for non-positive counts or infeasible link counts.
SyntheticData generate_synthetic(const SyntheticConfig& cfg);

// Writes ratings.tsv, links.tsv and manifest.json (config plus the planted
// noise links). Identical config gives byte-identical files.
void write_synthetic(const SyntheticConfig& cfg, const SyntheticData& data,
                     const std::filesystem::path& out_dir);

std::string synthetic_user_id(std::size_t i);
std::string synthetic_item_id(std::size_t j);

// Planted noise links read back from a manifest.json.
std::vector<SocialLink> load_noise_links(const std::filesystem::path& manifest);

}  // namespace hetgl::data
