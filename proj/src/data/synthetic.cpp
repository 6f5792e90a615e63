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

#include "hetgl/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

#include "hetgl/errors.hpp"

namespace hetgl::data {
namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace

std::string synthetic_user_id(std::size_t i) { return "u" + std::to_string(i); }
std::string synthetic_item_id(std::size_t j) { return "i" + std::to_string(j); }

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_users < 2 || cfg.n_items < 1 || cfg.n_ratings < 1 ||
      cfg.latent_dim < 1) {
    throw ContractError("synthetic: counts must be positive (users >= 2)");
  }
  if (cfg.n_ratings > cfg.n_users * cfg.n_items) {
    throw ContractError("synthetic: more ratings than user-item pairs");
  }
  if (cfg.noise_frac < 0 || cfg.noise_frac > 1) {
    throw ContractError("synthetic: noise_frac must lie in [0,1]");
  }
  const std::size_t max_pairs = cfg.n_users * (cfg.n_users - 1) / 2;
  if (cfg.n_links > max_pairs / 2) {
    throw ContractError("synthetic: too many links for the user count");
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticData out;
  auto factors = [&](std::size_t n) {
    std::vector<std::vector<double>> f(n, std::vector<double>(cfg.latent_dim));
    for (auto& row : f)
      for (double& v : row) v = cfg.factor_mean + normal(rng);
    return f;
  };
  out.user_factors = factors(cfg.n_users);
  out.item_factors = factors(cfg.n_items);

  std::uniform_int_distribution<std::size_t> pick_user(0, cfg.n_users - 1);
  std::uniform_int_distribution<std::size_t> pick_item(0, cfg.n_items - 1);
  std::set<std::pair<std::size_t, std::size_t>> rated;
  const double centre =
      static_cast<double>(cfg.latent_dim) * cfg.factor_mean * cfg.factor_mean;
  while (out.ratings.size() < cfg.n_ratings) {
    const std::size_t u = pick_user(rng), v = pick_item(rng);
    if (!rated.emplace(u, v).second) continue;
    double dot = -centre;
    for (std::size_t d = 0; d < cfg.latent_dim; ++d)
      dot += out.user_factors[u][d] * out.item_factors[v][d];
    const double raw = 3.0 + cfg.rating_scale * dot + cfg.rating_noise * normal(rng);
    const double r = std::clamp(std::round(raw), 1.0, 5.0);
    out.ratings.push_back({synthetic_user_id(u), synthetic_item_id(v), r});
  }

  const auto n_noise = static_cast<std::size_t>(
      std::llround(cfg.noise_frac * static_cast<double>(cfg.n_links)));
  const std::size_t n_clean = cfg.n_links - n_noise;
  std::set<std::pair<std::size_t, std::size_t>> linked;
  std::vector<std::pair<std::size_t, std::size_t>> clean, noise;
  const std::size_t budget = 2000 * (cfg.n_links + 1);
  std::size_t attempts = 0;
  auto draw = [&](bool want_similar) {
    while (true) {
      if (++attempts > budget) {
        throw ContractError("synthetic: could not place links under the cosine threshold rule");
      }
      std::size_t a = pick_user(rng), b = pick_user(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const bool similar =
          cosine(out.user_factors[a], out.user_factors[b]) > cfg.cosine_threshold;
      if (similar != want_similar) continue;
      if (!linked.emplace(a, b).second) continue;
      return std::make_pair(a, b);
    }
  };
  for (std::size_t i = 0; i < n_clean; ++i) clean.push_back(draw(true));
  for (std::size_t i = 0; i < n_noise; ++i) noise.push_back(draw(false));

  std::vector<std::pair<std::size_t, std::size_t>> all = clean;
  all.insert(all.end(), noise.begin(), noise.end());
  std::shuffle(all.begin(), all.end(), rng);
  for (const auto& [a, b] : all)
    out.links.push_back({synthetic_user_id(a), synthetic_user_id(b)});
  for (const auto& [a, b] : noise)
    out.noise_links.push_back({synthetic_user_id(a), synthetic_user_id(b)});
  return out;
}

void write_synthetic(const SyntheticConfig& cfg, const SyntheticData& data,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_ratings(out_dir / "ratings.tsv", data.ratings);
  write_links(out_dir / "links.tsv", data.links);

  nlohmann::json m;
  m["format"] = "hetgl-synthetic-v1";
  m["seed"] = cfg.seed;
  m["n_users"] = cfg.n_users;
  m["n_items"] = cfg.n_items;
  m["n_ratings"] = cfg.n_ratings;
  m["n_links"] = cfg.n_links;
  m["noise_frac"] = cfg.noise_frac;
  m["latent_dim"] = cfg.latent_dim;
  m["factor_mean"] = cfg.factor_mean;
  m["rating_scale"] = cfg.rating_scale;
  m["rating_noise"] = cfg.rating_noise;
  m["cosine_threshold"] = cfg.cosine_threshold;
  m["n_noise_links"] = data.noise_links.size();
  auto& arr = m["noise_links"] = nlohmann::json::array();
  for (const auto& l : data.noise_links) arr.push_back({l.a, l.b});
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw ParseError((out_dir / "manifest.json").string() + ": cannot write file");
  out << m.dump(2) << '\n';
}

std::vector<SocialLink> load_noise_links(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ParseError(manifest.string() + ": cannot open file");
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  std::vector<SocialLink> out;
  for (const auto& pair : m.at("noise_links"))
    out.push_back({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
  return out;
}

}  // namespace hetgl::data
