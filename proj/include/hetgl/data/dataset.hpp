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
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hetgl/graph/hetero_graph.hpp"

namespace hetgl::data {

struct InteractionTriple {
  std::string user;
  std::string item;
  double rating = 0.0;

  bool operator==(const InteractionTriple&) const = default;
};

struct SocialLink {
  std::string a;
  std::string b;

  bool operator==(const SocialLink&) const = default;
};

struct LinkFile {
  std::vector<SocialLink> links;
  std::size_t dropped_self_links = 0;
};

// `user<TAB>item<TAB>rating` per line; `#` comments and blank lines are
// skipped; LF or CRLF. Throws ParseError naming path and line.
std::vector<InteractionTriple> load_ratings(const std::filesystem::path& path);

// `user<TAB>user` per line. Self-links are dropped and counted.
LinkFile load_links(const std::filesystem::path& path);

void write_ratings(const std::filesystem::path& path,
                   const std::vector<InteractionTriple>& triples);
void write_links(const std::filesystem::path& path,
                 const std::vector<SocialLink>& links);

struct SplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;
};

struct Splits {
  std::vector<InteractionTriple> train;
  std::vector<InteractionTriple> valid;
  std::vector<InteractionTriple> test;
};

// Seeded uniform shuffle, then contiguous slices of floor(train·n),
// floor(valid·n) and the remainder. Throws ContractError unless the ratios
// are nonnegative and sum to 1.
Splits split(std::vector<InteractionTriple> triples, SplitRatios ratios,
             std::uint64_t seed);

// Keeps the last rating of every repeated (user, item) pair, in the
// position of that last occurrence.
std::vector<InteractionTriple> dedupe_last(
    const std::vector<InteractionTriple>& triples);

// Dense 0-based ids for raw string ids, in first-seen order.
class IdMap {
 public:
  std::size_t intern(const std::string& raw);
  std::optional<std::size_t> find(const std::string& raw) const;
  const std::string& raw(std::size_t index) const { return names_.at(index); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Rating {
  std::size_t user = 0;
  std::size_t item = 0;
  double value = 0.0;
};

struct DatasetBundle {
  IdMap users;
  IdMap items;
  std::vector<Rating> train;
  std::vector<Rating> valid;
  std::vector<Rating> test;
  std::vector<std::pair<std::size_t, std::size_t>> links;
  RatingScale scale;
  std::vector<bool> user_in_train;
  std::vector<bool> item_in_train;
  std::size_t dropped_self_links = 0;

  // Ratings whose user or item never appears in the training split.
  std::size_t count_cold(const std::vector<Rating>& part) const;
  double train_mean() const;
};

// Dedupes, splits and re-indexes. Id maps cover every id seen in any split
// or link, so cold test entities keep a (never trained) embedding row.
DatasetBundle make_bundle(const std::vector<InteractionTriple>& triples,
                          const LinkFile& links, SplitRatios ratios,
                          std::uint64_t seed);

DatasetBundle load_bundle(const std::filesystem::path& ratings_path,
                          const std::filesystem::path& links_path,
                          SplitRatios ratios, std::uint64_t seed);

}  // namespace hetgl::data
