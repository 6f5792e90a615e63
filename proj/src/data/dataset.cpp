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

#include "hetgl/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "hetgl/errors.hpp"

namespace hetgl::data {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Calls fn(fields, line_number) for every data line.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos || view[first] == '#') continue;
    fn(split_tabs(view), lineno);
  }
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t lineno,
                       const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
}

std::string format_rating(double r) {
  std::ostringstream os;
  os.precision(17);
  os << r;
  return os.str();
}

}  // namespace

std::vector<InteractionTriple> load_ratings(const std::filesystem::path& path) {
  std::vector<InteractionTriple> out;
  for_each_record(path, [&](const std::vector<std::string_view>& f,
                            std::size_t lineno) {
    if (f.size() != 3) {
      fail(path, lineno, "expected 3 tab-separated fields, got " +
                             std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) fail(path, lineno, "empty id");
    double r = 0.0;
    const auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r);
    if (res.ec != std::errc() || res.ptr != f[2].data() + f[2].size() ||
        !std::isfinite(r)) {
      fail(path, lineno, "non-numeric rating '" + std::string(f[2]) + "'");
    }
    out.push_back({std::string(f[0]), std::string(f[1]), r});
  });
  return out;
}

LinkFile load_links(const std::filesystem::path& path) {
  LinkFile out;
  for_each_record(path, [&](const std::vector<std::string_view>& f,
                            std::size_t lineno) {
    if (f.size() != 2) {
      fail(path, lineno, "expected 2 tab-separated fields, got " +
                             std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) fail(path, lineno, "empty id");
    if (f[0] == f[1]) {
      ++out.dropped_self_links;
      return;
    }
    out.links.push_back({std::string(f[0]), std::string(f[1])});
  });
  return out;
}

void write_ratings(const std::filesystem::path& path,
                   const std::vector<InteractionTriple>& triples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot write file");
  for (const auto& t : triples)
    out << t.user << '\t' << t.item << '\t' << format_rating(t.rating) << '\n';
}

void write_links(const std::filesystem::path& path,
                 const std::vector<SocialLink>& links) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot write file");
  for (const auto& l : links) out << l.a << '\t' << l.b << '\n';
}

Splits split(std::vector<InteractionTriple> triples, SplitRatios ratios,
             std::uint64_t seed) {
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw ContractError("split ratios must be nonnegative and sum to 1");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(triples.begin(), triples.end(), rng);
  const double n = static_cast<double>(triples.size());
  const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 1e-9));
  const auto n_valid = static_cast<std::size_t>(std::floor(ratios.valid * n + 1e-9));
  Splits s;
  auto it = triples.begin();
  s.train.assign(it, it + n_train);
  s.valid.assign(it + n_train, it + n_train + n_valid);
  s.test.assign(it + n_train + n_valid, triples.end());
  return s;
}

std::vector<InteractionTriple> dedupe_last(
    const std::vector<InteractionTriple>& triples) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<InteractionTriple> out;
  for (auto it = triples.rbegin(); it != triples.rend(); ++it) {
    if (seen.emplace(it->user, it->item).second) out.push_back(*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::size_t IdMap::intern(const std::string& raw) {
  auto [it, inserted] = index_.try_emplace(raw, names_.size());
  if (inserted) names_.push_back(raw);
  return it->second;
}

std::optional<std::size_t> IdMap::find(const std::string& raw) const {
  auto it = index_.find(raw);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t DatasetBundle::count_cold(const std::vector<Rating>& part) const {
  std::size_t n = 0;
  for (const auto& r : part)
    if (!user_in_train[r.user] || !item_in_train[r.item]) ++n;
  return n;
}

double DatasetBundle::train_mean() const {
  if (train.empty()) throw ContractError("empty training split");
  double s = 0.0;
  for (const auto& r : train) s += r.value;
  return s / static_cast<double>(train.size());
}

DatasetBundle make_bundle(const std::vector<InteractionTriple>& triples,
                          const LinkFile& links, SplitRatios ratios,
                          std::uint64_t seed) {
  const auto unique = dedupe_last(triples);
  Splits parts = split(unique, ratios, seed);
  if (parts.train.empty()) throw ContractError("training split is empty");

  DatasetBundle b;
  for (const auto& t : unique) {
    b.users.intern(t.user);
    b.items.intern(t.item);
  }
  for (const auto& l : links.links) {
    b.users.intern(l.a);
    b.users.intern(l.b);
  }
  auto convert = [&b](const std::vector<InteractionTriple>& in) {
    std::vector<Rating> out;
    out.reserve(in.size());
    for (const auto& t : in)
      out.push_back({*b.users.find(t.user), *b.items.find(t.item), t.rating});
    return out;
  };
  b.train = convert(parts.train);
  b.valid = convert(parts.valid);
  b.test = convert(parts.test);

  std::vector<double> levels;
  for (const auto& r : b.train) levels.push_back(r.value);
  b.scale = RatingScale(std::move(levels));

  b.user_in_train.assign(b.users.size(), false);
  b.item_in_train.assign(b.items.size(), false);
  for (const auto& r : b.train) {
    b.user_in_train[r.user] = true;
    b.item_in_train[r.item] = true;
  }
  for (const auto& l : links.links)
    b.links.emplace_back(*b.users.find(l.a), *b.users.find(l.b));
  b.dropped_self_links = links.dropped_self_links;
  return b;
}

DatasetBundle load_bundle(const std::filesystem::path& ratings_path,
                          const std::filesystem::path& links_path,
                          SplitRatios ratios, std::uint64_t seed) {
  return make_bundle(load_ratings(ratings_path), load_links(links_path), ratios,
                     seed);
}

}  // namespace hetgl::data
