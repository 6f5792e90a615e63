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

#include "hetgl/app/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>

#include "hetgl/errors.hpp"

namespace hetgl::app {
namespace {

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

void put_bytes(std::ostream& os, const std::string& s) {
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  void read(void* dst, std::size_t n) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail("truncated file");
  }
  template <typename U>
  U le() {
    unsigned char b[sizeof(U)];
    read(b, sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string bytes(std::uint64_t n) {
    if (n > (1ull << 32)) fail("implausible length");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path_ + ": " + msg);
  }

 private:
  std::istream& is_;
  std::string path_;
};

}  // namespace

nlohmann::json to_json(const CheckpointManifest& m) {
  return {{"config", to_json(m.config)},
          {"ratings_path", m.ratings_path},
          {"links_path", m.links_path},
          {"scale", m.scale},
          {"n_users", m.n_users},
          {"n_items", m.n_items},
          {"best_epoch", m.best_epoch}};
}

CheckpointManifest manifest_from_json(const nlohmann::json& j) {
  CheckpointManifest m;
  m.config = config_from_json(j.at("config"));
  j.at("ratings_path").get_to(m.ratings_path);
  j.at("links_path").get_to(m.links_path);
  j.at("scale").get_to(m.scale);
  j.at("n_users").get_to(m.n_users);
  j.at("n_items").get_to(m.n_items);
  j.at("best_epoch").get_to(m.best_epoch);
  return m;
}

void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointManifest& manifest, const ParamStore& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ParseError(path.string() + ": cannot open for writing");
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_le<std::uint32_t>(os, kCheckpointVersion);
  const std::string meta = to_json(manifest).dump();
  put_le<std::uint64_t>(os, meta.size());
  put_bytes(os, meta);
  put_le<std::uint64_t>(os, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.name.size()));
    put_bytes(os, p.name);
    put_le<std::uint64_t>(os, p.value.rows());
    put_le<std::uint64_t>(os, p.value.cols());
    for (double v : p.value.data()) put_f64(os, v);
  }
  if (!os) throw ParseError(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(path.string() + ": cannot open");
  Reader r(is, path.string());
  char magic[8];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) r.fail("not a checkpoint");
  const auto version = r.le<std::uint32_t>();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));
  Checkpoint ck;
  try {
    ck.manifest = manifest_from_json(nlohmann::json::parse(r.bytes(r.le<std::uint64_t>())));
  } catch (const nlohmann::json::exception& e) {
    r.fail(std::string("bad manifest: ") + e.what());
  }
  const auto count = r.le<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.bytes(r.le<std::uint32_t>());
    const auto rows = r.le<std::uint64_t>();
    const auto cols = r.le<std::uint64_t>();
    if (rows * cols > (1ull << 31)) r.fail("implausible shape for " + name);
    Tensor t(rows, cols);
    for (double& v : t.data()) v = r.f64();
    ck.params.emplace_back(std::move(name), std::move(t));
  }
  if (is.peek() != std::char_traits<char>::eof()) r.fail("trailing bytes");
  return ck;
}

void apply_checkpoint(const Checkpoint& ckpt, ParamStore& params) {
  std::set<std::string> seen;
  for (const auto& [name, value] : ckpt.params) {
    if (!params.contains(name)) throw ContractError("checkpoint: unexpected parameter " + name);
    Parameter& p = params.get(name);
    if (!p.value.same_shape(value)) {
      throw ShapeError("checkpoint: " + name + " is " + value.shape_string() +
                       ", model expects " + p.value.shape_string());
    }
    seen.insert(name);
  }
  if (seen.size() != params.size()) throw ContractError("checkpoint: missing parameters");
  for (const auto& [name, value] : ckpt.params) params.get(name).value = value;
}

}  // namespace hetgl::app
