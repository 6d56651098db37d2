// Copyright 2026 The Scaloforge Authors.
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


#include "scaloforge/nn/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <fstream>
#include <iterator>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  void str(const std::string& s) {
    le(s.size(), 4);
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint64_t le(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string str() {
    const std::size_t n = le(4);
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      fail(ErrorCode::truncation, "checkpoint: expected " + std::to_string(pos_ + n) + " bytes, found " +
                                      std::to_string(in_.size()));
    }
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace

Checkpoint make_checkpoint(std::string model, nlohmann::json config, std::vector<LayerSpec> layers,
                           const std::vector<Parameter>& params) {
  Checkpoint c;
  c.model = std::move(model);
  c.config = std::move(config);
  c.layers = std::move(layers);
  for (const Parameter& p : params) {
    c.param_names.push_back(p.name);
    std::vector<float> v(p.tensor->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(p.tensor->value[i]);
    c.param_values.push_back(std::move(v));
  }
  return c;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  for (char ch : std::string("SCLM")) w.u8(static_cast<std::uint8_t>(ch));
  w.le(kCheckpointVersion, 2);
  w.str(ckpt.model);
  w.str(ckpt.config.dump());
  w.le(ckpt.layers.size(), 4);
  for (const LayerSpec& s : ckpt.layers) {
    w.u8(static_cast<std::uint8_t>(s.kind));
    w.le(s.sizes.size(), 4);
    for (std::uint32_t v : s.sizes) w.le(v, 4);
    w.le(std::bit_cast<std::uint64_t>(s.scalar), 8);
    w.le(s.seed, 8);
  }
  w.le(ckpt.param_names.size(), 4);
  for (std::size_t i = 0; i < ckpt.param_names.size(); ++i) {
    w.str(ckpt.param_names[i]);
    w.le(ckpt.param_values[i].size(), 4);
    for (float v : ckpt.param_values[i]) w.le(std::bit_cast<std::uint32_t>(v), 4);
  }
  const std::uint32_t crc = crc_of(w.bytes());
  w.le(crc, 4);
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !(bytes[0] == 'S' && bytes[1] == 'C' && bytes[2] == 'L' && bytes[3] == 'M')) {
    fail(ErrorCode::format, "checkpoint: bad magic");
  }
  if (bytes.size() < 10) fail(ErrorCode::truncation, "checkpoint: file too short");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(bytes[body + i]) << (8 * i);
  if (stored != crc_of(bytes.first(body))) fail(ErrorCode::integrity, "checkpoint: checksum mismatch");
  Reader r(bytes.first(body));
  r.le(4);
  const auto version = r.le(2);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::unsupported, "checkpoint: version " + std::to_string(version));
  }
  Checkpoint c;
  c.model = r.str();
  c.config = nlohmann::json::parse(r.str());
  const std::size_t layers = r.le(4);
  for (std::size_t i = 0; i < layers; ++i) {
    LayerSpec s;
    s.kind = static_cast<LayerKind>(r.le(1));
    const std::size_t n = r.le(4);
    for (std::size_t k = 0; k < n; ++k) s.sizes.push_back(static_cast<std::uint32_t>(r.le(4)));
    s.scalar = std::bit_cast<double>(r.le(8));
    s.seed = r.le(8);
    c.layers.push_back(std::move(s));
  }
  const std::size_t params = r.le(4);
  for (std::size_t i = 0; i < params; ++i) {
    c.param_names.push_back(r.str());
    const std::size_t n = r.le(4);
    r.need(4 * n);
    std::vector<float> v(n);
    for (float& x : v) x = std::bit_cast<float>(static_cast<std::uint32_t>(r.le(4)));
    c.param_values.push_back(std::move(v));
  }
  if (r.pos() != body) fail(ErrorCode::format, "checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

void restore_parameters(const Checkpoint& ckpt, const std::vector<LayerSpec>& layers,
                        const std::vector<Parameter>& params) {
  if (ckpt.layers != layers) fail(ErrorCode::schema, "checkpoint: layer specs do not match the model");
  if (ckpt.param_names.size() != params.size()) fail(ErrorCode::schema, "checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (ckpt.param_names[i] != params[i].name || ckpt.param_values[i].size() != params[i].tensor->size()) {
      fail(ErrorCode::schema, "checkpoint: parameter " + ckpt.param_names[i] + " does not match " + params[i].name);
    }
    for (std::size_t k = 0; k < params[i].tensor->size(); ++k) {
      params[i].tensor->value[k] = ckpt.param_values[i][k];
    }
  }
}

Checkpoint checkpoint_of(SceneClassifier& clf) {
  return make_checkpoint("scene_classifier", to_json(clf.config()), clf.layer_specs(), clf.parameters());
}

std::unique_ptr<SceneClassifier> classifier_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.model != "scene_classifier") fail(ErrorCode::schema, "checkpoint holds a " + ckpt.model);
  auto clf = std::make_unique<SceneClassifier>(classifier_config_from_json(ckpt.config));
  restore_parameters(ckpt, clf->layer_specs(), clf->parameters());
  return clf;
}

Checkpoint checkpoint_of(Generator& gen) {
  return make_checkpoint("generator", to_json(gen.config()), gen.layer_specs(), gen.parameters());
}

std::unique_ptr<Generator> generator_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.model != "generator") fail(ErrorCode::schema, "checkpoint holds a " + ckpt.model);
  auto gen = std::make_unique<Generator>(generator_config_from_json(ckpt.config));
  restore_parameters(ckpt, gen->layer_specs(), gen->parameters());
  return gen;
}

}  // namespace scaloforge::nn
