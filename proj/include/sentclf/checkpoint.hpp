// Copyright 2026 The sentclf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/model.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

/// Self-describing model container.
///
/// Layout (all integers little-endian):
///
///   "SCLFCKPT" u32 version
///   u32 #meta    { str key, str value }          (sorted by key)
///   u32 #lists   { str name, u32 n, str * n }     (sorted by name)
///   u32 #tensors { str name, u32 rank, u64 * rank extents, f64 * size }
///
/// where str is u32 length followed by raw bytes. Metadata always holds
/// "arch" and "dropout" (hex float); tensors appear in parameter visit order.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::map<std::string, std::vector<std::string>> lists;
  ModelParams params;
  std::vector<std::pair<std::string, Tensor>> extra;  // auxiliary tensors
};

namespace detail {

constexpr std::string_view kCheckpointMagic = "SCLFCKPT";
constexpr std::uint32_t kCheckpointVersion = 1;

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  void tensor(const std::string& name, const Tensor& t) {
    str(name);
    u32(static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) u64(e);
    for (double x : t.data()) f64(x);
  }
  std::string bytes;

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
};

class ByteReader {
 public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  double f64() { return std::bit_cast<double>(get_le(8)); }
  std::string str() {
    const std::size_t n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::pair<std::string, Tensor> tensor() {
    std::string name = str();
    const std::uint32_t rank = u32();
    if (rank < 1 || rank > 3) throw DataError("checkpoint tensor '" + name + "' has bad rank");
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (auto& e : shape) {
      e = static_cast<std::size_t>(u64());
      if (e == 0 || e > (std::size_t{1} << 40)) {
        throw DataError("checkpoint tensor '" + name + "' has bad extent");
      }
      count *= e;
    }
    need(count * 8);
    std::vector<double> values(count);
    for (double& v : values) v = f64();
    return {std::move(name), Tensor(std::move(shape), std::move(values))};
  }
  bool at_end() const { return pos_ == data_.size(); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto v = std::string_view(data_).substr(pos_, n);
    pos_ += n;
    return v;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw DataError("checkpoint truncated");
  }
  std::uint64_t get_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string data_;
  std::size_t pos_ = 0;
};

inline std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double model_dropout(const ModelParams& p) {
  return std::visit(
      [](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, FnnParams>) {
          return 0.0;
        } else {
          return m.dropout;
        }
      },
      p);
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ckpt) {
  detail::ByteWriter w;
  w.bytes.append(detail::kCheckpointMagic);
  w.u32(detail::kCheckpointVersion);
  auto meta = ckpt.meta;
  meta["arch"] = std::string(arch_name(arch_of(ckpt.params)));
  meta["dropout"] = detail::hex_double(detail::model_dropout(ckpt.params));
  w.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.lists.size()));
  for (const auto& [name, items] : ckpt.lists) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(items.size()));
    for (const auto& s : items) w.str(s);
  }
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  visit_tensors(ckpt.params, [&](const std::string& n, const Tensor& t) {
    tensors.emplace_back(n, &t);
  });
  for (const auto& [n, t] : ckpt.extra) tensors.emplace_back("extra." + n, &t);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [n, t] : tensors) w.tensor(n, *t);
  return std::move(w.bytes);
}

inline Checkpoint deserialize_checkpoint(std::string bytes) {
  detail::ByteReader r(std::move(bytes));
  if (r.raw(detail::kCheckpointMagic.size()) != detail::kCheckpointMagic) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  if (r.u32() != detail::kCheckpointVersion) throw DataError("unsupported checkpoint version");
  Checkpoint ckpt;
  for (std::uint32_t n = r.u32(); n-- > 0;) {
    std::string k = r.str();
    ckpt.meta[k] = r.str();
  }
  for (std::uint32_t n = r.u32(); n-- > 0;) {
    std::string name = r.str();
    auto& items = ckpt.lists[name];
    for (std::uint32_t m = r.u32(); m-- > 0;) items.push_back(r.str());
  }
  std::map<std::string, Tensor> tensors;
  std::size_t model_tensors = 0;
  for (std::uint32_t n = r.u32(); n-- > 0;) {
    auto [name, t] = r.tensor();
    if (name.starts_with("extra.")) {
      ckpt.extra.emplace_back(name.substr(6), std::move(t));
    } else {
      ++model_tensors;
      tensors.emplace(std::move(name), std::move(t));
    }
  }
  if (!r.at_end()) throw DataError("trailing bytes after checkpoint");
  if (!ckpt.meta.contains("arch")) throw DataError("checkpoint lacks arch tag");
  const Arch arch = parse_arch(ckpt.meta.at("arch"));
  double dropout = 0.0;
  if (auto it = ckpt.meta.find("dropout"); it != ckpt.meta.end()) {
    dropout = std::strtod(it->second.c_str(), nullptr);
  }
  switch (arch) {
    case Arch::kFnn: {
      FnnParams p;
      p.weights.resize(model_tensors / 2);
      p.biases.resize(model_tensors / 2);
      ckpt.params = std::move(p);
      break;
    }
    case Arch::kCnn: ckpt.params = CnnParams{}; break;
    case Arch::kRnn: ckpt.params = RnnParams{}; break;
    case Arch::kLstm: ckpt.params = LstmParams{}; break;
  }
  std::size_t used = 0;
  visit_tensors(ckpt.params, [&](const std::string& name, Tensor& t) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw DataError("checkpoint is missing tensor '" + name + "'");
    t = std::move(it->second);
    ++used;
  });
  if (used != model_tensors) throw DataError("checkpoint has unexpected model tensors");
  std::visit(
      [&](auto& m) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, FnnParams>) m.dropout = dropout;
      },
      ckpt.params);
  try {
    validate(ckpt.params);
  } catch (const Error& e) {
    throw DataError(std::string("inconsistent checkpoint: ") + e.what());
  }
  return ckpt;
}

inline void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  const std::string bytes = serialize_checkpoint(ckpt);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw DataError("cannot write checkpoint " + path.string());
  }
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(std::move(bytes));
}

}  // namespace sentclf
