/**
 * Copyright 2026 The ttaforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ttaforge/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ttaforge/error.hpp"

namespace ttaforge {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string("container truncated while reading ") + what + " at byte " + std::to_string(pos_));
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Matrix& TensorContainer::at(const std::string& tag) const {
  for (const auto& s : sections) {
    if (s.tag == tag) return s.values;
  }
  throw FormatError("container has no section '" + tag + "'");
}

void round_to_float(Matrix& m) {
  for (double& v : m.values()) v = static_cast<double>(static_cast<float>(v));
}

std::vector<std::uint8_t> encode_container(const TensorContainer& container) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kContainerMagic), std::end(kContainerMagic));
  put_le<std::uint16_t>(out, container.version);
  put_le<std::uint64_t>(out, container.seed);
  for (const auto& s : container.sections) {
    if (s.tag.empty() || s.tag.size() > 255) throw FormatError("container tag length out of range");
    out.push_back(static_cast<std::uint8_t>(s.tag.size()));
    out.insert(out.end(), s.tag.begin(), s.tag.end());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.values.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.values.cols()));
    for (double v : s.values.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

TensorContainer decode_container(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.get_string(8, "magic") != std::string(kContainerMagic, 8)) throw FormatError("container: bad magic");
  TensorContainer c;
  c.version = in.get_le<std::uint16_t>("version");
  if (c.version != kContainerVersion) throw FormatError("container: unsupported version " + std::to_string(c.version));
  c.seed = in.get_le<std::uint64_t>("seed");
  while (!in.done()) {
    const auto len = in.get_le<std::uint8_t>("tag length");
    if (len == 0) throw FormatError("container: empty tag at byte " + std::to_string(in.pos()));
    TensorSection s;
    s.tag = in.get_string(len, "tag");
    const auto rows = in.get_le<std::uint32_t>("rows");
    const auto cols = in.get_le<std::uint32_t>("cols");
    s.values = Matrix(rows, cols);
    for (double& v : s.values.values()) v = std::bit_cast<float>(in.get_le<std::uint32_t>("values"));
    c.sections.push_back(std::move(s));
  }
  return c;
}

void write_container(const std::filesystem::path& path, const TensorContainer& container) {
  const auto bytes = encode_container(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

TensorContainer read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_container(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace ttaforge
