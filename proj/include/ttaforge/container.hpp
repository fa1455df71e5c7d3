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
#pragma once

// Binary tensor container shared by detector weights and prompt checkpoints.
//
//   header   : "TTAFORGE" (8 bytes) | version u16 | seed u64
//   section* : tag_len u8 | tag bytes | rows u32 | cols u32 | rows*cols f32
//
// All integers and floats are little-endian; matrices are row-major and
// appear in declaration order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ttaforge/tensor.hpp"

namespace ttaforge {

inline constexpr char kContainerMagic[8] = {'T', 'T', 'A', 'F', 'O', 'R', 'G', 'E'};
inline constexpr std::uint16_t kContainerVersion = 1;

struct TensorSection {
  std::string tag;
  Matrix values;
};

struct TensorContainer {
  std::uint16_t version = kContainerVersion;
  std::uint64_t seed = 0;
  std::vector<TensorSection> sections;

  /// Section by tag; throws FormatError when absent.
  const Matrix& at(const std::string& tag) const;
};

std::vector<std::uint8_t> encode_container(const TensorContainer& container);
TensorContainer decode_container(const std::vector<std::uint8_t>& bytes);

void write_container(const std::filesystem::path& path, const TensorContainer& container);
TensorContainer read_container(const std::filesystem::path& path);

/// Rounds every entry to the nearest float so the container round-trips exactly.
void round_to_float(Matrix& m);

}  // namespace ttaforge
