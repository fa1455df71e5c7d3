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

// Instance dynamic memory: one bounded queue of high-confidence instances
// per category. Queues start empty and, once full, only accept an instance
// that scores strictly above the current minimum, which it then replaces.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "ttaforge/backend.hpp"
#include "ttaforge/core.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

struct MemoryTriplet {
  Image crop;
  std::vector<double> feat;
  double score = 0.0;
  int category = 0;
  std::int64_t source_step = 0;
};

class DynamicQueue {
 public:
  explicit DynamicQueue(std::size_t capacity = 20) : capacity_(capacity) {}

  /// Appends while below capacity; otherwise replaces the lowest-scoring
  /// entry (the oldest one among equal minima) if `triplet` scores strictly
  /// higher. Returns whether the queue changed.
  bool insert(MemoryTriplet triplet);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }
  /// Lowest stored score; only meaningful when non-empty.
  double min_score() const;
  const std::vector<MemoryTriplet>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::vector<MemoryTriplet> items_;
};

using Prototypes = std::map<int, std::vector<double>>;

struct HarvestResult {
  std::vector<MemoryTriplet> inserted;
  std::size_t offered = 0;
  std::size_t skipped_degenerate = 0;
};

class InstanceMemory {
 public:
  InstanceMemory(std::size_t num_categories, std::size_t capacity);

  std::size_t num_categories() const { return queues_.size(); }
  std::size_t capacity() const { return capacity_; }
  const DynamicQueue& queue(std::size_t category) const { return queues_.at(category); }
  bool insert(MemoryTriplet triplet);
  /// Total stored triplets across all queues.
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<std::size_t> occupancy() const;

  /// Crops, embeds and inserts every label scoring above `threshold`.
  /// Scores are clamped to [0, 1] on entry. Degenerate crops are counted
  /// and skipped.
  HarvestResult harvest(const Image& image, std::span<const Detection> labels, const FeatureEmbedder& embedder,
                        double threshold, std::int64_t source_step);

  /// L2-normalised mean feature per non-empty category. Categories whose
  /// mean vanishes are omitted.
  Prototypes prototypes() const;

  /// `k` triplets drawn uniformly with replacement from all stored
  /// triplets; empty when the memory is empty.
  std::vector<MemoryTriplet> sample(std::size_t k, Rng& rng) const;

  /// One sub-directory per category with crops as PPM files and an
  /// index.json holding features, scores and source steps.
  void dump(const std::filesystem::path& dir, const CategorySpace& categories) const;

 private:
  std::size_t capacity_;
  std::vector<DynamicQueue> queues_;
};

}  // namespace ttaforge
