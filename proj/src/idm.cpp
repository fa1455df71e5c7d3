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
#include "ttaforge/idm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ttaforge/error.hpp"
#include "ttaforge/image_io.hpp"

namespace ttaforge {

bool DynamicQueue::insert(MemoryTriplet triplet) {
  if (capacity_ == 0) return false;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(triplet));
    return true;
  }
  auto victim = items_.begin();
  for (auto it = items_.begin() + 1; it != items_.end(); ++it) {
    if (it->score < victim->score || (it->score == victim->score && it->source_step < victim->source_step)) victim = it;
  }
  if (!(triplet.score > victim->score)) return false;
  *victim = std::move(triplet);
  return true;
}

double DynamicQueue::min_score() const {
  double m = items_.empty() ? 0.0 : items_.front().score;
  for (const auto& t : items_) m = std::min(m, t.score);
  return m;
}

InstanceMemory::InstanceMemory(std::size_t num_categories, std::size_t capacity)
    : capacity_(capacity), queues_(num_categories, DynamicQueue(capacity)) {}

bool InstanceMemory::insert(MemoryTriplet triplet) {
  if (triplet.category < 0 || static_cast<std::size_t>(triplet.category) >= queues_.size()) {
    throw ShapeError("InstanceMemory::insert: category out of range");
  }
  const auto c = static_cast<std::size_t>(triplet.category);
  return queues_[c].insert(std::move(triplet));
}

std::size_t InstanceMemory::size() const {
  std::size_t n = 0;
  for (const auto& q : queues_) n += q.size();
  return n;
}

std::vector<std::size_t> InstanceMemory::occupancy() const {
  std::vector<std::size_t> out;
  for (const auto& q : queues_) out.push_back(q.size());
  return out;
}

HarvestResult InstanceMemory::harvest(const Image& image, std::span<const Detection> labels,
                                      const FeatureEmbedder& embedder, double threshold, std::int64_t source_step) {
  HarvestResult result;
  for (const auto& label : labels) {
    if (!(label.score > threshold)) continue;
    ++result.offered;
    MemoryTriplet t;
    try {
      t.crop = crop(image, label.box);
    } catch (const DegenerateBox&) {
      ++result.skipped_degenerate;
      continue;
    }
    t.feat = embedder.embed(t.crop);
    t.score = std::clamp(label.score, 0.0, 1.0);
    t.category = label.label;
    t.source_step = source_step;
    MemoryTriplet copy = t;
    if (insert(std::move(t))) result.inserted.push_back(std::move(copy));
  }
  return result;
}

Prototypes InstanceMemory::prototypes() const {
  Prototypes out;
  for (std::size_t c = 0; c < queues_.size(); ++c) {
    const auto& items = queues_[c].items();
    if (items.empty()) continue;
    std::vector<double> mean(items.front().feat.size(), 0.0);
    for (const auto& t : items) {
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += t.feat[i];
    }
    double norm = 0.0;
    for (double& v : mean) {
      v /= static_cast<double>(items.size());
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (!(norm > 1e-12)) continue;
    for (double& v : mean) v /= norm;
    out.emplace(static_cast<int>(c), std::move(mean));
  }
  return out;
}

std::vector<MemoryTriplet> InstanceMemory::sample(std::size_t k, Rng& rng) const {
  std::vector<MemoryTriplet> out;
  const std::size_t total = size();
  if (total == 0) return out;
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t idx = pick(rng);
    for (const auto& q : queues_) {
      if (idx < q.size()) {
        out.push_back(q.items()[idx]);
        break;
      }
      idx -= q.size();
    }
  }
  return out;
}

void InstanceMemory::dump(const std::filesystem::path& dir, const CategorySpace& categories) const {
  for (std::size_t c = 0; c < queues_.size(); ++c) {
    const std::string name = c < categories.size() ? categories.name(c) : "category_" + std::to_string(c);
    const auto sub = dir / name;
    std::filesystem::create_directories(sub);
    nlohmann::json index = nlohmann::json::array();
    const auto& items = queues_[c].items();
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::ostringstream file;
      file << std::setw(3) << std::setfill('0') << i << ".ppm";
      write_ppm(sub / file.str(), items[i].crop);
      index.push_back({{"file", file.str()},
                       {"score", items[i].score},
                       {"source_step", items[i].source_step},
                       {"feat", items[i].feat}});
    }
    std::ofstream out(sub / "index.json");
    if (!out) throw Error("cannot write " + (sub / "index.json").string());
    out << index.dump(2) << '\n';
  }
}

}  // namespace ttaforge
