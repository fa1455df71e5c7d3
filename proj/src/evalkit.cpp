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
#include "ttaforge/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "ttaforge/error.hpp"

namespace ttaforge {

namespace {

std::vector<std::size_t> rank_by_score(std::span<const ScoredMatch> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].score > records[b].score; });
  return order;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::vector<ScoredMatch> match(std::span<const ScoredBox> detections, std::span<const BoundingBox> ground_truth,
                               double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });
  std::vector<bool> used(ground_truth.size(), false);
  std::vector<ScoredMatch> out;
  out.reserve(detections.size());
  for (std::size_t i : order) {
    double best = -1.0;
    std::size_t best_j = ground_truth.size();
    for (std::size_t j = 0; j < ground_truth.size(); ++j) {
      if (used[j]) continue;
      const double v = iou(detections[i].box, ground_truth[j]);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    const bool tp = best_j < ground_truth.size() && best >= iou_threshold;
    if (tp) used[best_j] = true;
    out.push_back({detections[i].score, tp});
  }
  return out;
}

std::optional<double> average_precision(std::span<const ScoredMatch> records, std::size_t gt_count) {
  if (gt_count == 0) return records.empty() ? std::nullopt : std::optional<double>(0.0);
  const auto order = rank_by_score(records);
  std::vector<double> precision(order.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    tp += records[order[i]].tp ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Interpolated precision: best precision at any deeper cut-off.
  for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (records[order[i]].tp) sum += precision[i];
  }
  return sum / static_cast<double>(gt_count);
}

std::vector<PrPoint> pr_curve(std::span<const ScoredMatch> records, std::size_t gt_count) {
  std::vector<PrPoint> out;
  std::size_t tp = 0;
  std::size_t rank = 0;
  for (std::size_t i : rank_by_score(records)) {
    ++rank;
    tp += records[i].tp ? 1 : 0;
    out.push_back({records[i].score, gt_count == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gt_count),
                   static_cast<double>(tp) / static_cast<double>(rank)});
  }
  return out;
}

TpFpHistogram tp_fp_histogram(std::span<const ScoredMatch> records, std::size_t bins) {
  if (bins == 0) throw ConfigError("tp_fp_histogram: bins must be >= 1");
  TpFpHistogram h{std::vector<std::size_t>(bins, 0), std::vector<std::size_t>(bins, 0)};
  for (const auto& r : records) {
    std::size_t b = 0;
    if (r.score >= 1.0) {
      b = bins - 1;
    } else if (r.score > 0.0) {
      b = std::min(bins - 1, static_cast<std::size_t>(r.score * static_cast<double>(bins)));
    }
    (r.tp ? h.tp : h.fp)[b] += 1;
  }
  return h;
}

EvalRecord evaluate(std::span<const PredictionRecord> predictions, std::span<const GroundTruthBox> ground_truth,
                    const CategorySpace& categories, double iou_threshold) {
  using Key = std::pair<std::int64_t, int>;
  std::map<Key, std::vector<BoundingBox>> gt_by_key;
  std::map<Key, std::vector<ScoredBox>> det_by_key;
  for (const auto& g : ground_truth) gt_by_key[{g.image_id, g.category}].push_back(g.box);
  for (const auto& p : predictions) det_by_key[{p.image_id, p.category}].push_back({p.box, p.score});

  EvalRecord rec;
  rec.iou_threshold = iou_threshold;
  rec.categories.resize(categories.size());
  for (std::size_t c = 0; c < categories.size(); ++c) rec.categories[c].name = categories.name(c);
  for (const auto& [key, boxes] : gt_by_key) {
    if (key.second < 0 || static_cast<std::size_t>(key.second) >= categories.size()) {
      throw FormatError("ground truth category " + std::to_string(key.second) + " is out of range");
    }
    rec.categories[static_cast<std::size_t>(key.second)].gt_count += boxes.size();
  }
  for (const auto& [key, dets] : det_by_key) {
    if (key.second < 0 || static_cast<std::size_t>(key.second) >= categories.size()) {
      throw FormatError("prediction category " + std::to_string(key.second) + " is out of range");
    }
    static const std::vector<BoundingBox> kNone;
    const auto it = gt_by_key.find(key);
    const auto matched = match(dets, it == gt_by_key.end() ? kNone : it->second, iou_threshold);
    auto& cat = rec.categories[static_cast<std::size_t>(key.second)];
    cat.records.insert(cat.records.end(), matched.begin(), matched.end());
  }

  double sum = 0.0;
  std::size_t defined = 0;
  for (auto& cat : rec.categories) {
    for (const auto& r : cat.records) (r.tp ? cat.tp : cat.fp) += 1;
    cat.ap = average_precision(cat.records, cat.gt_count);
    if (cat.ap) {
      sum += *cat.ap;
      ++defined;
    }
  }
  if (defined > 0) rec.mean_ap = sum / static_cast<double>(defined);
  return rec;
}

Metrics compute_metrics(std::span<const PredictionRecord> predictions, std::span<const GroundTruthBox> ground_truth,
                        const CategorySpace& categories, double iou_threshold) {
  Metrics m;
  m.at_threshold = evaluate(predictions, ground_truth, categories, iou_threshold);
  m.ap = m.at_threshold.mean_ap.value_or(0.0);
  double sum = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = 0.5 + 0.05 * k;
    sum += evaluate(predictions, ground_truth, categories, t).mean_ap.value_or(0.0);
  }
  m.map = sum / 10.0;
  return m;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void write_metrics_csv(const std::filesystem::path& path, const Metrics& metrics) {
  auto out = open_csv(path);
  out << "category,gt_count,tp,fp,ap50\n";
  std::size_t gt = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& c : metrics.at_threshold.categories) {
    out << c.name << ',' << c.gt_count << ',' << c.tp << ',' << c.fp << ',' << (c.ap ? format_number(*c.ap) : "")
        << '\n';
    gt += c.gt_count;
    tp += c.tp;
    fp += c.fp;
  }
  out << "all," << gt << ',' << tp << ',' << fp << ',' << format_number(metrics.ap) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

void write_pr_curve_csv(const std::filesystem::path& path, const EvalRecord& record) {
  auto out = open_csv(path);
  out << "category,rank,score,recall,precision\n";
  for (const auto& c : record.categories) {
    std::size_t rank = 0;
    for (const auto& p : pr_curve(c.records, c.gt_count)) {
      out << c.name << ',' << ++rank << ',' << format_number(p.score) << ',' << format_number(p.recall) << ','
          << format_number(p.precision) << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

void write_histogram_csv(const std::filesystem::path& path, const EvalRecord& record, std::size_t bins) {
  auto out = open_csv(path);
  out << "category,bin_lo,bin_hi,tp,fp\n";
  for (const auto& c : record.categories) {
    const auto h = tp_fp_histogram(c.records, bins);
    for (std::size_t b = 0; b < bins; ++b) {
      out << c.name << ',' << format_number(static_cast<double>(b) / static_cast<double>(bins)) << ','
          << format_number(static_cast<double>(b + 1) / static_cast<double>(bins)) << ',' << h.tp[b] << ',' << h.fp[b]
          << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace ttaforge
