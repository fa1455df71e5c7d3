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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttaforge/core.hpp"

namespace ttaforge {

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

struct ScoredMatch {
  double score = 0.0;
  bool tp = false;

  friend bool operator==(const ScoredMatch&, const ScoredMatch&) = default;
};

/// Greedy matching for one image and one category. Detections are visited
/// by descending score (input order on ties); each takes the unmatched
/// ground truth with the highest IoU if that IoU is >= iou_threshold.
/// Output follows the visiting order.
std::vector<ScoredMatch> match(std::span<const ScoredBox> detections, std::span<const BoundingBox> ground_truth,
                               double iou_threshold = 0.5);

/// All-points interpolated AP. Records are ranked by descending score
/// (input order on ties). Undefined (nullopt) when there is no ground truth
/// and no detection; 0 when there is no ground truth but some detection.
std::optional<double> average_precision(std::span<const ScoredMatch> records, std::size_t gt_count);

struct PrPoint {
  double score = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

/// One point per ranked record.
std::vector<PrPoint> pr_curve(std::span<const ScoredMatch> records, std::size_t gt_count);

struct TpFpHistogram {
  std::vector<std::size_t> tp;
  std::vector<std::size_t> fp;
};

/// Equal-width bins over [0, 1]. Scores >= 1 land in the top bin and
/// scores < 0 in the bottom bin. Throws ConfigError when bins == 0.
TpFpHistogram tp_fp_histogram(std::span<const ScoredMatch> records, std::size_t bins);

struct GroundTruthBox {
  std::int64_t image_id = 0;
  BoundingBox box;
  int category = 0;
};

struct PredictionRecord {
  std::int64_t image_id = 0;
  BoundingBox box;
  double score = 0.0;
  int category = 0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct CategoryEval {
  std::string name;
  std::size_t gt_count = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::optional<double> ap;
  std::vector<ScoredMatch> records;
};

struct EvalRecord {
  double iou_threshold = 0.5;
  std::vector<CategoryEval> categories;
  /// Mean of the defined per-category APs.
  std::optional<double> mean_ap;
};

EvalRecord evaluate(std::span<const PredictionRecord> predictions, std::span<const GroundTruthBox> ground_truth,
                    const CategorySpace& categories, double iou_threshold = 0.5);

struct Metrics {
  EvalRecord at_threshold;
  /// Mean AP at the base threshold.
  double ap = 0.0;
  /// Mean AP averaged over IoU 0.50, 0.55, ..., 0.95.
  double map = 0.0;
};

Metrics compute_metrics(std::span<const PredictionRecord> predictions, std::span<const GroundTruthBox> ground_truth,
                        const CategorySpace& categories, double iou_threshold = 0.5);

/// category,gt_count,tp,fp,ap50 plus an "all" summary row.
void write_metrics_csv(const std::filesystem::path& path, const Metrics& metrics);
/// category,rank,score,recall,precision
void write_pr_curve_csv(const std::filesystem::path& path, const EvalRecord& record);
/// category,bin_lo,bin_hi,tp,fp
void write_histogram_csv(const std::filesystem::path& path, const EvalRecord& record, std::size_t bins);

/// Fixed-precision number formatting shared by every CSV writer.
std::string format_number(double value);

}  // namespace ttaforge
