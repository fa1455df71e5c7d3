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
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ttaforge/error.hpp"
#include "ttaforge/evalkit.hpp"

namespace ttaforge {
namespace {

TEST(Match, Examples) {
  const std::vector<BoundingBox> gt{{0, 0, 10, 10}};
  EXPECT_EQ(match(std::vector<ScoredBox>{{{0, 0, 10, 10}, 0.8}}, gt), (std::vector<ScoredMatch>{{0.8, true}}));
  const auto two = match(std::vector<ScoredBox>{{{0, 0, 10, 10}, 0.6}, {{1, 0, 10, 10}, 0.9}}, gt);
  EXPECT_EQ(two, (std::vector<ScoredMatch>{{0.9, true}, {0.6, false}}));
  // IoU 49 / 100 - a hair under the threshold.
  EXPECT_EQ(match(std::vector<ScoredBox>{{{0, 0, 10, 4.9}, 0.5}}, gt), (std::vector<ScoredMatch>{{0.5, false}}));
  EXPECT_EQ(match(std::vector<ScoredBox>{{{0, 0, 10, 5}, 0.5}}, gt), (std::vector<ScoredMatch>{{0.5, true}}));
}

TEST(Match, TiesFollowInputOrder) {
  const std::vector<BoundingBox> gt{{0, 0, 10, 10}};
  const auto m = match(std::vector<ScoredBox>{{{20, 20, 30, 30}, 0.5}, {{0, 0, 10, 10}, 0.5}}, gt);
  EXPECT_FALSE(m[0].tp);
  EXPECT_TRUE(m[1].tp);
}

TEST(AveragePrecision, Examples) {
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{{0.9, true}}, 1), 1.0);
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{{0.9, true}, {0.5, false}}, 1), 1.0);
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{{0.9, false}, {0.5, true}}, 1), 0.5);
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{}, 0), std::nullopt);
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{{0.3, false}}, 0), 0.0);
  EXPECT_EQ(average_precision(std::vector<ScoredMatch>{}, 2), 0.0);
  // TP FP TP with 3 GT: (1 + 2/3) / 3
  EXPECT_DOUBLE_EQ(*average_precision(std::vector<ScoredMatch>{{3, true}, {2, false}, {1, true}}, 3), (1.0 + 2.0 / 3.0) / 3.0);
}

TEST(AveragePrecision, MatchesEnumerationOracleOnSmallCases) {
  const double levels[] = {0.2, 0.5, 0.5, 0.9};
  for (std::size_t gt = 0; gt <= 3; ++gt)
    for (std::size_t n = 0; n <= 4; ++n)
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) > gt) continue;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n; ++i) combos *= 4;
        for (std::size_t code = 0; code < combos; ++code) {
          std::vector<ScoredMatch> recs;
          std::size_t c = code;
          for (std::size_t i = 0; i < n; ++i, c /= 4) recs.push_back({levels[c % 4], ((mask >> i) & 1u) != 0});
          ASSERT_EQ(average_precision(recs, gt), oracle::average_precision(recs, gt));
        }
      }
}

TEST(AveragePrecision, RankOnlyDependence) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredMatch> recs, transformed;
    const int n = uniform_int(rng, 1, 12);
    std::size_t tps = 0;
    for (int i = 0; i < n; ++i) {
      const bool tp = uniform_int(rng, 0, 1) == 1;
      tps += tp;
      const double s = uniform_real(rng, 0, 1);
      recs.push_back({s, tp});
      transformed.push_back({std::exp(3 * s) - 7, tp});
    }
    const std::size_t gt = tps + static_cast<std::size_t>(uniform_int(rng, 0, 3));
    EXPECT_EQ(average_precision(recs, gt), average_precision(transformed, gt));
    const double ap = *average_precision(recs, gt);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
  }
}

TEST(PrCurve, OnePointPerRecord) {
  const auto pr = pr_curve(std::vector<ScoredMatch>{{0.2, true}, {0.9, false}}, 2);
  ASSERT_EQ(pr.size(), 2u);
  EXPECT_EQ(pr[0].score, 0.9);
  EXPECT_EQ(pr[0].precision, 0.0);
  EXPECT_EQ(pr[1].recall, 0.5);
  EXPECT_EQ(pr[1].precision, 0.5);
}

TEST(Histogram, EmptyTopBinAndConservation) {
  const auto empty = tp_fp_histogram({}, 5);
  EXPECT_EQ(empty.tp, std::vector<std::size_t>(5, 0));
  const auto top = tp_fp_histogram(std::vector<ScoredMatch>{{1.0, true}, {1.0, true}, {3.2, true}}, 4);
  EXPECT_EQ(top.tp, (std::vector<std::size_t>{0, 0, 0, 3}));
  Rng rng(1);
  std::vector<ScoredMatch> recs;
  for (int i = 0; i < 300; ++i) recs.push_back({uniform_real(rng, -0.5, 2.0), uniform_int(rng, 0, 1) == 1});
  const auto h = tp_fp_histogram(recs, 7);
  std::size_t total = 0;
  for (std::size_t b = 0; b < 7; ++b) total += h.tp[b] + h.fp[b];
  EXPECT_EQ(total, recs.size());
  EXPECT_THROW(tp_fp_histogram(recs, 0), ConfigError);
}

TEST(Evaluate, PerfectPredictionsScoreOne) {
  const CategorySpace cats({"a", "b", "c"});
  const std::vector<GroundTruthBox> gt{{1, {0, 0, 10, 10}, 0}, {1, {20, 20, 30, 30}, 1}, {2, {5, 5, 9, 9}, 1}};
  std::vector<PredictionRecord> preds;
  for (const auto& g : gt) preds.push_back({g.image_id, g.box, 0.7, g.category});
  const auto rec = evaluate(preds, gt, cats);
  EXPECT_EQ(rec.categories[0].ap, 1.0);
  EXPECT_EQ(rec.categories[1].ap, 1.0);
  EXPECT_EQ(rec.categories[2].ap, std::nullopt);
  EXPECT_EQ(rec.mean_ap, 1.0);
  const auto m = compute_metrics(preds, gt, cats);
  EXPECT_EQ(m.ap, 1.0);
  EXPECT_EQ(m.map, 1.0);
}

TEST(Evaluate, MatchingIsPerImageAndCategory) {
  const CategorySpace cats({"a", "b"});
  const std::vector<GroundTruthBox> gt{{1, {0, 0, 10, 10}, 0}};
  const std::vector<PredictionRecord> preds{{2, {0, 0, 10, 10}, 0.9, 0}, {1, {0, 0, 10, 10}, 0.8, 1}};
  const auto rec = evaluate(preds, gt, cats);
  EXPECT_EQ(rec.categories[0].tp, 0u);
  EXPECT_EQ(rec.categories[0].fp, 1u);
  EXPECT_EQ(rec.categories[0].ap, 0.0);
  EXPECT_EQ(rec.categories[1].ap, 0.0);
  EXPECT_EQ(rec.mean_ap, 0.0);
}

TEST(Evaluate, TpNeverExceedsGt) {
  Rng rng(8);
  const CategorySpace cats({"a", "b"});
  std::vector<GroundTruthBox> gt;
  std::vector<PredictionRecord> preds;
  for (int img = 0; img < 10; ++img) {
    for (int i = 0; i < 3; ++i) gt.push_back({img, BoundingBox::from_xywh(10.0 * i, 0, 8, 8), i % 2});
    for (int i = 0; i < 8; ++i)
      preds.push_back({img, BoundingBox::from_xywh(uniform_real(rng, 0, 25), uniform_real(rng, 0, 2), 8, 8),
                       uniform_real(rng, 0, 1), uniform_int(rng, 0, 1)});
  }
  const auto rec = evaluate(preds, gt, cats);
  for (const auto& c : rec.categories) {
    EXPECT_LE(c.tp, c.gt_count);
    EXPECT_EQ(c.tp + c.fp, c.records.size());
  }
}

TEST(Metrics, MapAveragesTenThresholds) {
  const CategorySpace cats({"a"});
  const std::vector<GroundTruthBox> gt{{1, {0, 0, 10, 10}, 0}};
  // IoU 0.8: TP for thresholds 0.50..0.80 (7 of 10).
  const std::vector<PredictionRecord> preds{{1, {0, 0, 10, 8}, 0.9, 0}};
  const auto m = compute_metrics(preds, gt, cats);
  EXPECT_EQ(m.ap, 1.0);
  EXPECT_NEAR(m.map, 0.7, 1e-12);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Csv, Layouts) {
  const CategorySpace cats({"a", "b"});
  const std::vector<GroundTruthBox> gt{{1, {0, 0, 10, 10}, 0}};
  const std::vector<PredictionRecord> preds{{1, {0, 0, 10, 10}, 0.75, 0}, {1, {50, 50, 60, 60}, 0.25, 0}};
  const auto m = compute_metrics(preds, gt, cats);
  const auto dir = testing::scratch_dir("csv");
  write_metrics_csv(dir / "m.csv", m);
  write_pr_curve_csv(dir / "pr.csv", m.at_threshold);
  write_histogram_csv(dir / "h.csv", m.at_threshold, 2);
  const auto metrics = slurp(dir / "m.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "category,gt_count,tp,fp,ap50");
  EXPECT_NE(metrics.find("a,1,1,1,1.000000"), std::string::npos);
  EXPECT_NE(metrics.find("\nall,"), std::string::npos);
  const auto pr = slurp(dir / "pr.csv");
  EXPECT_EQ(pr.substr(0, pr.find('\n')), "category,rank,score,recall,precision");
  const auto h = slurp(dir / "h.csv");
  EXPECT_EQ(h.substr(0, h.find('\n')), "category,bin_lo,bin_hi,tp,fp");
  EXPECT_EQ(format_number(0.5), "0.500000");
}

}  // namespace
}  // namespace ttaforge
