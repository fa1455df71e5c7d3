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

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "ttaforge/error.hpp"
#include "ttaforge/image_io.hpp"

namespace ttaforge {
namespace {

namespace fs = std::filesystem;
using testing::scratch_dir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SyntheticSpec small_spec(std::size_t n = 6) {
  SyntheticSpec s;
  s.num_images = n;
  s.seed = 3;
  return s;
}

TEST(Synthesize, SceneConstraints) {
  SyntheticSpec spec = small_spec(200);
  spec.shift = TargetShift::parse("gauss3");
  for (const auto& scene : synthesize_all(spec)) {
    ASSERT_GE(scene.objects.size(), 1u);
    ASSERT_LE(scene.objects.size(), 4u);
    EXPECT_TRUE(scene.image.in_unit_range());
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      const auto& b = scene.objects[i].box;
      EXPECT_GE(b.x1, 0.0);
      EXPECT_GE(b.y1, 0.0);
      EXPECT_LE(b.x2, 64.0);
      EXPECT_LE(b.y2, 64.0);
      for (std::size_t j = i + 1; j < scene.objects.size(); ++j) EXPECT_LE(iou(b, scene.objects[j].box), 0.3);
    }
  }
}

TEST(Synthesize, IndexAddressableAndSeeded) {
  const auto spec = small_spec(10);
  const auto all = synthesize_all(spec);
  const auto one = synthesize(spec, 7);
  EXPECT_EQ(all[7].image, one.image);
  EXPECT_EQ(all[7].objects, one.objects);
  auto other = spec;
  other.seed = 4;
  EXPECT_NE(synthesize(other, 7).image, one.image);
}

TEST(Synthesize, PixelsAreQuantized) {
  const auto scene = synthesize(small_spec(), 0);
  Image q = scene.image;
  quantize_8bit(q);
  EXPECT_EQ(q, scene.image);
}

TEST(Synthesize, ShiftChangesOnlyAppearance) {
  auto clean = small_spec();
  auto shifted = clean;
  shifted.shift = TargetShift::parse("contrast2");
  const auto a = synthesize(clean, 2), b = synthesize(shifted, 2);
  EXPECT_EQ(a.objects, b.objects);
  EXPECT_NE(a.image, b.image);
}

TEST(SyntheticSpec, Validation) {
  auto s = small_spec();
  EXPECT_NO_THROW(s.validate());
  s.size = 60;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_spec();
  s.min_objects = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(TargetShift, Names) {
  for (const std::string n : {"none", "palette", "gauss1", "gauss5", "shot3", "bright2", "contrast4"})
    EXPECT_EQ(TargetShift::parse(n).name(), n);
  EXPECT_FALSE(TargetShift::parse("none").palette);
  EXPECT_TRUE(TargetShift::parse("gauss3").palette);
  EXPECT_EQ(TargetShift::parse("gauss3").severity, 3);
  for (const std::string bad : {"gauss0", "gauss6", "fog2", "", "palette1"})
    EXPECT_THROW(TargetShift::parse(bad), ConfigError) << bad;
}

TEST(Generate, DeterministicBytes) {
  const auto a = scratch_dir("gen_a"), b = scratch_dir("gen_b");
  generate(small_spec(), a);
  generate(small_spec(), b);
  EXPECT_EQ(slurp(a / "annotations.json"), slurp(b / "annotations.json"));
  for (const auto& e : fs::directory_iterator(a / "images"))
    EXPECT_EQ(slurp(e.path()), slurp(b / "images" / e.path().filename()));
}

TEST(Generate, LoadRoundTrip) {
  const auto dir = scratch_dir("gen_rt");
  const auto spec = small_spec(12);
  generate(spec, dir);
  const auto ds = load_dataset(dir);
  ASSERT_EQ(ds.images.size(), 12u);
  EXPECT_EQ(ds.categories.names(), shape_categories().names());
  const auto scenes = synthesize_all(spec);
  std::size_t k = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    EXPECT_EQ(ds.images[i].id, static_cast<std::int64_t>(i));
    EXPECT_EQ(ds.load_image(i), scenes[i].image);
    for (const auto& obj : scenes[i].objects) {
      const auto& a = ds.annotations.at(k++);
      EXPECT_EQ(a.image_id, static_cast<std::int64_t>(i));
      EXPECT_EQ(a.category, obj.category);
      EXPECT_NEAR(a.box.x1, obj.box.x1, 1e-9);
      EXPECT_NEAR(a.box.y2, obj.box.y2, 1e-9);
    }
  }
  EXPECT_EQ(k, ds.annotations.size());
}

TEST(Generate, OracleDetectorScoresPerfectly) {
  const auto dir = scratch_dir("gen_oracle");
  generate(small_spec(30), dir);
  const auto ds = load_dataset(dir);
  std::vector<PredictionRecord> preds;
  for (const auto& a : ds.annotations) preds.push_back({a.image_id, a.box, 1.0, a.category});
  const auto m = compute_metrics(preds, ds.annotations, ds.categories);
  EXPECT_EQ(m.ap, 1.0);
  EXPECT_EQ(m.map, 1.0);
}

void rewrite(const fs::path& dir, const std::function<void(nlohmann::json&)>& edit) {
  auto doc = nlohmann::json::parse(slurp(dir / "annotations.json"));
  edit(doc);
  std::ofstream(dir / "annotations.json") << doc.dump();
}

void expect_format_error(const fs::path& dir, const std::string& needle) {
  try {
    load_dataset(dir);
    FAIL() << "expected FormatError mentioning " << needle;
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, IntegrityErrors) {
  const auto dir = scratch_dir("gen_bad");
  generate(small_spec(3), dir);
  const auto pristine = slurp(dir / "annotations.json");
  auto reset = [&] { std::ofstream(dir / "annotations.json") << pristine; };

  rewrite(dir, [](auto& d) { d["annotations"][0]["category_id"] = 9; });
  expect_format_error(dir, "unknown category_id 9");
  reset();
  rewrite(dir, [](auto& d) { d["annotations"][0]["image_id"] = 77; });
  expect_format_error(dir, "unknown image_id 77");
  reset();
  rewrite(dir, [](auto& d) { d["images"][1]["id"] = 0; });
  expect_format_error(dir, "duplicate image id 0");
  reset();
  rewrite(dir, [](auto& d) { d["annotations"][0]["bbox"] = {60, 60, 10, 10}; });
  expect_format_error(dir, "annotations[0]");
  reset();
  rewrite(dir, [](auto& d) { d["annotations"][0].erase("bbox"); });
  expect_format_error(dir, "annotations.json");
  reset();
  std::ofstream(dir / "annotations.json") << "{ not json";
  expect_format_error(dir, "annotations.json");
  EXPECT_THROW(load_dataset(scratch_dir("gen_missing")), FormatError);
}

TEST(Predictions, RoundTripAndEmpty) {
  const auto dir = scratch_dir("preds");
  const std::vector<PredictionRecord> preds{{3, {1.5, 2.25, 10.125, 12.0}, 0.875, 2}, {0, {0, 0, 8, 8}, 1.7, 0}};
  save_predictions(dir / "p.jsonl", preds);
  EXPECT_EQ(load_predictions(dir / "p.jsonl", 3), preds);
  save_predictions(dir / "e.jsonl", {});
  EXPECT_EQ(slurp(dir / "e.jsonl"), "");
  EXPECT_TRUE(load_predictions(dir / "e.jsonl", 3).empty());
}

TEST(Predictions, LineDiagnostics) {
  const auto dir = scratch_dir("preds_bad");
  std::ofstream(dir / "p.jsonl") << R"({"image_id":1,"bbox":[0,0,1,1],"score":0.5,"category_id":1})" << '\n'
                                 << R"({"image_id":1,"bbox":[0,0,1,1],"score":0.5,"category_id":4})" << '\n';
  try {
    load_predictions(dir / "p.jsonl", 3);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("category_id 4"), std::string::npos);
  }
  std::ofstream(dir / "q.jsonl") << "{\"image_id\":1}\n";
  EXPECT_THROW(load_predictions(dir / "q.jsonl", 3), FormatError);
}

TEST(Ppm, RoundTripIsExactForQuantizedImages) {
  Image img = testing::random_image(9, 13, 5);
  quantize_8bit(img);
  const auto dir = scratch_dir("ppm");
  write_ppm(dir / "x.ppm", img);
  EXPECT_EQ(read_ppm(dir / "x.ppm"), img);
  std::ofstream(dir / "bad.ppm") << "P3\n1 1\n255\n0 0 0\n";
  EXPECT_THROW(read_ppm(dir / "bad.ppm"), FormatError);
}

}  // namespace
}  // namespace ttaforge
