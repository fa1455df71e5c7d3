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
#include "ttaforge/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

#include "ttaforge/error.hpp"
#include "ttaforge/image_io.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kSceneStream = 0x5343454E;
constexpr std::uint64_t kCorruptStream = 0x434F5252;
constexpr int kPlacementAttempts = 100;

struct ShiftName {
  const char* prefix;
  CorruptionKind kind;
};

constexpr std::array<ShiftName, 4> kShiftNames{{{"gauss", CorruptionKind::gaussian_noise},
                                                {"shot", CorruptionKind::shot_noise},
                                                {"bright", CorruptionKind::brightness},
                                                {"contrast", CorruptionKind::contrast}}};

bool inside_shape(Shape shape, const BoundingBox& b, double px, double py) {
  switch (shape) {
    case Shape::square:
      return true;
    case Shape::disk: {
      const double rx = 0.5 * b.width();
      const double ry = 0.5 * b.height();
      const double dx = (px - b.center_x()) / rx;
      const double dy = (py - b.center_y()) / ry;
      return dx * dx + dy * dy <= 1.0;
    }
    case Shape::triangle: {
      // Apex at the top middle, base along the bottom edge.
      const double t = (py - b.y1) / b.height();
      const double half = 0.5 * b.width() * t;
      return std::abs(px - b.center_x()) <= half;
    }
  }
  return false;
}

void draw(Image& img, Shape shape, const BoundingBox& b, const Color& color) {
  for (int y = static_cast<int>(b.y1); y < static_cast<int>(b.y2); ++y) {
    for (int x = static_cast<int>(b.x1); x < static_cast<int>(b.x2); ++x) {
      if (!inside_shape(shape, b, x + 0.5, y + 0.5)) continue;
      for (int c = 0; c < Image::kChannels; ++c) img.at(y, x, c) = color[static_cast<std::size_t>(c)];
    }
  }
}

FormatError field_error(const std::filesystem::path& path, const std::string& where, const std::string& what) {
  return FormatError(path.string() + ": " + where + ": " + what);
}

}  // namespace

CategorySpace shape_categories() { return CategorySpace({"square", "disk", "triangle"}); }

Palette source_palette() { return {{{0.85, 0.25, 0.20}, {0.25, 0.75, 0.30}, {0.25, 0.35, 0.85}}}; }

Palette target_palette() { return {{{0.825, 0.2875, 0.225}, {0.275, 0.725, 0.325}, {0.275, 0.3625, 0.825}}}; }

TargetShift TargetShift::parse(const std::string& name) {
  TargetShift s;
  if (name == "none") return s;
  s.palette = true;
  if (name == "palette") return s;
  for (const auto& n : kShiftNames) {
    const std::string prefix = n.prefix;
    if (name.size() == prefix.size() + 1 && name.compare(0, prefix.size(), prefix) == 0) {
      const char d = name.back();
      if (d >= '1' && d <= '5') {
        s.corrupted = true;
        s.corruption = n.kind;
        s.severity = d - '0';
        return s;
      }
    }
  }
  throw ConfigError("unknown target shift '" + name +
                    "' (expected none, palette, gauss1..5, bright1..5, contrast1..5 or shot1..5)");
}

std::string TargetShift::name() const {
  if (!palette) return "none";
  if (!corrupted) return "palette";
  for (const auto& n : kShiftNames) {
    if (n.kind == corruption) return std::string(n.prefix) + std::to_string(severity);
  }
  return "palette";
}

void SyntheticSpec::validate() const {
  if (patch <= 0 || size <= 0 || size % patch != 0) throw ConfigError("image size must be a positive multiple of the patch size");
  if (min_objects < 1 || max_objects < min_objects) throw ConfigError("need 1 <= min_objects <= max_objects");
  if (min_extent < 2 || max_extent < min_extent || max_extent > size) throw ConfigError("object extent range is invalid");
  if (!(max_pair_iou >= 0.0 && max_pair_iou <= 1.0)) throw ConfigError("max_pair_iou must be in [0, 1]");
  if (!(background_noise >= 0.0) || !(color_jitter >= 0.0)) throw ConfigError("noise levels must be >= 0");
  if (shift.corrupted && (shift.severity < 1 || shift.severity > 5)) throw ConfigError("corruption severity must be in 1..5");
}

LabeledImage synthesize(const SyntheticSpec& spec, std::size_t index) {
  Rng rng = make_rng(mix_seed(spec.seed, kSceneStream), index);
  LabeledImage out;
  out.image = Image(spec.size, spec.size);
  for (double& v : out.image.pixels()) v = std::clamp(spec.background + normal(rng, 0.0, spec.background_noise), 0.0, 1.0);

  const Palette& palette = spec.shift.palette ? spec.target_colors : spec.source_colors;
  const int wanted = uniform_int(rng, spec.min_objects, spec.max_objects);
  for (int k = 0; k < wanted; ++k) {
    const auto shape = static_cast<Shape>(uniform_int(rng, 0, 2));
    const int extent = uniform_int(rng, spec.min_extent, spec.max_extent);
    Color color = palette[static_cast<std::size_t>(shape)];
    for (double& c : color) c = std::clamp(c + uniform_real(rng, -spec.color_jitter, spec.color_jitter), 0.0, 1.0);
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const int x = uniform_int(rng, 0, spec.size - extent);
      const int y = uniform_int(rng, 0, spec.size - extent);
      const auto box = BoundingBox::from_xywh(x, y, extent, extent);
      const bool ok = std::none_of(out.objects.begin(), out.objects.end(),
                                   [&](const Target& t) { return iou(t.box, box) > spec.max_pair_iou; });
      if (!ok) continue;
      draw(out.image, shape, box, color);
      out.objects.push_back({box, static_cast<int>(shape), 1.0});
      break;
    }
  }

  if (spec.shift.corrupted) {
    out.image = corrupt(out.image, CorruptionSpec(spec.shift.corruption, spec.shift.severity,
                                                  mix_seed(mix_seed(spec.seed, kCorruptStream), index)));
  }
  quantize_8bit(out.image);
  return out;
}

std::vector<LabeledImage> synthesize_all(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<LabeledImage> out(spec.num_images);
  const auto n = static_cast<std::int64_t>(spec.num_images);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = synthesize(spec, static_cast<std::size_t>(i));
  return out;
}

std::vector<LabeledImage> source_training_set(std::size_t num_images, std::uint64_t seed, int size) {
  SyntheticSpec spec;
  spec.num_images = num_images;
  spec.seed = seed;
  spec.size = size;
  return synthesize_all(spec);
}

Image Dataset::load_image(std::size_t i) const { return read_ppm(root / images.at(i).file); }

std::vector<Image> Dataset::load_images() const {
  std::vector<Image> out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) out[i] = load_image(i);
  return out;
}

void generate(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  const auto scenes = synthesize_all(spec);
  std::filesystem::create_directories(dir / "images");
  const CategorySpace cats = shape_categories();

  nlohmann::ordered_json doc;
  doc["images"] = nlohmann::ordered_json::array();
  doc["annotations"] = nlohmann::ordered_json::array();
  doc["categories"] = nlohmann::ordered_json::array();
  std::int64_t ann_id = 1;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "images/%06zu.ppm", i);
    write_ppm(dir / name, scenes[i].image);
    const auto id = static_cast<std::int64_t>(i);
    doc["images"].push_back({{"id", id}, {"file", name}, {"width", spec.size}, {"height", spec.size}});
    for (const auto& t : scenes[i].objects) {
      doc["annotations"].push_back({{"id", ann_id++},
                                    {"image_id", id},
                                    {"bbox", {t.box.x1, t.box.y1, t.box.width(), t.box.height()}},
                                    {"category_id", t.category + 1}});
    }
  }
  for (std::size_t c = 0; c < cats.size(); ++c) doc["categories"].push_back({{"id", c + 1}, {"name", cats.name(c)}});

  std::ofstream out(dir / "annotations.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "annotations.json").string());
  out << doc.dump(1) << '\n';
  if (!out) throw Error("failed writing " + (dir / "annotations.json").string());
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto path = dir / "annotations.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }

  Dataset ds;
  ds.root = dir;
  try {
    std::vector<std::pair<int, std::string>> cats;
    for (std::size_t i = 0; i < doc.at("categories").size(); ++i) {
      const auto& c = doc["categories"][i];
      cats.emplace_back(c.at("id").get<int>(), c.at("name").get<std::string>());
    }
    std::sort(cats.begin(), cats.end());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (cats[i].first != static_cast<int>(i) + 1) {
        throw field_error(path, "categories", "ids must be 1..N, found " + std::to_string(cats[i].first));
      }
      names.push_back(cats[i].second);
    }
    ds.categories = CategorySpace(names);

    std::map<std::int64_t, std::size_t> image_index;
    for (std::size_t i = 0; i < doc.at("images").size(); ++i) {
      const auto& im = doc["images"][i];
      ImageRecord r{im.at("id").get<std::int64_t>(), im.at("file").get<std::string>(), im.at("width").get<int>(),
                    im.at("height").get<int>()};
      if (!image_index.emplace(r.id, i).second) {
        throw field_error(path, "images[" + std::to_string(i) + "]", "duplicate image id " + std::to_string(r.id));
      }
      ds.images.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < doc.at("annotations").size(); ++i) {
      const auto& a = doc["annotations"][i];
      const std::string where = "annotations[" + std::to_string(i) + "]";
      const auto image_id = a.at("image_id").get<std::int64_t>();
      const auto it = image_index.find(image_id);
      if (it == image_index.end()) throw field_error(path, where, "unknown image_id " + std::to_string(image_id));
      const int cat = a.at("category_id").get<int>();
      if (cat < 1 || static_cast<std::size_t>(cat) > names.size()) {
        throw field_error(path, where, "unknown category_id " + std::to_string(cat));
      }
      const auto& bb = a.at("bbox");
      if (bb.size() != 4) throw field_error(path, where, "bbox must have 4 numbers");
      const auto box = BoundingBox::from_xywh(bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                                              bb[3].get<double>());
      const auto& rec = ds.images[it->second];
      if (!box.valid() || box.x1 < 0 || box.y1 < 0 || box.x2 > rec.width || box.y2 > rec.height) {
        throw field_error(path, where, "bbox outside image bounds");
      }
      ds.annotations.push_back({image_id, box, cat - 1});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return ds;
}

void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> predictions) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : predictions) {
    nlohmann::ordered_json j;
    j["image_id"] = p.image_id;
    j["bbox"] = {p.box.x1, p.box.y1, p.box.width(), p.box.height()};
    j["score"] = p.score;
    j["category_id"] = p.category + 1;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path, std::size_t num_categories) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    try {
      const json j = json::parse(line);
      PredictionRecord p;
      p.image_id = j.at("image_id").get<std::int64_t>();
      const auto& bb = j.at("bbox");
      if (bb.size() != 4) throw field_error(path, where, "bbox must have 4 numbers");
      p.box = BoundingBox::from_xywh(bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>());
      p.score = j.at("score").get<double>();
      const int cat = j.at("category_id").get<int>();
      if (cat < 1 || static_cast<std::size_t>(cat) > num_categories) {
        throw field_error(path, where, "unknown category_id " + std::to_string(cat));
      }
      p.category = cat - 1;
      out.push_back(p);
    } catch (const json::exception& e) {
      throw field_error(path, where, e.what());
    }
  }
  return out;
}

}  // namespace ttaforge
