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

// Command implementations behind the ttaforge executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ttaforge/adapt.hpp"
#include "ttaforge/data.hpp"
#include "ttaforge/evalkit.hpp"
#include "ttaforge/toy_detector.hpp"

namespace ttaforge {

inline constexpr const char* kSeedEnv = "TTAFORGE_SEED";

/// How the frozen detector is obtained when no weight file is given.
struct DetectorRecipe {
  ToyDetectorOptions options;
  HeadFitOptions fit;
  std::size_t source_images = 400;
  std::uint64_t source_seed = 20240;
};

ToyDetector build_detector(const DetectorRecipe& recipe);

enum class SeedSource { flag, env, config, fallback };
std::string to_string(SeedSource source);

struct ResolvedSeed {
  std::uint64_t value = 0;
  SeedSource source = SeedSource::fallback;
};

/// flag > TTAFORGE_SEED > config > fallback. Throws ConfigError when the
/// environment value is not an unsigned integer.
ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config,
                          std::uint64_t fallback);

struct GenOptions {
  std::filesystem::path out;
  std::size_t num_images = 200;
  int size = 64;
  std::optional<std::uint64_t> seed;
  std::string target_shift = "none";
};

/// Writes the dataset plus a manifest.json describing it.
void cmd_gen(const GenOptions& options, std::ostream& log);

struct RunOptions {
  RunMode mode = RunMode::adapt;
  std::optional<std::filesystem::path> config;
  std::filesystem::path data;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  /// Detector weight file; built from `recipe` when absent.
  std::optional<std::filesystem::path> weights;
  DetectorRecipe recipe;
  /// Save teacher/student prompts every N steps (0 = only at the end).
  std::size_t checkpoint_every = 0;
  bool dump_memory = false;
  /// Overrides applied after the config file (used by tests and ablations).
  std::optional<AdaptationConfig> config_override;
};

struct RunSummary {
  Metrics metrics;
  AdaptationConfig config;
  ResolvedSeed seed;
  std::size_t images = 0;
  std::size_t steps = 0;
  std::size_t skipped_steps = 0;
};

/// Runs a stream end to end and writes manifest.json, config.txt,
/// weights.bin, steps.jsonl, predictions.jsonl, metrics.csv, pr_curve.csv
/// and prompt checkpoints under `out`.
RunSummary cmd_run(const RunOptions& options, std::ostream& log);

/// Re-runs the command recorded in a run manifest, writing to `out`.
RunSummary replay_run(const std::filesystem::path& manifest, const std::filesystem::path& out, std::ostream& log);

struct EvalOptions {
  std::filesystem::path predictions;
  std::filesystem::path data;
  std::filesystem::path out;
  double iou = 0.5;
  /// Also write tp_fp_hist.csv with this many bins.
  std::optional<std::size_t> histogram_bins;
};

Metrics cmd_eval(const EvalOptions& options, std::ostream& log);

/// Predictions of a finished stream in the interchange format.
std::vector<PredictionRecord> to_records(const Dataset& dataset, const StreamResult& result);

}  // namespace ttaforge
