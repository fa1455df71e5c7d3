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
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ttaforge/app.hpp"
#include "ttaforge/error.hpp"

namespace {

std::optional<std::uint64_t> opt_seed(const CLI::Option* opt, std::uint64_t value) {
  return opt->count() > 0 ? std::optional<std::uint64_t>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttaforge: online prompt-based test-time adaptation for a toy detector"};
  app.require_subcommand(1);

  ttaforge::GenOptions gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic shape dataset");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--num-images", gen.num_images, "Number of images")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--size", gen.size, "Image side in pixels (multiple of 8)")->check(CLI::PositiveNumber);
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--target-shift", gen.target_shift,
                      "none, palette, gauss1..5, bright1..5, contrast1..5 or shot1..5");

  ttaforge::RunOptions run;
  std::string mode = "adapt";
  std::string config_path;
  std::string weights_path;
  std::string replay_path;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run direct testing or online adaptation over a dataset stream");
  run_cmd->add_option("--mode", mode, "direct or adapt")->check(CLI::IsMember({"direct", "adapt"}));
  auto* config_opt = run_cmd->add_option("--config", config_path, "Flat key = value config file");
  auto* data_opt = run_cmd->add_option("--data", run.data, "Dataset directory");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Adaptation seed");
  auto* weights_opt = run_cmd->add_option("--weights", weights_path, "Detector weight file (built when omitted)");
  run_cmd->add_option("--checkpoint-every", run.checkpoint_every, "Save prompts every N steps");
  run_cmd->add_flag("--dump-memory", run.dump_memory, "Write the instance memory after the run");
  auto* replay_opt = run_cmd->add_option("--replay", replay_path, "Re-run the command recorded in a manifest");
  replay_opt->excludes(config_opt)->excludes(data_opt)->excludes(run_seed_opt)->excludes(weights_opt);

  ttaforge::EvalOptions eval;
  std::size_t bins = 10;
  auto* eval_cmd = app.add_subcommand("eval", "Recompute metrics from saved predictions");
  eval_cmd->add_option("--predictions", eval.predictions, "predictions.jsonl")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset directory")->required();
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  eval_cmd->add_option("--iou", eval.iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  auto* hist_opt = eval_cmd->add_option("--tp-fp-hist", bins, "Also write TP/FP score histograms with N bins")
                       ->expected(0, 1)
                       ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      gen.seed = opt_seed(gen_seed_opt, gen_seed);
      ttaforge::cmd_gen(gen, std::cout);
    } else if (run_cmd->parsed()) {
      if (replay_opt->count() > 0) {
        ttaforge::replay_run(replay_path, run.out, std::cout);
        return 0;
      }
      if (data_opt->count() == 0) throw ttaforge::ConfigError("run: --data is required");
      run.mode = ttaforge::parse_run_mode(mode);
      if (config_opt->count() > 0) run.config = config_path;
      if (weights_opt->count() > 0) run.weights = weights_path;
      run.seed = opt_seed(run_seed_opt, run_seed);
      ttaforge::cmd_run(run, std::cout);
    } else if (eval_cmd->parsed()) {
      if (hist_opt->count() > 0) eval.histogram_bins = bins;
      ttaforge::cmd_eval(eval, std::cout);
    }
  } catch (const ttaforge::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
