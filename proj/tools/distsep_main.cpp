// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line surface for the separation pipeline:
//   distsep gen-scenes | render | separate | eval | report | all

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "distsep/experiment.hpp"

namespace {

struct GenScenesArgs {
  int n_sources = 2;
  int n_nodes = 2;
  int count = 1;
  int mics = 4;
  std::string out_dir;
};

struct RenderArgs {
  std::string scenes_dir;
  std::string out_dir;
  std::string corpus_dir;
  double duration_s = 10.0;
};

struct SeparateArgs {
  std::string scenes_dir;
  std::string renders_dir;
  std::string out_dir;
  std::string method = "oracle-irm";
  std::string masks_dir;
  bool exclude_silent = false;
};

struct EvalArgs {
  std::string scenes_dir;
  std::string renders_dir;
  std::string separated_dir;
  std::string out_path = "metrics.csv";
};

struct ReportArgs {
  std::string metrics_path;
  std::string out_dir = ".";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed two-step speech separation over simulated meeting scenes"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  std::string config_path;
  int jobs = 1;
  app.add_option("--seed", seed, "Base seed for scene sampling (default 1)");
  app.add_option("--config", config_path, "Experiment config JSON");
  app.add_option("--jobs", jobs, "Worker threads for scene-level stages")
      ->check(CLI::PositiveNumber);

  GenScenesArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-scenes", "Sample meeting scenes");
  cmd_gen->add_option("--n", gen.n_sources, "Sources per scene")->required();
  cmd_gen->add_option("--k", gen.n_nodes, "Nodes per scene")->required();
  cmd_gen->add_option("--count", gen.count, "Number of scenes")->required();
  cmd_gen->add_option("--mics", gen.mics, "Microphones per node (default 4)");
  cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();

  RenderArgs render;
  CLI::App* cmd_render =
      app.add_subcommand("render", "Synthesize RIRs and recordings");
  cmd_render->add_option("--scenes", render.scenes_dir, "Scene directory")
      ->required();
  cmd_render->add_option("--out", render.out_dir, "Output directory")
      ->required();
  cmd_render->add_option("--corpus", render.corpus_dir,
                         "Dry-source WAV directory (default: synthetic)");
  cmd_render->add_option("--duration", render.duration_s,
                         "Scene duration in seconds (default 10)");

  SeparateArgs separate;
  CLI::App* cmd_separate =
      app.add_subcommand("separate", "Run the two-step protocol");
  cmd_separate->add_option("--scenes", separate.scenes_dir, "Scene directory")
      ->required();
  cmd_separate
      ->add_option("--renders", separate.renders_dir, "Rendered recordings")
      ->required();
  cmd_separate->add_option("--out", separate.out_dir, "Output directory")
      ->required();
  cmd_separate->add_option(
      "--method", separate.method,
      "oracle-irm | file-masks | mwf-local-only (default oracle-irm)");
  cmd_separate->add_option("--masks-dir", separate.masks_dir,
                           "Mask tensor directory for file-masks");
  cmd_separate->add_flag("--exclude-silent", separate.exclude_silent,
                         "Drop silent compressed channels before fusion");

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Score separated scenes");
  cmd_eval->add_option("--scenes", eval.scenes_dir, "Scene directory")
      ->required();
  cmd_eval->add_option("--renders", eval.renders_dir, "Rendered recordings")
      ->required();
  cmd_eval->add_option("--separated", eval.separated_dir, "Separation outputs")
      ->required();
  cmd_eval->add_option("--out", eval.out_path,
                       "Metrics CSV path (default metrics.csv)");

  ReportArgs report;
  CLI::App* cmd_report =
      app.add_subcommand("report", "Aggregate metrics into summary tables");
  cmd_report->add_option("--metrics", report.metrics_path, "Metrics CSV")
      ->required();
  cmd_report->add_option("--out", report.out_dir,
                         "Output directory (default .)");

  CLI::App* cmd_all =
      app.add_subcommand("all", "Full pipeline from an experiment config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help is success; anything else is usage
  }

  std::string stage = "distsep";
  try {
    distsep::ExperimentConfig config;
    bool have_config = false;
    if (!config_path.empty()) {
      stage = "config";
      config = distsep::load_experiment_config(config_path);
      have_config = true;
    }
    if (app.count("--jobs")) config.jobs = jobs;
    if (app.count("--seed")) config.seed = seed;

    if (cmd_gen->parsed()) {
      stage = "gen-scenes";
      distsep::cmd_gen_scenes(config.seed, gen.n_sources, gen.n_nodes,
                              gen.count, gen.mics, gen.out_dir);
    } else if (cmd_render->parsed()) {
      stage = "render";
      distsep::cmd_render(render.scenes_dir, render.out_dir, render.corpus_dir,
                          render.duration_s, config.jobs);
    } else if (cmd_separate->parsed()) {
      stage = "separate";
      distsep::SeparationConfig sep = config.separation;
      if (separate.exclude_silent) sep.exclude_silent = true;
      distsep::cmd_separate(separate.scenes_dir, separate.renders_dir,
                            separate.out_dir, separate.method,
                            separate.masks_dir, sep, config.jobs);
    } else if (cmd_eval->parsed()) {
      stage = "eval";
      distsep::cmd_eval(eval.scenes_dir, eval.renders_dir, eval.separated_dir,
                        eval.out_path);
    } else if (cmd_report->parsed()) {
      stage = "report";
      distsep::cmd_report(report.metrics_path, report.out_dir);
    } else if (cmd_all->parsed()) {
      stage = "all";
      if (!have_config) {
        std::cerr << "distsep all: --config is required\n";
        return 2;
      }
      distsep::run_all(config);
    }
  } catch (const distsep::Error& e) {
    std::cerr << "distsep " << stage << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "distsep " << stage << ": unexpected error: " << e.what()
              << "\n";
    return 1;
  }
  return 0;
}
