// Copyright 2026 The rdlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rdl: data generation, training, sampling and evaluation driver.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdl/error.hpp"
#include "rdl/experiment.hpp"

namespace {

struct ConfigFlags {
  std::string config;
  std::string preset;
  std::string scale = "full";
  std::string output;
  std::optional<std::uint64_t> master_seed;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON experiment config");
    app->add_option("-p,--preset", preset, "named preset (see `rdl presets`)");
    app->add_option("--scale", scale, "preset scale")->check(CLI::IsMember({"full", "desk"}));
    app->add_option("-o,--output", output, "output directory (overrides the config)");
    app->add_option("--master-seed", master_seed, "master seed (overrides the config)");
  }

  bool given() const { return !config.empty() || !preset.empty(); }

  rdl::ExperimentConfig load() const {
    if (config.empty() == preset.empty()) throw rdl::InvalidArgument("give exactly one of --config or --preset");
    rdl::ExperimentConfig cfg = config.empty() ? rdl::preset(preset, scale) : rdl::load_config(config);
    if (!output.empty()) cfg.output_dir = output;
    if (master_seed) cfg.seed = *master_seed;
    return cfg;
  }
};

struct CellFlags {
  std::vector<std::string> objectives;
  std::vector<std::uint64_t> seeds;

  void attach(CLI::App* app) {
    app->add_option("--objective", objectives, "restrict to these objectives");
    app->add_option("--seed", seeds, "restrict to these run seeds");
  }

  void apply(rdl::ExperimentConfig& cfg) const {
    if (!objectives.empty()) {
      cfg.objectives.clear();
      for (const auto& o : objectives) cfg.objectives.push_back(rdl::parse_objective(o));
    }
    if (!seeds.empty()) cfg.seeds = seeds;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ratio-divergence RBM learning toolkit"};
  app.set_version_flag("--version", rdl::tool_version());
  app.require_subcommand(1);

  ConfigFlags gen_cfg, train_cfg, sample_cfg, eval_cfg, report_cfg, run_cfg;
  CellFlags train_cells, sample_cells, run_cells;
  unsigned jobs = 1, run_jobs = 1;
  rdl::SampleArgs sample_args;
  rdl::AdHocEvalArgs eval_args;

  auto* presets = app.add_subcommand("presets", "list preset names");

  auto* gen = app.add_subcommand("generate-data", "parallel-tempering training/validation data");
  gen_cfg.attach(gen);

  auto* tr = app.add_subcommand("train", "train RBMs for each (objective, seed) cell");
  train_cfg.attach(tr);
  train_cells.attach(tr);
  tr->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* sm = app.add_subcommand("sample", "draw block-Gibbs samples from trained RBMs");
  sample_cfg.attach(sm);
  sample_cells.attach(sm);
  sm->add_option("--checkpoint", sample_args.checkpoint, "parameter file (ad hoc mode)");
  sm->add_option("--init", sample_args.init, "initial states dataset (ad hoc mode)");
  sm->add_option("--out", sample_args.output, "output dataset (ad hoc mode)");
  sm->add_option("--steps", sample_args.steps, "Gibbs steps (ad hoc mode)")->check(CLI::NonNegativeNumber);
  sm->add_option("--count", sample_args.count, "number of samples, 0 = init size (ad hoc mode)");
  sm->add_option("--rng-seed", sample_args.seed, "sampler seed (ad hoc mode)");

  auto* ev = app.add_subcommand("evaluate", "Wasserstein, R(theta), Hamming and PCA summaries");
  eval_cfg.attach(ev);
  ev->add_option("--model", eval_args.model, "model text file (ad hoc mode)");
  ev->add_option("--reference", eval_args.reference, "reference dataset (ad hoc mode)");
  ev->add_option("--samples", eval_args.samples, "sample datasets (ad hoc mode)");
  ev->add_option("--checkpoint", eval_args.checkpoint, "parameter file for R(theta) (ad hoc mode)");
  ev->add_option("--val", eval_args.val, "validation dataset for R(theta) (ad hoc mode)");
  ev->add_option("--csv", eval_args.output, "write the ad hoc table here instead of stdout");

  auto* rp = app.add_subcommand("report", "render eval/summary.csv as report.md");
  report_cfg.attach(rp);

  auto* run = app.add_subcommand("run", "generate-data, train, sample, evaluate and report in sequence");
  run_cfg.attach(run);
  run_cells.attach(run);
  run->add_option("-j,--jobs", run_jobs, "worker threads for training")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const auto& n : rdl::preset_names()) std::cout << n << '\n';
    } else if (gen->parsed()) {
      const auto cfg = gen_cfg.load();
      const auto s = rdl::cmd_generate_data(cfg);
      std::cout << "wrote " << s.train_size << " train and " << s.val_size << " validation samples to "
                << rdl::paths_for(cfg).root.string() << '\n';
      std::cout << "swap acceptance:";
      for (double r : s.swap_rates) std::printf(" %.3f", r);
      std::cout << '\n';
    } else if (tr->parsed()) {
      auto cfg = train_cfg.load();
      train_cells.apply(cfg);
      cfg.validate();
      const auto out = rdl::cmd_train_all(cfg, jobs);
      std::size_t i = 0;
      for (auto o : cfg.objectives)
        for (auto s : cfg.seeds) {
          std::printf("%-17s seed %-4llu R(theta) %.6g -> %.6g\n", std::string(rdl::to_string(o)).c_str(),
                      static_cast<unsigned long long>(s), out[i].initial_r_theta, out[i].final_r_theta);
          ++i;
        }
    } else if (sm->parsed()) {
      if (sample_cfg.given()) {
        auto cfg = sample_cfg.load();
        sample_cells.apply(cfg);
        for (auto o : cfg.objectives)
          for (auto s : cfg.seeds) rdl::cmd_sample(cfg, o, s);
      } else {
        if (sample_args.checkpoint.empty() || sample_args.init.empty() || sample_args.output.empty()) {
          throw rdl::InvalidArgument("sample needs --config/--preset, or --checkpoint, --init and --out");
        }
        rdl::cmd_sample(sample_args);
      }
    } else if (ev->parsed()) {
      if (eval_cfg.given()) {
        const auto cfg = eval_cfg.load();
        rdl::cmd_evaluate(cfg);
        std::cout << "wrote " << rdl::paths_for(cfg).eval_dir().string() << '\n';
      } else {
        if (eval_args.model.empty() || eval_args.reference.empty() || eval_args.samples.empty()) {
          throw rdl::InvalidArgument("evaluate needs --config/--preset, or --model, --reference and --samples");
        }
        const std::string table = rdl::cmd_evaluate_files(eval_args);
        if (eval_args.output.empty()) std::cout << table;
      }
    } else if (rp->parsed()) {
      std::cout << rdl::cmd_report(report_cfg.load());
    } else if (run->parsed()) {
      auto cfg = run_cfg.load();
      run_cells.apply(cfg);
      rdl::cmd_generate_data(cfg);
      rdl::cmd_train_all(cfg, run_jobs);
      for (auto o : cfg.objectives)
        for (auto s : cfg.seeds) rdl::cmd_sample(cfg, o, s);
      rdl::cmd_evaluate(cfg);
      std::cout << rdl::cmd_report(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "rdl: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
