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

#ifndef RDL_EXPERIMENT_HPP
#define RDL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdl/target.hpp"
#include "rdl/tempering.hpp"
#include "rdl/training.hpp"

namespace rdl {

// How the target model is obtained. Exactly one of the kind-specific
// parameter groups applies; `file` (a model text file) overrides everything.
struct ModelSpec {
  ModelKind kind = ModelKind::Ising2D;
  double beta = 0.5;
  // ising2d
  std::size_t side = 12;
  double coupling = 1.0;
  bool periodic = true;
  // sk: couplings drawn from the "instance" stream when n > 0
  std::size_t n = 0;
  // mis: random regular graph drawn from the "instance" stream
  std::size_t nodes = 0;
  std::size_t degree = 0;
  double penalty = 2.0;
  // maxcut
  std::string gset;
  // any kind
  std::string file;
};

struct SampleSpec {
  std::size_t count = 16'384;
  int steps = 100;
};

struct EvalSpec {
  std::size_t hamming_k = 1'000;
  std::size_t pca_points = 1'000;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;                    // master seed: instance, PT, subsampling
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};  // training/sampling seeds
  ModelSpec model;
  PtConfig tempering;                        // tempering.seed is derived, not read
  TrainConfig training;                      // training.seed/objective set per run
  std::size_t checkpoint_interval = 0;       // epochs; 0 disables, else a multiple of eval_interval
  std::vector<ObjectiveKind> objectives{ObjectiveKind::ForwardKLD, ObjectiveKind::ReverseKLD,
                                        ObjectiveKind::SummationKLD,
                                        ObjectiveKind::RatioDivergence};
  SampleSpec sampling;
  EvalSpec evaluation;
  std::filesystem::path output_dir = "rdl-out";
  std::filesystem::path base_dir = ".";  // relative paths in the config resolve here

  void validate() const;
};

// Named settings. The "full" scale runs the benchmark-size systems and budgets;
// the "desk" scale shrinks the system and budgets so a run takes minutes.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name, const std::string& scale = "full");

// JSON config. Unknown keys are rejected. An optional "preset" (and "scale")
// key seeds the defaults, which the remaining keys override.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);
// Without the output directory the echo depends only on what is computed,
// so reruns into different directories produce identical artifacts.
std::string config_to_json(const ExperimentConfig& cfg, bool include_output_dir = true);

// Seed derivation labels.
std::uint64_t pt_seed(const ExperimentConfig& cfg);
std::uint64_t instance_seed(const ExperimentConfig& cfg);
std::uint64_t train_seed(std::uint64_t run_seed);
std::uint64_t sample_seed(std::uint64_t run_seed, ObjectiveKind objective);

TargetModel build_model(const ExperimentConfig& cfg);

// Output layout, relative to cfg.output_dir.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path model() const { return root / "model.txt"; }
  std::filesystem::path train_data() const { return root / "data" / "train.rdd"; }
  std::filesystem::path val_data() const { return root / "data" / "val.rdd"; }
  std::filesystem::path run_dir(ObjectiveKind o, std::uint64_t seed) const;
  std::filesystem::path params(ObjectiveKind o, std::uint64_t seed) const { return run_dir(o, seed) / "params.rdp"; }
  std::filesystem::path metrics(ObjectiveKind o, std::uint64_t seed) const { return run_dir(o, seed) / "metrics.csv"; }
  std::filesystem::path timing(ObjectiveKind o, std::uint64_t seed) const { return run_dir(o, seed) / "timing.csv"; }
  std::filesystem::path samples(ObjectiveKind o, std::uint64_t seed) const { return run_dir(o, seed) / "samples.rdd"; }
  std::filesystem::path eval_dir() const { return root / "eval"; }
  std::filesystem::path manifest(const std::string& tag) const { return root / "manifests" / (tag + ".json"); }
};

RunPaths paths_for(const ExperimentConfig& cfg);

// Command entry points. Each throws rdl::Error on failure and removes any
// outputs it had partially written.
struct GenerateDataSummary {
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::vector<double> swap_rates;
};
GenerateDataSummary cmd_generate_data(const ExperimentConfig& cfg);

struct TrainSummary {
  double initial_r_theta = 0.0;
  double final_r_theta = 0.0;
  std::size_t metric_rows = 0;
};
TrainSummary cmd_train(const ExperimentConfig& cfg, ObjectiveKind objective, std::uint64_t seed);

// Every (objective, seed) cell, fanned out over `jobs` worker threads. Each
// cell is independent, so results do not depend on `jobs`.
std::vector<TrainSummary> cmd_train_all(const ExperimentConfig& cfg, unsigned jobs);

struct SampleArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path init;
  std::filesystem::path output;
  int steps = 100;
  std::size_t count = 0;  // 0 keeps the init size
  std::uint64_t seed = 0;
};
void cmd_sample(const SampleArgs& args);
void cmd_sample(const ExperimentConfig& cfg, ObjectiveKind objective, std::uint64_t seed);

// Writes eval/metrics.csv (method,seed,metric,value), eval/summary.csv
// (method,metric,mean,stderr,n), eval/hamming.csv (source,seed,distance,count)
// and eval/pca.csv (source,seed,pc1,pc2). Cells without samples are skipped.
void cmd_evaluate(const ExperimentConfig& cfg);

// Ad hoc comparison: one row per sample file of
// (file,wasserstein[,r_theta]) against a reference set.
struct AdHocEvalArgs {
  std::filesystem::path model;
  std::filesystem::path reference;
  std::vector<std::filesystem::path> samples;
  std::filesystem::path checkpoint;  // optional, enables r_theta on `val`
  std::filesystem::path val;
  std::filesystem::path output;      // CSV; empty writes to stdout
};
std::string cmd_evaluate_files(const AdHocEvalArgs& args);

// Renders eval/summary.csv as report.md (methods as columns) and returns it.
std::string cmd_report(const ExperimentConfig& cfg);

std::string tool_version();

}  // namespace rdl

#endif  // RDL_EXPERIMENT_HPP
