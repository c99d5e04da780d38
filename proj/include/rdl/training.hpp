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

#ifndef RDL_TRAINING_HPP
#define RDL_TRAINING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "rdl/dataset.hpp"
#include "rdl/rbm.hpp"
#include "rdl/target.hpp"

namespace rdl {

enum class ObjectiveKind { ForwardKLD, ReverseKLD, SummationKLD, RatioDivergence };

std::string_view to_string(ObjectiveKind kind);
// Accepts the canonical names (forward-kld, reverse-kld, summation-kld,
// ratio-divergence) and the short forms fwd, rev, sum, rd.
ObjectiveKind parse_objective(std::string_view text);

struct Objective {
  ObjectiveKind kind = ObjectiveKind::RatioDivergence;
  int k_gibbs = 1;  // block Gibbs steps per update for the persistent chains
};

// A minibatch loss estimate with its gradient. Self-samples and any centering
// constants are held fixed when differentiating; only the explicit F(x; theta)
// terms carry gradient.
struct ObjectiveValue {
  double loss = 0.0;
  FreeEnergyGrad grad;
};

// Forward KLD: mean_data dF - mean_chains dF. The reported loss is the
// contrastive gap mean_data F - mean_chains F, whose gradient this is; the KLD
// itself is not computable without Z.
ObjectiveValue grad_forward_kld(const RbmParams& params, std::span<const BitConfig> data,
                                std::span<const BitConfig> chains);

// Reverse KLD through the surrogate (1/2B) sum (E(x) - F(x) - C)^2 over
// self-samples, C = batch mean of (E - F). E is the model's effective energy.
ObjectiveValue loss_and_grad_reverse_kld(const RbmParams& params, const TargetModel& model,
                                         std::span<const BitConfig> chains);

// Ratio divergence over all data x self-sample pairs:
//   (1/B^2) sum_{x' in data} sum_{x in chains} (r(x') - r(x))^2,  r = F - E,
// evaluated in O(B) through first and second moments of r.
ObjectiveValue grad_ratio_divergence(const RbmParams& params, const TargetModel& model,
                                     std::span<const BitConfig> data,
                                     std::span<const BitConfig> chains);

// Forward plus reverse, unit weights.
ObjectiveValue grad_summation_kld(const RbmParams& params, const TargetModel& model,
                                  std::span<const BitConfig> data,
                                  std::span<const BitConfig> chains);

ObjectiveValue evaluate_objective(ObjectiveKind kind, const RbmParams& params,
                                  const TargetModel& model, std::span<const BitConfig> data,
                                  std::span<const BitConfig> chains);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  FreeEnergyGrad first_moment;
  FreeEnergyGrad second_moment;
  std::uint64_t step_count = 0;
  AdamConfig config;

  static AdamState for_params(const RbmParams& params, AdamConfig config = {});
};

// Bias-corrected Adam: theta -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(RbmParams& params, const FreeEnergyGrad& grad, AdamState& state);

// Self-sample set for PCD. States persist across parameter updates.
struct PersistentChains {
  std::vector<BitConfig> states;

  static PersistentChains uniform(std::size_t count, std::size_t nx, Rng& rng);
};

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t minibatch = 128;
  std::uint64_t seed = 0;
  Objective objective;
  std::size_t eval_interval = 10;
  std::size_t hidden = 0;           // 0 means Nh = Nx
  double init_stddev = 0.01;        // W ~ N(0, init_stddev^2), b = c = 0
  std::size_t chain_count = 0;      // 0 means the training-set size
  bool reset_chains_each_epoch = false;
  AdamConfig adam;

  void validate(std::size_t dataset_size) const;
};

struct MetricsRecord {
  std::size_t epoch = 0;
  double objective = 0.0;  // mean minibatch loss over the epoch
  double r_theta = 0.0;    // on the validation set
  double wall_seconds = 0.0;
};

struct TrainResult {
  RbmParams initial_params;
  RbmParams params;
  double initial_r_theta = 0.0;
  std::vector<MetricsRecord> metrics;
};

using MetricsCallback = std::function<void(const MetricsRecord&, const RbmParams&)>;

// PCD training loop. Streams derive from cfg.seed: "init" (weights),
// "chains" (initial self-samples, uniform bits), "shuffle" (epoch
// permutations), "bgs" (chain updates). Each epoch shuffles the data and walks
// it in minibatches; minibatch j is paired with the fixed chain slice j, which
// is first advanced k_gibbs block Gibbs steps. Metrics are taken at every
// epoch divisible by eval_interval. Fully serial and deterministic.
TrainResult train(const Dataset& data, const Dataset& val, const TargetModel& model,
                  const TrainConfig& cfg, const MetricsCallback& on_eval = {});

// Advances copies of the init states `steps` block Gibbs sweeps. With
// count > 0 the init states are cycled to produce exactly `count` samples;
// count == 0 keeps the init size.
Dataset generate_samples(const RbmParams& params, const Dataset& init, int steps, Rng& rng,
                         std::size_t count = 0);

}  // namespace rdl

#endif  // RDL_TRAINING_HPP
