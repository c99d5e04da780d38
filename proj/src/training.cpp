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

#include "rdl/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rdl/error.hpp"
#include "rdl/evaluation.hpp"

namespace rdl {
namespace {

Vector effective_energies(const TargetModel& model, std::span<const BitConfig> xs) {
  Vector e(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) e(k) = model.effective_energy(xs[k]);
  return e;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::ForwardKLD: return "forward-kld";
    case ObjectiveKind::ReverseKLD: return "reverse-kld";
    case ObjectiveKind::SummationKLD: return "summation-kld";
    case ObjectiveKind::RatioDivergence: return "ratio-divergence";
  }
  return "unknown";
}

ObjectiveKind parse_objective(std::string_view t) {
  if (t == "forward-kld" || t == "fwd" || t == "forward") return ObjectiveKind::ForwardKLD;
  if (t == "reverse-kld" || t == "rev" || t == "reverse") return ObjectiveKind::ReverseKLD;
  if (t == "summation-kld" || t == "sum" || t == "summation") return ObjectiveKind::SummationKLD;
  if (t == "ratio-divergence" || t == "rd") return ObjectiveKind::RatioDivergence;
  throw InvalidArgument("unknown objective '" + std::string(t) + "'");
}

// Objectives

ObjectiveValue grad_forward_kld(const RbmParams& params, std::span<const BitConfig> data,
                                std::span<const BitConfig> chains) {
  if (data.empty() || chains.empty()) throw InvalidArgument("forward KLD needs nonempty batches");
  if (data.size() != chains.size()) throw DimensionError("data and chain batches differ in size");
  const double nd = static_cast<double>(data.size());
  const double nc = static_cast<double>(chains.size());
  ObjectiveValue out;
  out.loss = free_energies(params, data).mean() - free_energies(params, chains).mean();
  out.grad = weighted_free_energy_grad(params, data, Vector::Constant(data.size(), 1.0 / nd));
  out.grad -= weighted_free_energy_grad(params, chains, Vector::Constant(chains.size(), 1.0 / nc));
  return out;
}

ObjectiveValue loss_and_grad_reverse_kld(const RbmParams& params, const TargetModel& model,
                                         std::span<const BitConfig> chains) {
  if (chains.empty()) throw InvalidArgument("reverse KLD needs a nonempty self-sample batch");
  const double b = static_cast<double>(chains.size());
  const Vector u = effective_energies(model, chains) - free_energies(params, chains);
  const Vector centered = u.array() - u.mean();
  ObjectiveValue out;
  out.loss = 0.5 * centered.squaredNorm() / b;
  out.grad = weighted_free_energy_grad(params, chains, -centered / b);
  return out;
}

ObjectiveValue grad_ratio_divergence(const RbmParams& params, const TargetModel& model,
                                     std::span<const BitConfig> data,
                                     std::span<const BitConfig> chains) {
  if (data.empty() || chains.empty()) throw InvalidArgument("ratio divergence needs nonempty batches");
  if (data.size() != chains.size()) throw DimensionError("data and chain batches differ in size");
  const double b = static_cast<double>(data.size());
  const Vector rd = free_energies(params, data) - effective_energies(model, data);
  const Vector rc = free_energies(params, chains) - effective_energies(model, chains);
  const double md = rd.mean();
  const double mc = rc.mean();
  ObjectiveValue out;
  out.loss = rd.squaredNorm() / b + rc.squaredNorm() / b - 2.0 * md * mc;
  out.grad = weighted_free_energy_grad(params, data, (2.0 / b) * (rd.array() - mc).matrix());
  out.grad += weighted_free_energy_grad(params, chains, (2.0 / b) * (rc.array() - md).matrix());
  return out;
}

ObjectiveValue grad_summation_kld(const RbmParams& params, const TargetModel& model,
                                  std::span<const BitConfig> data,
                                  std::span<const BitConfig> chains) {
  ObjectiveValue fwd = grad_forward_kld(params, data, chains);
  const ObjectiveValue rev = loss_and_grad_reverse_kld(params, model, chains);
  fwd.loss += rev.loss;
  fwd.grad += rev.grad;
  return fwd;
}

ObjectiveValue evaluate_objective(ObjectiveKind kind, const RbmParams& params,
                                  const TargetModel& model, std::span<const BitConfig> data,
                                  std::span<const BitConfig> chains) {
  switch (kind) {
    case ObjectiveKind::ForwardKLD: return grad_forward_kld(params, data, chains);
    case ObjectiveKind::ReverseKLD: return loss_and_grad_reverse_kld(params, model, chains);
    case ObjectiveKind::SummationKLD: return grad_summation_kld(params, model, data, chains);
    case ObjectiveKind::RatioDivergence: return grad_ratio_divergence(params, model, data, chains);
  }
  throw InvalidArgument("unknown objective");
}

// Adam

AdamState AdamState::for_params(const RbmParams& params, AdamConfig config) {
  return {FreeEnergyGrad::zeros(params.nx(), params.nh()),
          FreeEnergyGrad::zeros(params.nx(), params.nh()), 0, config};
}

void adam_step(RbmParams& params, const FreeEnergyGrad& grad, AdamState& s) {
  require_dims(grad.nx() == params.nx() && grad.nh() == params.nh() &&
                   grad.same_shape(s.first_moment),
               "Adam gradient shape differs from parameters");
  const AdamConfig& c = s.config;
  ++s.step_count;
  const double t = static_cast<double>(s.step_count);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& m, auto& v, const auto& g) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    return (-c.learning_rate * (m / corr1).array() /
            ((v / corr2).array().sqrt() + c.epsilon))
        .matrix()
        .eval();
  };
  FreeEnergyGrad step;
  step.d_weights = update(s.first_moment.d_weights, s.second_moment.d_weights, grad.d_weights);
  step.d_visible_bias =
      update(s.first_moment.d_visible_bias, s.second_moment.d_visible_bias, grad.d_visible_bias);
  step.d_hidden_bias =
      update(s.first_moment.d_hidden_bias, s.second_moment.d_hidden_bias, grad.d_hidden_bias);
  params.add(step);
}

// Training loop

PersistentChains PersistentChains::uniform(std::size_t count, std::size_t nx, Rng& rng) {
  PersistentChains pc;
  pc.states.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    BitConfig x(nx);
    for (std::size_t i = 0; i < nx; ++i) x.set(i, rng.bernoulli(0.5));
    pc.states.push_back(std::move(x));
  }
  return pc;
}

void TrainConfig::validate(std::size_t dataset_size) const {
  if (dataset_size == 0) throw InvalidArgument("training set is empty");
  if (minibatch < 1 || minibatch > dataset_size) {
    throw InvalidArgument("minibatch must be in [1, training-set size]");
  }
  if (objective.k_gibbs < 1) throw InvalidArgument("k_gibbs must be at least 1");
  if (eval_interval < 1) throw InvalidArgument("eval_interval must be at least 1");
  if (chain_count != 0 && chain_count != dataset_size) {
    throw InvalidArgument("chain_count must equal the training-set size (or 0)");
  }
  if (!(init_stddev >= 0.0)) throw InvalidArgument("init_stddev must be non-negative");
}

TrainResult train(const Dataset& data, const Dataset& val, const TargetModel& model,
                  const TrainConfig& cfg, const MetricsCallback& on_eval) {
  cfg.validate(data.size());
  require_dims(data.nx() == model.nx(), "dataset Nx differs from the model's Nx");
  require_dims(val.empty() || val.nx() == model.nx(), "validation Nx differs from the model's Nx");

  const std::size_t nx = model.nx();
  const std::size_t nh = cfg.hidden ? cfg.hidden : nx;
  const std::size_t m = data.size();
  const std::size_t b = cfg.minibatch;
  const std::size_t n_batches = (m + b - 1) / b;

  Rng master(cfg.seed);
  Rng init_rng = master.split("init");
  Rng chain_rng = master.split("chains");
  Rng shuffle_rng = master.split("shuffle");
  Rng bgs_rng = master.split("bgs");

  RbmParams params = RbmParams::random_normal(nx, nh, cfg.init_stddev, init_rng);
  auto measure = [&](const RbmParams& p) {
    return val.empty() ? std::numeric_limits<double>::quiet_NaN() : r_theta(p, model, val);
  };
  TrainResult result{params, params, measure(params), {}};
  if (cfg.epochs == 0) return result;

  PersistentChains chains = PersistentChains::uniform(m, nx, chain_rng);
  AdamState adam = AdamState::for_params(params, cfg.adam);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BitConfig> batch;
  batch.reserve(b);

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.reset_chains_each_epoch && epoch > 1) chains = PersistentChains::uniform(m, nx, chain_rng);
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0;
    for (std::size_t j = 0; j < n_batches; ++j) {
      const std::size_t lo = j * b;
      const std::size_t hi = std::min(m, lo + b);
      batch.clear();
      for (std::size_t k = lo; k < hi; ++k) batch.push_back(data[order[k]]);
      std::span<BitConfig> slice(chains.states.data() + lo, hi - lo);
      block_gibbs_chains(params, slice, cfg.objective.k_gibbs, bgs_rng);

      const ObjectiveValue v = evaluate_objective(cfg.objective.kind, params, model, batch, slice);
      loss_sum += v.loss;
      adam_step(params, v.grad, adam);
    }

    if (epoch % cfg.eval_interval == 0) {
      MetricsRecord rec;
      rec.epoch = epoch;
      rec.objective = loss_sum / static_cast<double>(n_batches);
      rec.r_theta = measure(params);
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.metrics.push_back(rec);
      if (on_eval) on_eval(rec, params);
    }
  }
  result.params = params;
  return result;
}

Dataset generate_samples(const RbmParams& params, const Dataset& init, int steps, Rng& rng,
                         std::size_t count) {
  if (init.empty()) throw InvalidArgument("sample generation needs a nonempty initial set");
  if (steps < 0) throw InvalidArgument("steps must be non-negative");
  require_dims(init.nx() == params.nx(), "initial states differ from the RBM's Nx");
  const std::size_t n = count ? count : init.size();
  std::vector<BitConfig> states;
  states.reserve(n);
  for (std::size_t k = 0; k < n; ++k) states.push_back(init[k % init.size()]);
  block_gibbs_chains(params, states, steps, rng);
  Dataset out(params.nx(), std::move(states));
  out.meta.split = "samples";
  return out;
}

}  // namespace rdl
