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

#include "rdl/tempering.hpp"

#include <cmath>
#include <string>

#include "rdl/error.hpp"

namespace rdl {

TemperatureLadder build_ladder(std::size_t n, double beta_min, double beta_max) {
  if (n < 2) throw InvalidArgument("temperature ladder needs at least 2 replicas");
  if (!(beta_min > 0.0) || !(beta_max > beta_min) || !std::isfinite(beta_max)) {
    throw InvalidArgument("temperature ladder needs 0 < beta_min < beta_max");
  }
  TemperatureLadder ladder;
  ladder.betas.resize(n);
  const double log_ratio = std::log(beta_max / beta_min);
  for (std::size_t i = 0; i < n; ++i) {
    ladder.betas[i] = beta_min * std::exp(static_cast<double>(i) / static_cast<double>(n - 1) * log_ratio);
  }
  ladder.betas.front() = beta_min;
  ladder.betas.back() = beta_max;
  return ladder;
}

std::uint64_t PtConfig::recorded_count() const {
  return record_interval_mcs ? total_mcs / record_interval_mcs : 0;
}

void PtConfig::validate() const {
  if (n_replicas < 2) throw InvalidArgument("exchange MC needs at least 2 replicas");
  if (!(beta_min > 0.0) || !(beta_max > beta_min)) {
    throw InvalidArgument("exchange MC needs 0 < beta_min < beta_max");
  }
  if (swap_interval_mcs < 1 || record_interval_mcs < 1) {
    throw InvalidArgument("swap and record intervals must be at least 1 MCS");
  }
  if (train_size < 1 || val_size < 1) throw InvalidArgument("split sizes must be positive");
  const std::uint64_t records = recorded_count();
  if (burn_in_records > records || train_size + val_size > records - burn_in_records) {
    throw InvalidArgument("infeasible exchange MC sizes: " + std::to_string(records) +
                          " records minus " + std::to_string(burn_in_records) +
                          " burn-in cannot supply " + std::to_string(train_size) + " train + " +
                          std::to_string(val_size) + " validation samples");
  }
}

SweepResult metropolis_sweep(const TargetModel& model, double beta, BitConfig& x, Rng& rng) {
  SweepResult out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d_raw = model.raw_energy_delta(x, i);
    const double d = beta * d_raw;
    if (d <= 0.0 || rng.uniform() < std::exp(-d)) {
      x.flip(i);
      ++out.accepted;
      out.raw_energy_change += d_raw;
    }
  }
  return out;
}

double swap_acceptance_probability(double beta_i, double beta_j, double e_i, double e_j) {
  const double expo = (beta_i - beta_j) * (e_i - e_j);
  return expo >= 0.0 ? 1.0 : std::exp(expo);
}

bool swap_attempt(ReplicaSet& r, std::size_t i, std::size_t j, Rng& rng) {
  if (i >= r.states.size() || j >= r.states.size()) throw InvalidArgument("replica index out of range");
  if ((i > j ? i - j : j - i) != 1) throw InvalidArgument("swaps are only allowed between adjacent replicas");
  const double p = swap_acceptance_probability(r.ladder.betas[i], r.ladder.betas[j],
                                               r.raw_energies[i], r.raw_energies[j]);
  if (p < 1.0 && rng.uniform() >= p) return false;
  std::swap(r.states[i], r.states[j]);
  std::swap(r.raw_energies[i], r.raw_energies[j]);
  return true;
}

PtResult generate_dataset(const TargetModel& model, const PtConfig& cfg) {
  cfg.validate();
  if (std::abs(cfg.beta_max - model.beta()) > 1e-12 * model.beta()) {
    throw InvalidArgument("ladder beta_max must equal the model's beta (the recorded temperature)");
  }

  const std::size_t n = cfg.n_replicas;
  const std::size_t nx = model.nx();
  Rng master(cfg.seed);
  std::vector<Rng> replica_rng;
  replica_rng.reserve(n);
  for (std::size_t k = 0; k < n; ++k) replica_rng.push_back(master.split("replica/" + std::to_string(k)));
  Rng swap_rng = master.split("swap");

  ReplicaSet rs;
  rs.ladder = build_ladder(n, cfg.beta_min, cfg.beta_max);
  for (std::size_t k = 0; k < n; ++k) {
    BitConfig x(nx);
    for (std::size_t i = 0; i < nx; ++i) x.set(i, replica_rng[k].bernoulli(0.5));
    rs.raw_energies.push_back(model.raw_energy(x));
    rs.states.push_back(std::move(x));
  }

  PtResult out{Dataset(nx), Dataset(nx), {}};
  out.stats.swap_attempts.assign(n - 1, 0);
  out.stats.swap_accepts.assign(n - 1, 0);
  std::vector<std::uint64_t> flips_accepted(n, 0);

  const std::uint64_t records = cfg.recorded_count();
  const std::uint64_t train_end = cfg.burn_in_records + cfg.train_size;
  const std::uint64_t val_begin = records - cfg.val_size;
  out.stats.record_energies.reserve(records);
  out.train.mutable_samples().reserve(cfg.train_size);
  out.val.mutable_samples().reserve(cfg.val_size);

  std::uint64_t swap_round = 0;
  std::uint64_t record = 0;
  for (std::uint64_t t = 1; t <= cfg.total_mcs; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto res = metropolis_sweep(model, rs.ladder.betas[k], rs.states[k], replica_rng[k]);
      flips_accepted[k] += res.accepted;
    }
    if (t % cfg.swap_interval_mcs == 0) {
      // Exact energies for the exchange test; the sweeps only accumulate deltas.
      for (std::size_t k = 0; k < n; ++k) rs.raw_energies[k] = model.raw_energy(rs.states[k]);
      for (std::size_t k = swap_round % 2; k + 1 < n; k += 2) {
        ++out.stats.swap_attempts[k];
        if (swap_attempt(rs, k, k + 1, swap_rng)) ++out.stats.swap_accepts[k];
      }
      ++swap_round;
    }
    if (t % cfg.record_interval_mcs == 0) {
      const BitConfig& target = rs.states.back();
      out.stats.record_energies.push_back(model.raw_energy(target));
      if (record >= cfg.burn_in_records && record < train_end) out.train.push_back(target);
      if (record >= val_begin) out.val.push_back(target);
      ++record;
    }
  }

  out.stats.flip_acceptance.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.stats.flip_acceptance[k] =
        static_cast<double>(flips_accepted[k]) / static_cast<double>(cfg.total_mcs * nx);
  }
  out.train.meta.split = "train";
  out.val.meta.split = "val";
  return out;
}

}  // namespace rdl
