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

#ifndef RDL_TEMPERING_HPP
#define RDL_TEMPERING_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rdl/bits.hpp"
#include "rdl/dataset.hpp"
#include "rdl/rng.hpp"
#include "rdl/target.hpp"

namespace rdl {

// Strictly increasing inverse temperatures with a constant ratio between
// neighbours.
struct TemperatureLadder {
  std::vector<double> betas;

  std::size_t size() const { return betas.size(); }
  double min() const { return betas.front(); }
  double max() const { return betas.back(); }
};

// beta_i = beta_min * exp(i / (n - 1) * ln(beta_max / beta_min)), i = 0..n-1,
// with both endpoints set exactly.
TemperatureLadder build_ladder(std::size_t n, double beta_min, double beta_max);

// Exchange Monte Carlo protocol. One MCS is Nx sequential single-bit flip
// proposals (sites in index order). Every swap_interval_mcs MCS adjacent
// replicas are offered an exchange, alternating between even pairs (0,1),(2,3)..
// and odd pairs (1,2),(3,4).. on successive swap rounds. Every
// record_interval_mcs MCS the largest-beta replica is recorded.
struct PtConfig {
  std::size_t n_replicas = 4;
  double beta_min = 0.25;
  double beta_max = 0.5;
  std::uint64_t total_mcs = 1'000'000;
  std::uint64_t swap_interval_mcs = 1;
  std::uint64_t record_interval_mcs = 10;
  std::uint64_t burn_in_records = 10'000;
  std::size_t train_size = 16'384;
  std::size_t val_size = 1'024;
  std::uint64_t seed = 0;

  std::uint64_t recorded_count() const;
  // Throws InvalidArgument when the protocol cannot produce the requested
  // splits (train_size + val_size > recorded_count - burn_in_records) or a
  // field is out of range.
  void validate() const;
};

struct SweepResult {
  std::size_t accepted = 0;
  double raw_energy_change = 0.0;
};

// One MCS of Metropolis single-flip dynamics at inverse temperature `beta`
// (the model's own beta is ignored): accept with min(1, exp(-beta * dE_raw)).
SweepResult metropolis_sweep(const TargetModel& model, double beta, BitConfig& x, Rng& rng);

struct ReplicaSet {
  TemperatureLadder ladder;
  std::vector<BitConfig> states;     // states[k] runs at ladder.betas[k]
  std::vector<double> raw_energies;  // raw_energy(states[k])
};

// min(1, exp((beta_i - beta_j) * (E_i - E_j))) on raw energies.
double swap_acceptance_probability(double beta_i, double beta_j, double e_i, double e_j);

// Offers an exchange of the configurations at ladder positions i and j.
// Only adjacent positions are allowed. Returns whether the swap happened.
bool swap_attempt(ReplicaSet& replicas, std::size_t i, std::size_t j, Rng& rng);

struct PtStats {
  std::vector<std::uint64_t> swap_attempts;  // per adjacent pair (k, k+1)
  std::vector<std::uint64_t> swap_accepts;
  std::vector<double> flip_acceptance;       // per replica, fraction of accepted flips
  std::vector<double> record_energies;       // raw energy of every recorded state

  double swap_rate(std::size_t pair) const {
    return swap_attempts[pair] ? static_cast<double>(swap_accepts[pair]) / swap_attempts[pair] : 0.0;
  }
};

struct PtResult {
  Dataset train;
  Dataset val;
  PtStats stats;
};

// Runs the full protocol. Replica k uses the stream seed-split "replica/k"
// (initial state and flips); swaps use "swap". Records come from the
// largest-beta replica, which must equal model.beta(). Training split is
// records [burn_in, burn_in + train_size); validation is the final val_size
// records.
PtResult generate_dataset(const TargetModel& model, const PtConfig& cfg);

}  // namespace rdl

#endif  // RDL_TEMPERING_HPP
