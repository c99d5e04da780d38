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

#ifndef RDL_EVALUATION_HPP
#define RDL_EVALUATION_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rdl/dataset.hpp"
#include "rdl/rbm.hpp"
#include "rdl/rng.hpp"
#include "rdl/target.hpp"

namespace rdl {

// r(y) = F(y; theta) - E(y) with E the effective target energy.
Vector energy_residuals(const RbmParams& params, const TargetModel& model,
                        std::span<const BitConfig> xs);

// Mean squared error of energy differences over all ordered pairs of the set,
//   (1/n^2) sum_{x', x} ((F(x') - F(x)) - (E(x') - E(x)))^2,
// computed as twice the population variance of the residuals.
double r_theta(const RbmParams& params, const TargetModel& model, std::span<const BitConfig> xs);
double r_theta(const RbmParams& params, const TargetModel& model, const Dataset& val);

// Sorted sample of scalar energies.
class EmpiricalEnergyDist {
 public:
  explicit EmpiricalEnergyDist(std::vector<double> values);

  // Effective energies of every sample.
  static EmpiricalEnergyDist of(const TargetModel& model, const Dataset& samples);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Integral of |F_a(t) - F_b(t)| dt between the two empirical CDFs, exact.
double wasserstein_1d(const EmpiricalEnergyDist& a, const EmpiricalEnergyDist& b);

struct PcaModel {
  Vector mean;                      // length Nx
  Matrix components;                // Nx x 2, orthonormal columns
  std::array<double, 2> variances;  // eigenvalues of the two components
  double total_variance = 0.0;      // trace of the covariance

  std::array<double, 2> project(const BitConfig& x) const;
};

// Top-2 principal components of the bit matrix (population covariance).
// Each component is signed so its largest-magnitude entry is positive (first
// such entry on ties). Throws InvalidArgument for fewer than 3 samples or
// fewer than 2 directions with nonzero variance.
PcaModel fit_pca(const Dataset& train);

std::vector<std::array<double, 2>> project(const PcaModel& pca, const Dataset& samples);

// Normalized pairwise Hamming distances d_H / Nx over a uniform subsample of
// k samples drawn without replacement, pairs in (mu < nu) order.
struct HammingHistogram {
  std::size_t nx = 0;
  std::vector<double> distances;

  // counts[d] = number of pairs at Hamming distance d, d = 0..Nx.
  std::vector<std::size_t> counts_by_distance() const;
};

HammingHistogram hamming_histogram(const Dataset& samples, std::size_t k, Rng& rng);

// Exact divergences between a target distribution p and a model q over the
// same finite state space. All entries must be strictly positive.
struct DivergenceRecord {
  double kl_fwd = 0.0;   // KL(p || q)
  double kl_rev = 0.0;   // KL(q || p)
  double kl2_fwd = 0.0;  // sum p (ln p/q)^2
  double kl2_rev = 0.0;  // sum q (ln q/p)^2
  double ratio_div = 0.0;
  double mh_acceptance_expectation = 0.0;

  // 2 KL(p||q) KL(q||p) + KL2(p||q) + KL2(q||p), equal to ratio_div.
  double decomposition() const { return 2.0 * kl_fwd * kl_rev + kl2_fwd + kl2_rev; }
};

// Direct O(n^2) summation of the pairwise quantities; throws std::logic_error
// if ratio_div disagrees with its decomposition beyond rounding.
DivergenceRecord exact_divergences(std::span<const double> p, std::span<const double> q);

// Normalized Boltzmann weights over all 2^Nx visible states, state index s
// mapped to bits by BitConfig::from_index. Limited to Nx <= 20.
std::vector<double> exact_model_distribution(const RbmParams& params);
std::vector<double> exact_target_distribution(const TargetModel& model);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
  std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> values);

}  // namespace rdl

#endif  // RDL_EVALUATION_HPP
