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

#include "rdl/evaluation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rdl/error.hpp"

namespace rdl {
namespace {

std::vector<double> normalized_boltzmann(std::vector<double> neg_energy) {
  const double mx = *std::max_element(neg_energy.begin(), neg_energy.end());
  double z = 0.0;
  for (auto& v : neg_energy) {
    v = std::exp(v - mx);
    z += v;
  }
  for (auto& v : neg_energy) v /= z;
  return neg_energy;
}

void check_enumerable(std::size_t nx) {
  if (nx > kMaxEnumerableVisible) {
    throw InvalidArgument("exact distribution over 2^" + std::to_string(nx) +
                          " states is intractable (limit Nx <= " +
                          std::to_string(kMaxEnumerableVisible) + ")");
  }
}

void check_distribution(std::span<const double> p, const char* name) {
  if (p.empty()) throw InvalidArgument(std::string(name) + " is empty");
  double s = 0.0;
  for (double v : p) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) +
                            " has a zero or invalid entry; log ratios need strictly positive "
                            "probabilities");
    }
    s += v;
  }
  const double tol = std::max(1e-12, 1e-15 * static_cast<double>(p.size()));
  if (std::abs(s - 1.0) > tol) throw InvalidArgument(std::string(name) + " does not sum to 1");
}

}  // namespace

Vector energy_residuals(const RbmParams& params, const TargetModel& model,
                        std::span<const BitConfig> xs) {
  require_dims(params.nx() == model.nx(), "RBM and target model differ in Nx");
  Vector r = free_energies(params, xs);
  for (std::size_t k = 0; k < xs.size(); ++k) r(k) -= model.effective_energy(xs[k]);
  return r;
}

double r_theta(const RbmParams& params, const TargetModel& model, std::span<const BitConfig> xs) {
  if (xs.empty()) throw InvalidArgument("R(theta) needs a nonempty validation set");
  const Vector r = energy_residuals(params, model, xs);
  const double mean = r.mean();
  return 2.0 * (r.array() - mean).square().mean();
}

double r_theta(const RbmParams& params, const TargetModel& model, const Dataset& val) {
  return r_theta(params, model, val.samples());
}

// Wasserstein

EmpiricalEnergyDist::EmpiricalEnergyDist(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("energy distribution has a non-finite value");
  std::sort(values_.begin(), values_.end());
}

EmpiricalEnergyDist EmpiricalEnergyDist::of(const TargetModel& model, const Dataset& samples) {
  std::vector<double> e;
  e.reserve(samples.size());
  for (const auto& x : samples.samples()) e.push_back(model.effective_energy(x));
  return EmpiricalEnergyDist(std::move(e));
}

double wasserstein_1d(const EmpiricalEnergyDist& a, const EmpiricalEnergyDist& b) {
  if (a.size() == 0 || b.size() == 0) throw InvalidArgument("Wasserstein distance needs nonempty samples");
  const auto& va = a.values();
  const auto& vb = b.values();
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());

  // Sweep the merged support; between consecutive support points both CDFs
  // are constant.
  std::size_t ia = 0, ib = 0;
  double prev = std::min(va.front(), vb.front());
  double total = 0.0;
  while (ia < va.size() || ib < vb.size()) {
    const double next = (ib >= vb.size() || (ia < va.size() && va[ia] <= vb[ib])) ? va[ia] : vb[ib];
    total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) * (next - prev);
    while (ia < va.size() && va[ia] == next) ++ia;
    while (ib < vb.size() && vb[ib] == next) ++ib;
    prev = next;
  }
  return total;
}

// PCA

std::array<double, 2> PcaModel::project(const BitConfig& x) const {
  require_dims(static_cast<Eigen::Index>(x.size()) == mean.size(), "sample length differs from PCA dimension");
  Vector centered(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) centered(i) = x[i] - mean(i);
  return {components.col(0).dot(centered), components.col(1).dot(centered)};
}

PcaModel fit_pca(const Dataset& train) {
  if (train.size() < 3) throw InvalidArgument("PCA needs at least 3 samples");
  const auto nx = static_cast<Eigen::Index>(train.nx());
  if (nx < 2) throw InvalidArgument("PCA to two components needs Nx >= 2");
  const auto n = static_cast<Eigen::Index>(train.size());
  Matrix x(n, nx);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < nx; ++i) x(k, i) = train[k][i];

  PcaModel pca;
  pca.mean = x.colwise().mean().transpose();
  x.rowwise() -= pca.mean.transpose();
  const Matrix cov = (x.transpose() * x) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

  // Eigenvalues ascend; the top two are the last two.
  const Vector& vals = eig.eigenvalues();
  pca.total_variance = cov.trace();
  const double tol = 1e-12 * std::max(1.0, pca.total_variance);
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) nonzero += vals(i) > tol;
  if (nonzero < 2) {
    throw InvalidArgument("PCA: data has " + std::to_string(nonzero) +
                          " direction(s) with nonzero variance; two are required");
  }

  pca.components.resize(nx, 2);
  for (int c = 0; c < 2; ++c) {
    Vector v = eig.eigenvectors().col(nx - 1 - c);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < nx; ++i)
      if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
    if (v(arg) < 0.0) v = -v;
    pca.components.col(c) = v;
    pca.variances[c] = vals(nx - 1 - c);
  }
  return pca;
}

std::vector<std::array<double, 2>> project(const PcaModel& pca, const Dataset& samples) {
  std::vector<std::array<double, 2>> out;
  out.reserve(samples.size());
  for (const auto& x : samples.samples()) out.push_back(pca.project(x));
  return out;
}

// Hamming

std::vector<std::size_t> HammingHistogram::counts_by_distance() const {
  std::vector<std::size_t> counts(nx + 1, 0);
  for (double d : distances) ++counts[static_cast<std::size_t>(std::llround(d * static_cast<double>(nx)))];
  return counts;
}

HammingHistogram hamming_histogram(const Dataset& samples, std::size_t k, Rng& rng) {
  if (k > samples.size()) {
    throw InvalidArgument("Hamming subsample of " + std::to_string(k) + " exceeds the " +
                          std::to_string(samples.size()) + " available samples");
  }
  if (samples.nx() == 0) throw InvalidArgument("Hamming distances need Nx >= 1");
  // Partial Fisher-Yates: the first k positions become the subsample.
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);

  HammingHistogram h;
  h.nx = samples.nx();
  h.distances.reserve(k * (k - (k ? 1 : 0)) / 2);
  const double inv = 1.0 / static_cast<double>(h.nx);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      h.distances.push_back(static_cast<double>(hamming_distance(samples[idx[a]], samples[idx[b]])) * inv);
  return h;
}

// Exact divergences

DivergenceRecord exact_divergences(std::span<const double> p, std::span<const double> q) {
  check_distribution(p, "p");
  check_distribution(q, "q");
  require_dims(p.size() == q.size(), "distributions have different support sizes");
  const std::size_t n = p.size();
  std::vector<double> u(n);  // ln p/q
  DivergenceRecord r;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::log(p[i]) - std::log(q[i]);
    r.kl_fwd += p[i] * u[i];
    r.kl_rev -= q[i] * u[i];
    r.kl2_fwd += p[i] * u[i] * u[i];
    r.kl2_rev += q[i] * u[i] * u[i];
  }
  // x' ~ p, x ~ q; log of p(x') q(x) / (q(x') p(x)) = u(x') - u(x).
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double w = p[a] * q[b];
      const double l = u[a] - u[b];
      r.ratio_div += w * l * l;
      r.mh_acceptance_expectation += w * std::min(1.0, std::exp(l));
    }
  }
  const double dec = r.decomposition();
  if (std::abs(r.ratio_div - dec) > 1e-9 * std::max(1.0, std::abs(dec))) {
    throw std::logic_error("ratio divergence disagrees with its KL decomposition");
  }
  return r;
}

std::vector<double> exact_model_distribution(const RbmParams& params) {
  check_enumerable(params.nx());
  const std::uint64_t n = std::uint64_t{1} << params.nx();
  std::vector<double> neg(n);
  for (std::uint64_t s = 0; s < n; ++s) neg[s] = -free_energy(params, BitConfig::from_index(s, params.nx()));
  return normalized_boltzmann(std::move(neg));
}

std::vector<double> exact_target_distribution(const TargetModel& model) {
  check_enumerable(model.nx());
  const std::uint64_t n = std::uint64_t{1} << model.nx();
  std::vector<double> neg(n);
  for (std::uint64_t s = 0; s < n; ++s) neg[s] = -model.effective_energy(BitConfig::from_index(s, model.nx()));
  return normalized_boltzmann(std::move(neg));
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  out.n = values.size();
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / static_cast<double>(out.n - 1)) / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace rdl
