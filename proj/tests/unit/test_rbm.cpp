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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "rdl/error.hpp"
#include "rdl/evaluation.hpp"
#include "rdl/rbm.hpp"

using namespace rdl;
using rdl::test::random_bits;
using rdl::test::random_params;
using rdl::test::rel_err;

namespace {

// -log sum_h exp(-E(x, h)) by brute force over the hidden layer.
double free_energy_by_enumeration(const RbmParams& p, const BitConfig& x) {
  const std::size_t nh = p.nh();
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << nh); ++s) {
    terms.push_back(-joint_energy(p, x, HiddenConfig::from_index(s, nh)));
    mx = std::max(mx, terms.back());
  }
  double z = 0.0;
  for (double t : terms) z += std::exp(t - mx);
  return -(mx + std::log(z));
}

double& entry(FreeEnergyGrad& g, std::size_t k) {
  const auto nw = static_cast<std::size_t>(g.d_weights.size());
  if (k < nw) return g.d_weights.data()[k];
  k -= nw;
  if (k < g.nx()) return g.d_visible_bias(k);
  return g.d_hidden_bias(k - g.nx());
}

RbmParams from_triple(const FreeEnergyGrad& t) { return RbmParams(t.d_weights, t.d_visible_bias, t.d_hidden_bias); }

}  // namespace

TEST_CASE("free energy marginalizes the hidden layer") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t nx = 1 + rng.below(8), nh = 1 + rng.below(10);
    const double scale = trial % 3 == 0 ? 3.0 : 0.7;
    const RbmParams p = random_params(nx, nh, scale, rng);
    const BitConfig x = random_bits(nx, rng);
    CHECK(rel_err(free_energy(p, x), free_energy_by_enumeration(p, x)) < 1e-12);
  }
}

TEST_CASE("free energy stays finite for saturated activations") {
  Rng rng(2);
  const RbmParams p = random_params(5, 4, 500.0, rng);
  const BitConfig x = random_bits(5, rng);
  CHECK(std::isfinite(free_energy(p, x)));
  CHECK(rel_err(free_energy(p, x), free_energy_by_enumeration(p, x)) < 1e-12);
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("free-energy gradient matches central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t nx = 2 + rng.below(5), nh = 1 + rng.below(5);
    const RbmParams p = random_params(nx, nh, 0.8, rng);
    const BitConfig x = random_bits(nx, rng);
    FreeEnergyGrad g = free_energy_grad(p, x);
    FreeEnergyGrad t = p.as_triple();
    const std::size_t n = nx * nh + nx + nh;
    const double h = 1e-5;
    for (std::size_t k = 0; k < n; ++k) {
      FreeEnergyGrad up = t, down = t;
      entry(up, k) += h;
      entry(down, k) -= h;
      const double fd = (free_energy(from_triple(up), x) - free_energy(from_triple(down), x)) / (2 * h);
      CHECK(rel_err(entry(g, k), fd) < 1e-5);
    }
  }
}

TEST_CASE("batched free energies and weighted gradients agree with single-sample forms") {
  Rng rng(8);
  const RbmParams p = random_params(6, 4, 1.0, rng);
  const auto xs = rdl::test::random_batch(9, 6, rng);
  const Vector f = free_energies(p, xs);
  Vector coeff(9);
  FreeEnergyGrad expect = FreeEnergyGrad::zeros(6, 4);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    CHECK(rel_err(f(k), free_energy(p, xs[k])) < 1e-13);
    coeff(k) = rng.normal();
    expect += coeff(k) * free_energy_grad(p, xs[k]);
  }
  CHECK((weighted_free_energy_grad(p, xs, coeff) - expect).max_abs() < 1e-12);
}

TEST_CASE("conditionals match joint enumeration") {
  Rng rng(9);
  const RbmParams p = random_params(3, 2, 1.0, rng);
  const BitConfig x = random_bits(3, rng);
  const Vector ph = hidden_conditional(p, x);
  double z = 0.0, on0 = 0.0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const double w = std::exp(-joint_energy(p, x, HiddenConfig::from_index(s, 2)));
    z += w;
    if (s & 1) on0 += w;
  }
  CHECK(rel_err(ph(0), on0 / z) < 1e-12);

  const HiddenConfig h{1, 0};
  const Vector px = visible_conditional(p, h);
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = p.visible_bias()(i) + p.weights()(i, 0);
    CHECK(rel_err(px(i), 1.0 / (1.0 + std::exp(-a))) < 1e-12);
  }
}

TEST_CASE("exact log partition matches double enumeration") {
  Rng rng(4);
  const RbmParams p = random_params(4, 3, 1.0, rng);
  double z = 0.0;
  for (std::uint64_t s = 0; s < 16; ++s)
    for (std::uint64_t t = 0; t < 8; ++t)
      z += std::exp(-joint_energy(p, BitConfig::from_index(s, 4), HiddenConfig::from_index(t, 3)));
  CHECK(rel_err(exact_log_partition(p), std::log(z)) < 1e-12);
  CHECK_THROWS_AS(exact_log_partition(RbmParams::zeros(21, 1)), InvalidArgument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(RbmParams::zeros(0, 3), DimensionError);
  CHECK_THROWS_AS(RbmParams(Matrix::Zero(3, 2), Vector::Zero(2), Vector::Zero(2)), DimensionError);
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(RbmParams(w, Vector::Zero(2), Vector::Zero(2)), InvalidArgument);
  RbmParams p = RbmParams::zeros(2, 2);
  CHECK_THROWS_AS(p.add(FreeEnergyGrad::zeros(3, 2)), DimensionError);
  CHECK_THROWS_AS(free_energy(p, BitConfig{1, 0, 1}), DimensionError);
}

TEST_CASE("parameter files round-trip bit-exactly and reject corruption") {
  Rng rng(6);
  const RbmParams p = random_params(5, 3, 1.0, rng);
  std::stringstream ss;
  write_params(ss, p);
  const std::string bytes = ss.str();
  CHECK(bytes.size() == 8 + 4 * 4 + 8 * (15 + 5 + 3));
  std::stringstream in(bytes);
  CHECK(read_params(in) == p);

  std::stringstream bad_magic("XXXXXXXX" + bytes.substr(8));
  CHECK_THROWS_AS(read_params(bad_magic), IoError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_params(truncated), IoError);
}

TEST_CASE("block Gibbs leaves the exact marginal invariant (small, TV)") {
  Rng rng(10);
  const RbmParams p = random_params(3, 2, 1.0, rng);
  const auto q = exact_model_distribution(p);
  std::vector<BitConfig> chains;
  for (int k = 0; k < 4000; ++k) chains.push_back(random_bits(3, rng));
  block_gibbs_chains(p, chains, 30, rng);
  std::vector<double> hist(8, 0.0);
  for (int sweep = 0; sweep < 10; ++sweep) {
    block_gibbs_chains(p, chains, 2, rng);
    for (const auto& x : chains) {
      std::size_t s = 0;
      for (std::size_t i = 0; i < 3; ++i) s |= std::size_t{x[i]} << i;
      hist[s] += 1.0 / 40'000.0;
    }
  }
  double tv = 0.0;
  for (std::size_t s = 0; s < 8; ++s) tv += 0.5 * std::abs(hist[s] - q[s]);
  CHECK(tv < 0.02);
}
