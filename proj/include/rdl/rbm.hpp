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

#ifndef RDL_RBM_HPP
#define RDL_RBM_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>

#include "rdl/bits.hpp"
#include "rdl/rng.hpp"

namespace rdl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest visible layer for which exact_log_partition will enumerate.
inline constexpr std::size_t kMaxEnumerableVisible = 20;

// Derivative of the visible free energy with respect to (W, b, c). Also used
// as the generic parameter-shaped container for optimizer moments and steps.
struct FreeEnergyGrad {
  Matrix d_weights;
  Vector d_visible_bias;
  Vector d_hidden_bias;

  static FreeEnergyGrad zeros(std::size_t nx, std::size_t nh);

  std::size_t nx() const { return static_cast<std::size_t>(d_visible_bias.size()); }
  std::size_t nh() const { return static_cast<std::size_t>(d_hidden_bias.size()); }
  bool same_shape(const FreeEnergyGrad& other) const;

  FreeEnergyGrad& operator+=(const FreeEnergyGrad& other);
  FreeEnergyGrad& operator-=(const FreeEnergyGrad& other);
  FreeEnergyGrad& operator*=(double s);

  // Largest absolute entry over all three blocks.
  double max_abs() const;
};

FreeEnergyGrad operator+(FreeEnergyGrad a, const FreeEnergyGrad& b);
FreeEnergyGrad operator-(FreeEnergyGrad a, const FreeEnergyGrad& b);
FreeEnergyGrad operator*(double s, FreeEnergyGrad a);

// Learnable parameters of a binary RBM,
//   E(x, h) = -b.x - c.h - x.W.h,  W is Nx x Nh.
// Shapes are fixed at construction; only values change afterwards.
class RbmParams {
 public:
  RbmParams(Matrix weights, Vector visible_bias, Vector hidden_bias);

  static RbmParams zeros(std::size_t nx, std::size_t nh);
  // W ~ N(0, stddev^2) entry-wise, biases zero.
  static RbmParams random_normal(std::size_t nx, std::size_t nh, double stddev, Rng& rng);

  std::size_t nx() const { return static_cast<std::size_t>(b_.size()); }
  std::size_t nh() const { return static_cast<std::size_t>(c_.size()); }

  const Matrix& weights() const { return w_; }
  const Vector& visible_bias() const { return b_; }
  const Vector& hidden_bias() const { return c_; }

  // theta += delta, shape-checked.
  void add(const FreeEnergyGrad& delta);

  // Parameters viewed as a FreeEnergyGrad-shaped triple (for finite differences
  // and serialization helpers).
  FreeEnergyGrad as_triple() const;

  friend bool operator==(const RbmParams& a, const RbmParams& b);

 private:
  Matrix w_;
  Vector b_;
  Vector c_;
};

double sigmoid(double a);
// ln(1 + e^a); saturates to a above 30 and to e^a below -30.
double softplus(double a);

double joint_energy(const RbmParams& params, const BitConfig& x, const HiddenConfig& h);

// c + W^T x.
Vector hidden_activation(const RbmParams& params, const BitConfig& x);

// F(x) = -b.x - sum_m softplus(c_m + sum_i x_i W_im).
double free_energy(const RbmParams& params, const BitConfig& x);

FreeEnergyGrad free_energy_grad(const RbmParams& params, const BitConfig& x);

// p(h_m = 1 | x) = sigmoid(c_m + sum_i x_i W_im).
Vector hidden_conditional(const RbmParams& params, const BitConfig& x);
// p(x_i = 1 | h) = sigmoid(b_i + sum_m W_im h_m).
Vector visible_conditional(const RbmParams& params, const HiddenConfig& h);

HiddenConfig sample_hidden(const RbmParams& params, const BitConfig& x, Rng& rng);
BitConfig sample_visible(const RbmParams& params, const HiddenConfig& h, Rng& rng);

// One block Gibbs sweep x -> h -> x'. Hidden units draw first, in index order,
// then visible units.
BitConfig block_gibbs_step(const RbmParams& params, const BitConfig& x, Rng& rng);

// Advances every state in place by `steps` block Gibbs sweeps.
void block_gibbs_chains(const RbmParams& params, std::span<BitConfig> states, int steps,
                        Rng& rng);

// ln Z by enumerating the 2^Nx visible states. Throws InvalidArgument when
// Nx > kMaxEnumerableVisible.
double exact_log_partition(const RbmParams& params);

// Free energies for a batch, computed through one matrix product.
Vector free_energies(const RbmParams& params, std::span<const BitConfig> xs);

// sum_k coeffs[k] * dF/dtheta(xs[k]).
FreeEnergyGrad weighted_free_energy_grad(const RbmParams& params,
                                         std::span<const BitConfig> xs,
                                         const Vector& coeffs);

// Binary parameter file, all fields little-endian:
//   bytes 0..7   magic "RDLPARAM"
//   u32          format version (1)
//   u32          Nx
//   u32          Nh
//   u32          reserved, 0
//   f64[Nx*Nh]   W, row-major (row i = visible unit i)
//   f64[Nx]      b
//   f64[Nh]      c
void write_params(std::ostream& out, const RbmParams& params);
RbmParams read_params(std::istream& in);
void save_params(const std::filesystem::path& path, const RbmParams& params);
RbmParams load_params(const std::filesystem::path& path);

}  // namespace rdl

#endif  // RDL_RBM_HPP
