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

#include "rdl/rbm.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "rdl/detail/binary_io.hpp"

namespace rdl {
namespace {

constexpr char kParamMagic[9] = "RDLPARAM";
constexpr std::uint32_t kParamVersion = 1;

bool all_finite(const Matrix& m) { return m.allFinite(); }

void check_visible(const RbmParams& p, const BitConfig& x) {
  require_dims(x.size() == p.nx(), "visible configuration length differs from Nx");
}

void check_hidden(const RbmParams& p, const HiddenConfig& h) {
  require_dims(h.size() == p.nh(), "hidden configuration length differs from Nh");
}

// Batch of visible states as a B x Nx real matrix.
Matrix stack(std::span<const BitConfig> xs, std::size_t nx) {
  Matrix out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(nx));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require_dims(xs[k].size() == nx, "visible configuration length differs from Nx");
    for (std::size_t i = 0; i < nx; ++i) out(k, i) = xs[k][i];
  }
  return out;
}

}  // namespace

// FreeEnergyGrad

FreeEnergyGrad FreeEnergyGrad::zeros(std::size_t nx, std::size_t nh) {
  return {Matrix::Zero(nx, nh), Vector::Zero(nx), Vector::Zero(nh)};
}

bool FreeEnergyGrad::same_shape(const FreeEnergyGrad& o) const {
  return d_weights.rows() == o.d_weights.rows() && d_weights.cols() == o.d_weights.cols() &&
         d_visible_bias.size() == o.d_visible_bias.size() &&
         d_hidden_bias.size() == o.d_hidden_bias.size();
}

FreeEnergyGrad& FreeEnergyGrad::operator+=(const FreeEnergyGrad& o) {
  require_dims(same_shape(o), "gradient shapes differ");
  d_weights += o.d_weights;
  d_visible_bias += o.d_visible_bias;
  d_hidden_bias += o.d_hidden_bias;
  return *this;
}

FreeEnergyGrad& FreeEnergyGrad::operator-=(const FreeEnergyGrad& o) {
  require_dims(same_shape(o), "gradient shapes differ");
  d_weights -= o.d_weights;
  d_visible_bias -= o.d_visible_bias;
  d_hidden_bias -= o.d_hidden_bias;
  return *this;
}

FreeEnergyGrad& FreeEnergyGrad::operator*=(double s) {
  d_weights *= s;
  d_visible_bias *= s;
  d_hidden_bias *= s;
  return *this;
}

double FreeEnergyGrad::max_abs() const {
  double m = 0.0;
  if (d_weights.size()) m = std::max(m, d_weights.cwiseAbs().maxCoeff());
  if (d_visible_bias.size()) m = std::max(m, d_visible_bias.cwiseAbs().maxCoeff());
  if (d_hidden_bias.size()) m = std::max(m, d_hidden_bias.cwiseAbs().maxCoeff());
  return m;
}

FreeEnergyGrad operator+(FreeEnergyGrad a, const FreeEnergyGrad& b) { return a += b; }
FreeEnergyGrad operator-(FreeEnergyGrad a, const FreeEnergyGrad& b) { return a -= b; }
FreeEnergyGrad operator*(double s, FreeEnergyGrad a) { return a *= s; }

// RbmParams

RbmParams::RbmParams(Matrix weights, Vector visible_bias, Vector hidden_bias)
    : w_(std::move(weights)), b_(std::move(visible_bias)), c_(std::move(hidden_bias)) {
  if (b_.size() < 1 || c_.size() < 1) throw DimensionError("RBM needs Nx >= 1 and Nh >= 1");
  require_dims(w_.rows() == b_.size() && w_.cols() == c_.size(),
               "weight matrix must be Nx x Nh");
  if (!all_finite(w_) || !b_.allFinite() || !c_.allFinite()) {
    throw InvalidArgument("RBM parameters must be finite");
  }
}

RbmParams RbmParams::zeros(std::size_t nx, std::size_t nh) {
  return RbmParams(Matrix::Zero(nx, nh), Vector::Zero(nx), Vector::Zero(nh));
}

RbmParams RbmParams::random_normal(std::size_t nx, std::size_t nh, double stddev, Rng& rng) {
  Matrix w(nx, nh);
  // Row-major fill so the draw order matches the file layout.
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index m = 0; m < w.cols(); ++m) w(i, m) = rng.normal(0.0, stddev);
  return RbmParams(std::move(w), Vector::Zero(nx), Vector::Zero(nh));
}

void RbmParams::add(const FreeEnergyGrad& delta) {
  require_dims(delta.nx() == nx() && delta.nh() == nh() &&
                   delta.d_weights.rows() == w_.rows() && delta.d_weights.cols() == w_.cols(),
               "parameter update shape differs from parameters");
  w_ += delta.d_weights;
  b_ += delta.d_visible_bias;
  c_ += delta.d_hidden_bias;
}

FreeEnergyGrad RbmParams::as_triple() const { return {w_, b_, c_}; }

bool operator==(const RbmParams& a, const RbmParams& b) {
  return a.nx() == b.nx() && a.nh() == b.nh() && a.w_ == b.w_ && a.b_ == b.b_ && a.c_ == b.c_;
}

// Scalar helpers

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double softplus(double a) {
  if (a > 30.0) return a;
  if (a < -30.0) return std::exp(a);
  return std::log1p(std::exp(a));
}

// Inference

double joint_energy(const RbmParams& p, const BitConfig& x, const HiddenConfig& h) {
  check_visible(p, x);
  check_hidden(p, h);
  double e = 0.0;
  for (std::size_t i = 0; i < p.nx(); ++i) {
    if (!x[i]) continue;
    e -= p.visible_bias()(i);
    for (std::size_t m = 0; m < p.nh(); ++m)
      if (h[m]) e -= p.weights()(i, m);
  }
  for (std::size_t m = 0; m < p.nh(); ++m)
    if (h[m]) e -= p.hidden_bias()(m);
  return e;
}

Vector hidden_activation(const RbmParams& p, const BitConfig& x) {
  check_visible(p, x);
  Vector a = p.hidden_bias();
  for (std::size_t i = 0; i < p.nx(); ++i)
    if (x[i]) a += p.weights().row(i).transpose();
  return a;
}

double free_energy(const RbmParams& p, const BitConfig& x) {
  const Vector a = hidden_activation(p, x);
  double f = 0.0;
  for (std::size_t i = 0; i < p.nx(); ++i)
    if (x[i]) f -= p.visible_bias()(i);
  for (Eigen::Index m = 0; m < a.size(); ++m) f -= softplus(a(m));
  return f;
}

FreeEnergyGrad free_energy_grad(const RbmParams& p, const BitConfig& x) {
  const Vector sig = hidden_conditional(p, x);
  FreeEnergyGrad g = FreeEnergyGrad::zeros(p.nx(), p.nh());
  for (std::size_t i = 0; i < p.nx(); ++i) {
    if (!x[i]) continue;
    g.d_visible_bias(i) = -1.0;
    g.d_weights.row(i) = -sig.transpose();
  }
  g.d_hidden_bias = -sig;
  return g;
}

Vector hidden_conditional(const RbmParams& p, const BitConfig& x) {
  return hidden_activation(p, x).unaryExpr([](double a) { return sigmoid(a); });
}

Vector visible_conditional(const RbmParams& p, const HiddenConfig& h) {
  check_hidden(p, h);
  Vector a = p.visible_bias();
  for (std::size_t m = 0; m < p.nh(); ++m)
    if (h[m]) a += p.weights().col(m);
  return a.unaryExpr([](double v) { return sigmoid(v); });
}

HiddenConfig sample_hidden(const RbmParams& p, const BitConfig& x, Rng& rng) {
  const Vector prob = hidden_conditional(p, x);
  HiddenConfig h(p.nh());
  for (std::size_t m = 0; m < p.nh(); ++m) h.set(m, rng.bernoulli(prob(m)));
  return h;
}

BitConfig sample_visible(const RbmParams& p, const HiddenConfig& h, Rng& rng) {
  const Vector prob = visible_conditional(p, h);
  BitConfig x(p.nx());
  for (std::size_t i = 0; i < p.nx(); ++i) x.set(i, rng.bernoulli(prob(i)));
  return x;
}

BitConfig block_gibbs_step(const RbmParams& p, const BitConfig& x, Rng& rng) {
  return sample_visible(p, sample_hidden(p, x, rng), rng);
}

void block_gibbs_chains(const RbmParams& p, std::span<BitConfig> states, int steps, Rng& rng) {
  for (auto& s : states)
    for (int t = 0; t < steps; ++t) s = block_gibbs_step(p, s, rng);
}

double exact_log_partition(const RbmParams& p) {
  if (p.nx() > kMaxEnumerableVisible) {
    throw InvalidArgument("exact_log_partition: Nx = " + std::to_string(p.nx()) +
                          " exceeds the enumeration limit of " +
                          std::to_string(kMaxEnumerableVisible) +
                          " (2^Nx visible states is intractable)");
  }
  const std::uint64_t n_states = std::uint64_t{1} << p.nx();
  std::vector<double> neg_f(n_states);
  double max_v = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < n_states; ++s) {
    neg_f[s] = -free_energy(p, BitConfig::from_index(s, p.nx()));
    max_v = std::max(max_v, neg_f[s]);
  }
  double acc = 0.0;
  for (double v : neg_f) acc += std::exp(v - max_v);
  return max_v + std::log(acc);
}

Vector free_energies(const RbmParams& p, std::span<const BitConfig> xs) {
  if (xs.empty()) return Vector();
  const Matrix x = stack(xs, p.nx());
  const Matrix act = (x * p.weights()).rowwise() + p.hidden_bias().transpose();
  Vector out = -(x * p.visible_bias());
  for (Eigen::Index k = 0; k < act.rows(); ++k)
    for (Eigen::Index m = 0; m < act.cols(); ++m) out(k) -= softplus(act(k, m));
  return out;
}

FreeEnergyGrad weighted_free_energy_grad(const RbmParams& p, std::span<const BitConfig> xs,
                                         const Vector& coeffs) {
  require_dims(static_cast<std::size_t>(coeffs.size()) == xs.size(),
               "one coefficient per sample required");
  if (xs.empty()) return FreeEnergyGrad::zeros(p.nx(), p.nh());
  const Matrix x = stack(xs, p.nx());
  Matrix sig = (x * p.weights()).rowwise() + p.hidden_bias().transpose();
  sig = sig.unaryExpr([](double a) { return sigmoid(a); });
  const Matrix weighted_sig = coeffs.asDiagonal() * sig;
  return {-(x.transpose() * weighted_sig), -(x.transpose() * coeffs),
          -(weighted_sig.colwise().sum().transpose())};
}

// Serialization

void write_params(std::ostream& out, const RbmParams& p) {
  out.write(kParamMagic, 8);
  detail::put<std::uint32_t>(out, kParamVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.nx()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.nh()));
  detail::put<std::uint32_t>(out, 0);
  for (std::size_t i = 0; i < p.nx(); ++i)
    for (std::size_t m = 0; m < p.nh(); ++m) detail::put<double>(out, p.weights()(i, m));
  for (std::size_t i = 0; i < p.nx(); ++i) detail::put<double>(out, p.visible_bias()(i));
  for (std::size_t m = 0; m < p.nh(); ++m) detail::put<double>(out, p.hidden_bias()(m));
  if (!out) throw IoError("failed writing RBM parameters");
}

RbmParams read_params(std::istream& in) {
  detail::expect_magic(in, kParamMagic);
  const auto version = detail::get<std::uint32_t>(in, "version");
  if (version != kParamVersion) {
    throw IoError("unsupported parameter file version " + std::to_string(version));
  }
  const auto nx = detail::get<std::uint32_t>(in, "Nx");
  const auto nh = detail::get<std::uint32_t>(in, "Nh");
  detail::get<std::uint32_t>(in, "reserved");
  Matrix w(nx, nh);
  Vector b(nx), c(nh);
  for (std::uint32_t i = 0; i < nx; ++i)
    for (std::uint32_t m = 0; m < nh; ++m) w(i, m) = detail::get<double>(in, "W");
  for (std::uint32_t i = 0; i < nx; ++i) b(i) = detail::get<double>(in, "b");
  for (std::uint32_t m = 0; m < nh; ++m) c(m) = detail::get<double>(in, "c");
  return RbmParams(std::move(w), std::move(b), std::move(c));
}

void save_params(const std::filesystem::path& path, const RbmParams& p) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_params(out, p);
}

RbmParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_params(in);
}

}  // namespace rdl
