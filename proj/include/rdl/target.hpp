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

#ifndef RDL_TARGET_HPP
#define RDL_TARGET_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rdl/bits.hpp"
#include "rdl/rng.hpp"

namespace rdl {

enum class ModelKind { Ising2D, SK, MIS, MaxCut };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct Edge {
  std::size_t i;
  std::size_t j;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
  std::size_t i;
  std::size_t j;
  double weight;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// L x L square lattice, site (r, c) -> r * L + c. Periodic lattices need
// L >= 3 so that every bond is distinct.
struct IsingLattice {
  std::size_t side = 0;
  double coupling = 1.0;
  bool periodic = true;

  std::size_t size() const { return side * side; }
  // Right and down bond of every site: 2L^2 bonds when periodic.
  std::vector<Edge> edges() const;
  void validate() const;
};

// Couplings J_ij for i < j, stored row by row in upper-triangular order.
struct SkCouplings {
  std::size_t n = 0;
  std::vector<double> upper;

  double at(std::size_t i, std::size_t j) const;  // i != j, either order
  void validate() const;
};

struct SimpleGraph {
  std::size_t nodes = 0;
  std::vector<Edge> edges;  // i < j, no duplicates
  void validate() const;
};

struct MisInstance {
  SimpleGraph graph;
  double penalty = 2.0;
  void validate() const;
};

struct WeightedGraph {
  std::size_t nodes = 0;
  std::vector<WeightedEdge> edges;  // i < j, no duplicates
  void validate() const;
  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;
};

// A target energy E(x) over {0,1}^Nx together with the inverse temperature at
// which it is learned. Ising2D and SK read bits as spins s = 2x - 1; MIS and
// MaxCut use the bits directly.
//
//   Ising2D  E = -J sum_<ij> s_i s_j
//   SK       E = -sum_{i<j} J_ij s_i s_j
//   MIS      E = -sum_i x_i + alpha sum_(ij) x_i x_j
//   MaxCut   E = -sum_{i<j} w_ij (x_i - x_j)^2
//
// effective_energy() = beta * raw_energy() is the only place beta enters.
class TargetModel {
 public:
  using Payload = std::variant<IsingLattice, SkCouplings, MisInstance, WeightedGraph>;

  TargetModel(Payload payload, double beta);

  ModelKind kind() const;
  double beta() const { return beta_; }
  std::size_t nx() const { return nx_; }
  const Payload& payload() const { return payload_; }

  TargetModel with_beta(double beta) const { return TargetModel(payload_, beta); }

  double raw_energy(const BitConfig& x) const;
  double effective_energy(const BitConfig& x) const { return beta_ * raw_energy(x); }

  // Change in raw / effective energy from flipping bit `index`, in O(degree).
  double raw_energy_delta(const BitConfig& x, std::size_t index) const;
  double energy_delta(const BitConfig& x, std::size_t index) const {
    return beta_ * raw_energy_delta(x, index);
  }

  // Canonical text form (see write_model); also the input of model hashes.
  std::string describe() const;

 private:
  void check(const BitConfig& x) const;

  Payload payload_;
  double beta_;
  std::size_t nx_ = 0;
  bool spin_valued_ = false;
  // Symmetric adjacency in CSR form. For MIS the weight slot is unused.
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
  std::vector<double> weights_;
};

// Gset edge-list format: "N M" then M lines "i j w", 1-based nodes.
// Edges are normalized to i < j and duplicates are rejected.
WeightedGraph parse_gset(std::istream& in);
WeightedGraph parse_gset(std::string_view text);
void write_gset(std::ostream& out, const WeightedGraph& graph);
WeightedGraph load_gset(const std::string& path);

// i.i.d. N(0, 1/n) couplings. Requires n >= 2.
SkCouplings sample_sk_couplings(std::size_t n, Rng& rng);

// Uniformly paired d-regular simple graph. Stubs are paired at random; a pair
// that would form a self-loop or a repeated edge is redrawn, and the whole
// pairing restarts if no valid pair remains.
SimpleGraph random_regular_graph(std::size_t nodes, std::size_t degree, Rng& rng);

// Text format, one "key value" per line:
//   rdl-model 1
//   kind <ising2d|sk|mis|maxcut>
//   beta <real>
//   ising2d: side, coupling, periodic (0/1)
//   sk:      n, couplings <count>, then "i j J" lines (0-based)
//   mis:     nodes, penalty, edges <count>, then "i j" lines
//   maxcut:  nodes, edges <count>, then "i j w" lines
// Reals are printed with 17 significant digits so values round-trip exactly.
void write_model(std::ostream& out, const TargetModel& model);
TargetModel read_model(std::istream& in);
TargetModel parse_model(std::string_view text);

}  // namespace rdl

#endif  // RDL_TARGET_HPP
