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

#include "rdl/target.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "rdl/error.hpp"

namespace rdl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t upper_index(std::size_t n, std::size_t i, std::size_t j) {
  // Row i of the strict upper triangle starts after sum_{r<i} (n - 1 - r) entries.
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

void check_edge(std::size_t i, std::size_t j, std::size_t nodes, const char* what) {
  if (!(i < j && j < nodes)) {
    throw InvalidArgument(std::string(what) + ": edges need 0 <= i < j < node count");
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(std::string("non-finite ") + what, line);
  }
  return value;
}

// Line reader that tracks 1-based line numbers and skips blank lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line split into tokens; empty when input is exhausted.
  std::vector<std::string_view> next() {
    while (std::getline(in_, buf_)) {
      ++line_;
      auto toks = split_ws(buf_);
      if (!toks.empty()) return toks;
    }
    return {};
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string buf_;
  std::size_t line_ = 0;
};

std::string fmt_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ising2D: return "ising2d";
    case ModelKind::SK: return "sk";
    case ModelKind::MIS: return "mis";
    case ModelKind::MaxCut: return "maxcut";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "ising2d" || text == "ising") return ModelKind::Ising2D;
  if (text == "sk") return ModelKind::SK;
  if (text == "mis") return ModelKind::MIS;
  if (text == "maxcut" || text == "gset") return ModelKind::MaxCut;
  throw InvalidArgument("unknown model kind '" + std::string(text) + "'");
}

// Payload types

std::vector<Edge> IsingLattice::edges() const {
  validate();
  std::vector<Edge> out;
  const std::size_t L = side;
  for (std::size_t r = 0; r < L; ++r) {
    for (std::size_t c = 0; c < L; ++c) {
      const std::size_t s = r * L + c;
      if (periodic || c + 1 < L) {
        const std::size_t t = r * L + (c + 1) % L;
        out.push_back({std::min(s, t), std::max(s, t)});
      }
      if (periodic || r + 1 < L) {
        const std::size_t t = ((r + 1) % L) * L + c;
        out.push_back({std::min(s, t), std::max(s, t)});
      }
    }
  }
  return out;
}

void IsingLattice::validate() const {
  if (side < 1) throw InvalidArgument("Ising lattice side must be positive");
  if (periodic && side < 3) {
    throw InvalidArgument("periodic Ising lattice needs side >= 3 to avoid repeated bonds");
  }
  if (!(coupling > 0.0) || !std::isfinite(coupling)) {
    throw InvalidArgument("Ising coupling must be positive and finite");
  }
}

double SkCouplings::at(std::size_t i, std::size_t j) const {
  if (i == j || i >= n || j >= n) throw InvalidArgument("SK coupling index out of range");
  if (i > j) std::swap(i, j);
  return upper[upper_index(n, i, j)];
}

void SkCouplings::validate() const {
  if (n < 2) throw InvalidArgument("SK model needs n >= 2");
  if (upper.size() != n * (n - 1) / 2) {
    throw DimensionError("SK couplings must hold n(n-1)/2 entries");
  }
  for (double v : upper)
    if (!std::isfinite(v)) throw InvalidArgument("SK couplings must be finite");
}

void SimpleGraph::validate() const {
  if (nodes < 1) throw InvalidArgument("graph needs at least one node");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    check_edge(e.i, e.j, nodes, "graph");
    if (!seen.emplace(e.i, e.j).second) throw InvalidArgument("graph has a duplicate edge");
  }
}

void MisInstance::validate() const {
  graph.validate();
  if (!(penalty > 0.0) || !std::isfinite(penalty)) {
    throw InvalidArgument("MIS penalty must be positive and finite");
  }
}

void WeightedGraph::validate() const {
  if (nodes < 1) throw InvalidArgument("graph needs at least one node");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    check_edge(e.i, e.j, nodes, "weighted graph");
    if (!std::isfinite(e.weight)) throw InvalidArgument("edge weights must be finite");
    if (!seen.emplace(e.i, e.j).second) {
      throw InvalidArgument("weighted graph has a duplicate edge");
    }
  }
}

// TargetModel

TargetModel::TargetModel(Payload payload, double beta) : payload_(std::move(payload)), beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("beta must be positive and finite");
  }

  std::vector<WeightedEdge> edges;
  std::visit(Overloaded{
                 [&](const IsingLattice& p) {
                   p.validate();
                   nx_ = p.size();
                   spin_valued_ = true;
                   for (const auto& e : p.edges()) edges.push_back({e.i, e.j, p.coupling});
                 },
                 [&](const SkCouplings& p) {
                   p.validate();
                   nx_ = p.n;
                   spin_valued_ = true;
                   for (std::size_t i = 0; i < p.n; ++i)
                     for (std::size_t j = i + 1; j < p.n; ++j)
                       edges.push_back({i, j, p.upper[upper_index(p.n, i, j)]});
                 },
                 [&](const MisInstance& p) {
                   p.validate();
                   nx_ = p.graph.nodes;
                   for (const auto& e : p.graph.edges) edges.push_back({e.i, e.j, 1.0});
                 },
                 [&](const WeightedGraph& p) {
                   p.validate();
                   nx_ = p.nodes;
                   edges = p.edges;
                 },
             },
             payload_);

  std::vector<std::size_t> degree(nx_, 0);
  for (const auto& e : edges) {
    ++degree[e.i];
    ++degree[e.j];
  }
  offsets_.assign(nx_ + 1, 0);
  for (std::size_t i = 0; i < nx_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  neighbors_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    neighbors_[fill[e.i]] = e.j;
    weights_[fill[e.i]++] = e.weight;
    neighbors_[fill[e.j]] = e.i;
    weights_[fill[e.j]++] = e.weight;
  }
}

ModelKind TargetModel::kind() const {
  return static_cast<ModelKind>(payload_.index());
}

void TargetModel::check(const BitConfig& x) const {
  require_dims(x.size() == nx_, "configuration length differs from the model's Nx");
}

double TargetModel::raw_energy(const BitConfig& x) const {
  check(x);
  // Every bond is stored twice in the adjacency, hence the final halving.
  double twice = 0.0;
  if (spin_valued_) {
    for (std::size_t i = 0; i < nx_; ++i) {
      double local = 0.0;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
        local += weights_[k] * (2.0 * x[neighbors_[k]] - 1.0);
      twice -= (2.0 * x[i] - 1.0) * local;
    }
    return 0.5 * twice;
  }
  if (const auto* mis = std::get_if<MisInstance>(&payload_)) {
    for (std::size_t i = 0; i < nx_; ++i) {
      if (!x[i]) continue;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) twice += x[neighbors_[k]];
    }
    return -static_cast<double>(x.count()) + mis->penalty * 0.5 * twice;
  }
  for (std::size_t i = 0; i < nx_; ++i)
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
      if (x[neighbors_[k]] != x[i]) twice -= weights_[k];
  return 0.5 * twice;
}

double TargetModel::raw_energy_delta(const BitConfig& x, std::size_t index) const {
  check(x);
  if (index >= nx_) throw InvalidArgument("flip index out of range");
  const std::size_t begin = offsets_[index];
  const std::size_t end = offsets_[index + 1];
  const int xi = x[index];

  if (spin_valued_) {
    double local = 0.0;
    for (std::size_t k = begin; k < end; ++k) local += weights_[k] * (2.0 * x[neighbors_[k]] - 1.0);
    return 2.0 * (2.0 * xi - 1.0) * local;
  }
  if (const auto* mis = std::get_if<MisInstance>(&payload_)) {
    double occupied = 0.0;
    for (std::size_t k = begin; k < end; ++k) occupied += x[neighbors_[k]];
    const double added = -1.0 + mis->penalty * occupied;
    return xi ? -added : added;
  }
  double delta = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    delta += (x[neighbors_[k]] != xi) ? weights_[k] : -weights_[k];
  }
  return delta;
}

std::string TargetModel::describe() const {
  std::ostringstream os;
  write_model(os, *this);
  return os.str();
}

// Gset

WeightedGraph parse_gset(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next();
  if (header.empty()) throw ParseError("empty Gset input", reader.line() + 1);
  if (header.size() != 2) throw ParseError("header must be 'N M'", reader.line());
  const auto nodes = parse_number<std::size_t>(header[0], reader.line(), "node count");
  const auto n_edges = parse_number<std::size_t>(header[1], reader.line(), "edge count");
  if (nodes < 1) throw ParseError("node count must be positive", reader.line());

  WeightedGraph g;
  g.nodes = nodes;
  g.edges.reserve(n_edges);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (;;) {
    auto toks = reader.next();
    if (toks.empty()) break;
    const std::size_t line = reader.line();
    if (g.edges.size() == n_edges) {
      throw ParseError("more edge lines than the " + std::to_string(n_edges) +
                           " declared in the header",
                       line);
    }
    if (toks.size() != 3) throw ParseError("edge line must be 'i j w'", line);
    auto i = parse_number<std::size_t>(toks[0], line, "node index");
    auto j = parse_number<std::size_t>(toks[1], line, "node index");
    const auto w = parse_number<double>(toks[2], line, "weight");
    if (i < 1 || i > nodes || j < 1 || j > nodes) {
      throw ParseError("node index outside [1, " + std::to_string(nodes) + "]", line);
    }
    if (i == j) throw ParseError("self-loop on node " + std::to_string(i), line);
    if (i > j) std::swap(i, j);
    if (!seen.emplace(i - 1, j - 1).second) {
      throw ParseError("duplicate edge " + std::to_string(i) + " " + std::to_string(j), line);
    }
    g.edges.push_back({i - 1, j - 1, w});
  }
  if (g.edges.size() != n_edges) {
    throw ParseError("header declares " + std::to_string(n_edges) + " edges but " +
                         std::to_string(g.edges.size()) + " were found",
                     reader.line() + 1);
  }
  return g;
}

WeightedGraph parse_gset(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_gset(in);
}

void write_gset(std::ostream& out, const WeightedGraph& g) {
  g.validate();
  out << g.nodes << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges) out << e.i + 1 << ' ' << e.j + 1 << ' ' << fmt_real(e.weight) << '\n';
}

WeightedGraph load_gset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Gset file " + path);
  return parse_gset(in);
}

// Instance generators

SkCouplings sample_sk_couplings(std::size_t n, Rng& rng) {
  if (n < 2) throw InvalidArgument("SK model needs n >= 2");
  SkCouplings sk;
  sk.n = n;
  sk.upper.resize(n * (n - 1) / 2);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : sk.upper) v = rng.normal(0.0, stddev);
  return sk;
}

SimpleGraph random_regular_graph(std::size_t nodes, std::size_t degree, Rng& rng) {
  if (degree >= nodes) throw InvalidArgument("regular graph degree must be below node count");
  if ((nodes * degree) % 2 != 0) throw InvalidArgument("nodes * degree must be even");

  constexpr int kMaxRestarts = 1000;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    std::vector<std::size_t> stubs;
    stubs.reserve(nodes * degree);
    for (std::size_t v = 0; v < nodes; ++v)
      for (std::size_t k = 0; k < degree; ++k) stubs.push_back(v);
    std::vector<char> adjacent(nodes * nodes, 0);
    std::vector<Edge> edges;

    auto ok = [&](std::size_t a, std::size_t b) { return a != b && !adjacent[a * nodes + b]; };
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      int misses = 0;
      for (;;) {
        const std::size_t p = rng.below(stubs.size());
        const std::size_t q = rng.below(stubs.size());
        if (p != q && ok(stubs[p], stubs[q])) {
          const std::size_t a = stubs[p], b = stubs[q];
          adjacent[a * nodes + b] = adjacent[b * nodes + a] = 1;
          edges.push_back({std::min(a, b), std::max(a, b)});
          // Remove the higher position first so the lower one stays valid.
          for (std::size_t pos : {std::max(p, q), std::min(p, q)}) {
            stubs[pos] = stubs.back();
            stubs.pop_back();
          }
          break;
        }
        if (++misses < 64) continue;
        // Many misses: confirm a valid pair still exists before trying again.
        bool any = false;
        for (std::size_t s = 0; s < stubs.size() && !any; ++s)
          for (std::size_t t = s + 1; t < stubs.size() && !any; ++t) any = ok(stubs[s], stubs[t]);
        if (!any) {
          stuck = true;
          break;
        }
        misses = 0;
      }
    }
    if (stuck) continue;
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    return SimpleGraph{nodes, std::move(edges)};
  }
  throw Error("random_regular_graph: pairing failed repeatedly");
}

// Model text format

void write_model(std::ostream& out, const TargetModel& model) {
  out << "rdl-model 1\n";
  out << "kind " << to_string(model.kind()) << '\n';
  out << "beta " << fmt_real(model.beta()) << '\n';
  std::visit(Overloaded{
                 [&](const IsingLattice& p) {
                   out << "side " << p.side << '\n'
                       << "coupling " << fmt_real(p.coupling) << '\n'
                       << "periodic " << (p.periodic ? 1 : 0) << '\n';
                 },
                 [&](const SkCouplings& p) {
                   out << "n " << p.n << '\n' << "couplings " << p.upper.size() << '\n';
                   for (std::size_t i = 0; i < p.n; ++i)
                     for (std::size_t j = i + 1; j < p.n; ++j)
                       out << i << ' ' << j << ' ' << fmt_real(p.upper[upper_index(p.n, i, j)])
                           << '\n';
                 },
                 [&](const MisInstance& p) {
                   out << "nodes " << p.graph.nodes << '\n'
                       << "penalty " << fmt_real(p.penalty) << '\n'
                       << "edges " << p.graph.edges.size() << '\n';
                   for (const auto& e : p.graph.edges) out << e.i << ' ' << e.j << '\n';
                 },
                 [&](const WeightedGraph& p) {
                   out << "nodes " << p.nodes << '\n' << "edges " << p.edges.size() << '\n';
                   for (const auto& e : p.edges)
                     out << e.i << ' ' << e.j << ' ' << fmt_real(e.weight) << '\n';
                 },
             },
             model.payload());
}

TargetModel read_model(std::istream& in) {
  LineReader reader(in);
  auto key_value = [&](std::string_view key) {
    auto toks = reader.next();
    if (toks.size() != 2 || toks[0] != key) {
      throw ParseError("expected '" + std::string(key) + " <value>'", reader.line());
    }
    return toks[1];
  };
  auto real = [&](std::string_view key) {
    return parse_number<double>(key_value(key), reader.line(), key.data());
  };
  auto count = [&](std::string_view key) {
    return parse_number<std::size_t>(key_value(key), reader.line(), key.data());
  };
  auto row = [&](std::size_t n_tokens) {
    auto toks = reader.next();
    if (toks.size() != n_tokens) {
      throw ParseError("expected " + std::to_string(n_tokens) + " fields", reader.line() + (toks.empty() ? 1 : 0));
    }
    return toks;
  };

  auto magic = reader.next();
  if (magic.size() != 2 || magic[0] != "rdl-model" || magic[1] != "1") {
    throw ParseError("expected 'rdl-model 1' header", reader.line());
  }
  const ModelKind kind = parse_model_kind(key_value("kind"));
  const double beta = real("beta");

  try {
    switch (kind) {
      case ModelKind::Ising2D: {
        IsingLattice p;
        p.side = count("side");
        p.coupling = real("coupling");
        p.periodic = count("periodic") != 0;
        return TargetModel(p, beta);
      }
      case ModelKind::SK: {
        SkCouplings p;
        p.n = count("n");
        const std::size_t m = count("couplings");
        if (p.n < 2 || m != p.n * (p.n - 1) / 2) {
          throw ParseError("SK coupling count must be n(n-1)/2", reader.line());
        }
        p.upper.assign(m, 0.0);
        std::vector<char> filled(m, 0);
        for (std::size_t k = 0; k < m; ++k) {
          auto t = row(3);
          const auto i = parse_number<std::size_t>(t[0], reader.line(), "index");
          const auto j = parse_number<std::size_t>(t[1], reader.line(), "index");
          if (!(i < j && j < p.n)) throw ParseError("SK coupling needs i < j < n", reader.line());
          const std::size_t idx = upper_index(p.n, i, j);
          if (filled[idx]) throw ParseError("duplicate SK coupling", reader.line());
          filled[idx] = 1;
          p.upper[idx] = parse_number<double>(t[2], reader.line(), "coupling");
        }
        return TargetModel(std::move(p), beta);
      }
      case ModelKind::MIS: {
        MisInstance p;
        p.graph.nodes = count("nodes");
        p.penalty = real("penalty");
        const std::size_t m = count("edges");
        for (std::size_t k = 0; k < m; ++k) {
          auto t = row(2);
          p.graph.edges.push_back({parse_number<std::size_t>(t[0], reader.line(), "index"),
                                   parse_number<std::size_t>(t[1], reader.line(), "index")});
        }
        return TargetModel(std::move(p), beta);
      }
      case ModelKind::MaxCut: {
        WeightedGraph p;
        p.nodes = count("nodes");
        const std::size_t m = count("edges");
        for (std::size_t k = 0; k < m; ++k) {
          auto t = row(3);
          p.edges.push_back({parse_number<std::size_t>(t[0], reader.line(), "index"),
                             parse_number<std::size_t>(t[1], reader.line(), "index"),
                             parse_number<double>(t[2], reader.line(), "weight")});
        }
        return TargetModel(std::move(p), beta);
      }
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
  throw ParseError("unreachable model kind", reader.line());
}

TargetModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_model(in);
}

}  // namespace rdl
