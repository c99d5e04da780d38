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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <string>
#include <vector>

#include "rdl/error.hpp"
#include "rdl/evaluation.hpp"
#include "rdl/experiment.hpp"
#include "rdl/tempering.hpp"
#include "rdl/training.hpp"

namespace py = pybind11;
using namespace rdl;

namespace {

using BitArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

BitConfig to_bits(const BitArray& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array of bits");
  return BitConfig(std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

std::vector<BitConfig> to_batch(const BitArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d (count, Nx) array of bits");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  std::vector<BitConfig> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r)
    out.emplace_back(std::vector<std::uint8_t>(a.data() + r * cols, a.data() + (r + 1) * cols));
  return out;
}

Dataset to_dataset(const BitArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d (count, Nx) array of bits");
  return Dataset(static_cast<std::size_t>(a.shape(1)), to_batch(a));
}

BitArray from_batch(std::span<const BitConfig> xs, std::size_t nx) {
  BitArray out({xs.size(), nx});
  auto* p = out.mutable_data();
  for (const auto& x : xs) p = std::copy(x.raw().begin(), x.raw().end(), p);
  return out;
}

BitArray from_dataset(const Dataset& ds) { return from_batch(ds.samples(), ds.nx()); }

py::tuple grad_tuple(const FreeEnergyGrad& g) {
  return py::make_tuple(g.d_weights, g.d_visible_bias, g.d_hidden_bias);
}

py::dict divergence_dict(const DivergenceRecord& d) {
  py::dict out;
  out["kl_fwd"] = d.kl_fwd;
  out["kl_rev"] = d.kl_rev;
  out["kl2_fwd"] = d.kl2_fwd;
  out["kl2_rev"] = d.kl2_rev;
  out["ratio_div"] = d.ratio_div;
  out["mh_acceptance_expectation"] = d.mh_acceptance_expectation;
  return out;
}

ExperimentConfig config_from(const std::string& json_or_preset, const std::string& scale) {
  const bool is_json = json_or_preset.find('{') != std::string::npos;
  return is_json ? parse_config(json_or_preset) : preset(json_or_preset, scale);
}

}  // namespace

PYBIND11_MODULE(_rdlearn, m) {
  m.doc() = "Ratio-divergence RBM learning (C++ core)";
  m.attr("__version__") = tool_version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  // RBM

  py::class_<RbmParams>(m, "RbmParams")
      .def(py::init<Matrix, Vector, Vector>(), py::arg("weights"), py::arg("visible_bias"),
           py::arg("hidden_bias"))
      .def_static("zeros", &RbmParams::zeros, py::arg("nx"), py::arg("nh"))
      .def_static(
          "random_normal",
          [](std::size_t nx, std::size_t nh, double stddev, std::uint64_t seed) {
            Rng rng(seed);
            return RbmParams::random_normal(nx, nh, stddev, rng);
          },
          py::arg("nx"), py::arg("nh"), py::arg("stddev"), py::arg("seed") = 0)
      .def_property_readonly("nx", &RbmParams::nx)
      .def_property_readonly("nh", &RbmParams::nh)
      .def_property_readonly("weights", &RbmParams::weights)
      .def_property_readonly("visible_bias", &RbmParams::visible_bias)
      .def_property_readonly("hidden_bias", &RbmParams::hidden_bias)
      .def("__eq__", [](const RbmParams& a, const RbmParams& b) { return a == b; })
      .def("__repr__", [](const RbmParams& p) {
        return "RbmParams(nx=" + std::to_string(p.nx()) + ", nh=" + std::to_string(p.nh()) + ")";
      });

  m.def("load_params", &load_params, py::arg("path"));
  m.def("save_params", &save_params, py::arg("path"), py::arg("params"));

  m.def(
      "free_energy", [](const RbmParams& p, const BitArray& x) { return free_energy(p, to_bits(x)); },
      py::arg("params"), py::arg("x"));
  m.def(
      "free_energies", [](const RbmParams& p, const BitArray& xs) { return free_energies(p, to_batch(xs)); },
      py::arg("params"), py::arg("xs"));
  m.def(
      "free_energy_grad",
      [](const RbmParams& p, const BitArray& x) { return grad_tuple(free_energy_grad(p, to_bits(x))); },
      py::arg("params"), py::arg("x"), "(dF/dW, dF/db, dF/dc)");
  m.def("exact_log_partition", &exact_log_partition, py::arg("params"));
  m.def("exact_model_distribution", &exact_model_distribution, py::arg("params"));
  m.def(
      "block_gibbs",
      [](const RbmParams& p, const BitArray& xs, int steps, std::uint64_t seed) {
        auto states = to_batch(xs);
        Rng rng(seed);
        block_gibbs_chains(p, states, steps, rng);
        return from_batch(states, p.nx());
      },
      py::arg("params"), py::arg("xs"), py::arg("steps"), py::arg("seed") = 0);

  // Target models

  py::class_<TargetModel>(m, "TargetModel")
      .def_static(
          "ising",
          [](std::size_t side, double beta, double coupling, bool periodic) {
            return TargetModel(IsingLattice{side, coupling, periodic}, beta);
          },
          py::arg("side"), py::arg("beta"), py::arg("coupling") = 1.0, py::arg("periodic") = true)
      .def_static(
          "sk",
          [](std::size_t n, double beta, std::uint64_t seed) {
            Rng rng(seed);
            return TargetModel(sample_sk_couplings(n, rng), beta);
          },
          py::arg("n"), py::arg("beta"), py::arg("seed") = 0)
      .def_static(
          "mis",
          [](std::size_t nodes, std::size_t degree, double beta, double penalty, std::uint64_t seed) {
            Rng rng(seed);
            return TargetModel(MisInstance{random_regular_graph(nodes, degree, rng), penalty}, beta);
          },
          py::arg("nodes"), py::arg("degree"), py::arg("beta"), py::arg("penalty") = 2.0, py::arg("seed") = 0)
      .def_static(
          "maxcut_gset", [](const std::string& path, double beta) { return TargetModel(load_gset(path), beta); },
          py::arg("path"), py::arg("beta"))
      .def_static(
          "parse", [](const std::string& text) { return parse_model(text); }, py::arg("text"))
      .def_property_readonly("nx", &TargetModel::nx)
      .def_property_readonly("beta", &TargetModel::beta)
      .def_property_readonly("kind", [](const TargetModel& t) { return std::string(to_string(t.kind())); })
      .def("with_beta", &TargetModel::with_beta, py::arg("beta"))
      .def("describe", &TargetModel::describe)
      .def(
          "raw_energy", [](const TargetModel& t, const BitArray& x) { return t.raw_energy(to_bits(x)); },
          py::arg("x"))
      .def(
          "energy", [](const TargetModel& t, const BitArray& x) { return t.effective_energy(to_bits(x)); },
          py::arg("x"), "beta * raw energy")
      .def(
          "energies",
          [](const TargetModel& t, const BitArray& xs) {
            const auto batch = to_batch(xs);
            Vector out(static_cast<Eigen::Index>(batch.size()));
            for (std::size_t k = 0; k < batch.size(); ++k) out(static_cast<Eigen::Index>(k)) = t.effective_energy(batch[k]);
            return out;
          },
          py::arg("xs"))
      .def(
          "energy_delta",
          [](const TargetModel& t, const BitArray& x, std::size_t i) { return t.energy_delta(to_bits(x), i); },
          py::arg("x"), py::arg("index"));

  m.def(
      "parse_gset",
      [](const std::string& text) {
        const WeightedGraph g = parse_gset(std::string_view(text));
        std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
        for (const auto& e : g.edges) edges.emplace_back(e.i, e.j, e.weight);
        return py::make_tuple(g.nodes, edges);
      },
      py::arg("text"), "(nodes, [(i, j, w)]) with 0-based endpoints");

  // Parallel tempering

  m.def(
      "generate_dataset",
      [](const TargetModel& model, std::size_t n_replicas, double beta_min, std::uint64_t total_mcs,
         std::uint64_t burn_in_records, std::size_t train_size, std::size_t val_size, std::uint64_t record_interval,
         std::uint64_t swap_interval, std::uint64_t seed) {
        PtConfig c;
        c.n_replicas = n_replicas;
        c.beta_min = beta_min;
        c.beta_max = model.beta();
        c.total_mcs = total_mcs;
        c.burn_in_records = burn_in_records;
        c.train_size = train_size;
        c.val_size = val_size;
        c.record_interval_mcs = record_interval;
        c.swap_interval_mcs = swap_interval;
        c.seed = seed;
        PtResult r;
        {
          py::gil_scoped_release nogil;
          r = generate_dataset(model, c);
        }
        std::vector<double> rates;
        for (std::size_t k = 0; k + 1 < n_replicas; ++k) rates.push_back(r.stats.swap_rate(k));
        py::dict out;
        out["train"] = from_dataset(r.train);
        out["val"] = from_dataset(r.val);
        out["swap_rates"] = rates;
        out["flip_acceptance"] = r.stats.flip_acceptance;
        out["record_energies"] = r.stats.record_energies;
        return out;
      },
      py::arg("model"), py::arg("n_replicas"), py::arg("beta_min"), py::arg("total_mcs"),
      py::arg("burn_in_records"), py::arg("train_size"), py::arg("val_size"), py::arg("record_interval") = 10,
      py::arg("swap_interval") = 1, py::arg("seed") = 0,
      "Parallel tempering with a geometric ladder from beta_min to model.beta");

  // Objectives and training

  m.def(
      "objective",
      [](const std::string& kind, const RbmParams& p, const TargetModel& model, const BitArray& data,
         const BitArray& chains) {
        const ObjectiveValue v = evaluate_objective(parse_objective(kind), p, model, to_batch(data), to_batch(chains));
        return py::make_tuple(v.loss, grad_tuple(v.grad));
      },
      py::arg("kind"), py::arg("params"), py::arg("model"), py::arg("data"), py::arg("chains"),
      "(loss, (dW, db, dc)) for fwd, rev, sum or rd");

  m.def(
      "train",
      [](const BitArray& data, const BitArray& val, const TargetModel& model, const std::string& objective,
         std::size_t epochs, std::size_t minibatch, std::uint64_t seed, std::size_t hidden, double learning_rate,
         int k_gibbs, std::size_t eval_interval) {
        TrainConfig c;
        c.objective.kind = parse_objective(objective);
        c.objective.k_gibbs = k_gibbs;
        c.epochs = epochs;
        c.minibatch = minibatch;
        c.seed = seed;
        c.hidden = hidden;
        c.adam.learning_rate = learning_rate;
        c.eval_interval = eval_interval;
        const Dataset d = to_dataset(data), v = to_dataset(val);
        TrainResult r = [&] {
          py::gil_scoped_release nogil;
          return train(d, v, model, c);
        }();
        py::list metrics;
        for (const auto& rec : r.metrics) metrics.append(py::make_tuple(rec.epoch, rec.objective, rec.r_theta));
        return py::make_tuple(r.params, r.initial_r_theta, metrics);
      },
      py::arg("data"), py::arg("val"), py::arg("model"), py::arg("objective") = "rd", py::arg("epochs") = 100,
      py::arg("minibatch") = 128, py::arg("seed") = 0, py::arg("hidden") = 0, py::arg("learning_rate") = 1e-3,
      py::arg("k_gibbs") = 1, py::arg("eval_interval") = 10,
      "(params, initial_r_theta, [(epoch, objective, r_theta)])");

  m.def(
      "generate_samples",
      [](const RbmParams& p, const BitArray& init, int steps, std::uint64_t seed, std::size_t count) {
        Rng rng(seed);
        return from_dataset(generate_samples(p, to_dataset(init), steps, rng, count));
      },
      py::arg("params"), py::arg("init"), py::arg("steps") = 100, py::arg("seed") = 0, py::arg("count") = 0);

  // Evaluation

  m.def(
      "r_theta",
      [](const RbmParams& p, const TargetModel& model, const BitArray& xs) { return r_theta(p, model, to_batch(xs)); },
      py::arg("params"), py::arg("model"), py::arg("xs"));
  m.def(
      "wasserstein",
      [](std::vector<double> a, std::vector<double> b) {
        return wasserstein_1d(EmpiricalEnergyDist(std::move(a)), EmpiricalEnergyDist(std::move(b)));
      },
      py::arg("a"), py::arg("b"), "1-d Wasserstein distance between two empirical samples");
  m.def(
      "exact_divergences",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return divergence_dict(exact_divergences(p, q));
      },
      py::arg("p"), py::arg("q"));
  m.def(
      "hamming_distances",
      [](const BitArray& xs, std::size_t k, std::uint64_t seed) {
        Rng rng(seed);
        return hamming_histogram(to_dataset(xs), k, rng).distances;
      },
      py::arg("xs"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "pca_project",
      [](const BitArray& train, const BitArray& xs) {
        const PcaModel pca = fit_pca(to_dataset(train));
        return project(pca, to_dataset(xs));
      },
      py::arg("train"), py::arg("xs"), "fit PCA on `train`, return 2-d projections of `xs`");

  // Files

  m.def(
      "load_dataset", [](const std::filesystem::path& p) { return from_dataset(load_dataset(p)); }, py::arg("path"));
  m.def(
      "save_dataset", [](const std::filesystem::path& p, const BitArray& xs) { save_dataset(p, to_dataset(xs)); },
      py::arg("path"), py::arg("xs"));

  // Experiments

  m.def("preset_names", &preset_names);
  m.def(
      "config_json",
      [](const std::string& json_or_preset, const std::string& scale) {
        return config_to_json(config_from(json_or_preset, scale));
      },
      py::arg("config"), py::arg("scale") = "full", "resolved configuration as JSON");
  m.def(
      "run_experiment",
      [](const std::string& json_or_preset, const std::filesystem::path& output_dir, const std::string& scale,
         unsigned jobs) {
        ExperimentConfig c = config_from(json_or_preset, scale);
        c.output_dir = output_dir;
        py::gil_scoped_release nogil;
        cmd_generate_data(c);
        cmd_train_all(c, jobs);
        for (auto o : c.objectives)
          for (auto s : c.seeds) cmd_sample(c, o, s);
        cmd_evaluate(c);
        return cmd_report(c);
      },
      py::arg("config"), py::arg("output_dir"), py::arg("scale") = "full", py::arg("jobs") = 1,
      "generate-data, train, sample, evaluate and report; returns the report markdown");
}
