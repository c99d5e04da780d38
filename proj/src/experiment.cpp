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

#include "rdl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rdl/dataset.hpp"
#include "rdl/error.hpp"
#include "rdl/evaluation.hpp"
#include "rdl/hash.hpp"
#include "rdl/rbm.hpp"

namespace rdl {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Removes every registered output unless commit() is reached.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = files_.rbegin(); it != files_.rend(); ++it) fs::remove(*it, ec);
  }

  const fs::path& add(const fs::path& p) {
    files_.push_back(p);
    return p;
  }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> files_;
  bool committed_ = false;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("failed writing " + p.string());
}

std::string relative_key(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

void write_manifest(const fs::path& path, const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<fs::path>& artifacts, const fs::path& root, Json extra = Json::object()) {
  Json m;
  m["tool"] = "rdl";
  m["version"] = tool_version();
  m["command"] = command;
  m["config"] = Json::parse(config_to_json(cfg, false));
  Json arts = Json::object();
  for (const auto& a : artifacts) arts[relative_key(a, root)] = file_content_hash(a);
  m["artifacts"] = std::move(arts);
  if (!extra.empty()) m["results"] = std::move(extra);
  write_text(path, m.dump(2) + "\n");
}

const char* objective_label(ObjectiveKind o) { return to_string(o).data(); }

fs::path resolve_input(const ExperimentConfig& cfg, const std::string& p, const char* env_dir) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  const fs::path in_base = cfg.base_dir / path;
  if (fs::exists(in_base)) return in_base;
  if (env_dir) {
    if (const char* dir = std::getenv(env_dir)) {
      const fs::path in_env = fs::path(dir) / path;
      if (fs::exists(in_env)) return in_env;
    }
  }
  return in_base;
}

// JSON helpers: every known key is consumed; leftovers are reported.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidArgument(where_ + " must be a JSON object");
  }
  ~Reader() = default;

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(where_ + "." + key + ": " + e.what());
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw InvalidArgument("unknown config key " + where_ + "." + k);
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void apply_model(const Json& j, ModelSpec& m) {
  Reader r(j, "model");
  std::string kind(to_string(m.kind));
  r.get("kind", kind);
  m.kind = parse_model_kind(kind);
  r.get("beta", m.beta);
  r.get("side", m.side);
  r.get("coupling", m.coupling);
  r.get("periodic", m.periodic);
  r.get("n", m.n);
  r.get("nodes", m.nodes);
  r.get("degree", m.degree);
  r.get("penalty", m.penalty);
  r.get("gset", m.gset);
  r.get("file", m.file);
  r.finish();
}

void apply_tempering(const Json& j, PtConfig& p) {
  Reader r(j, "tempering");
  r.get("replicas", p.n_replicas);
  r.get("beta_min", p.beta_min);
  r.get("beta_max", p.beta_max);
  r.get("total_mcs", p.total_mcs);
  r.get("swap_interval", p.swap_interval_mcs);
  r.get("record_interval", p.record_interval_mcs);
  r.get("burn_in_records", p.burn_in_records);
  r.get("train_size", p.train_size);
  r.get("val_size", p.val_size);
  r.finish();
}

void apply_training(const Json& j, ExperimentConfig& c) {
  Reader r(j, "training");
  TrainConfig& t = c.training;
  r.get("epochs", t.epochs);
  r.get("minibatch", t.minibatch);
  r.get("k_gibbs", t.objective.k_gibbs);
  r.get("eval_interval", t.eval_interval);
  r.get("hidden", t.hidden);
  r.get("init_stddev", t.init_stddev);
  r.get("reset_chains", t.reset_chains_each_epoch);
  r.get("learning_rate", t.adam.learning_rate);
  r.get("adam_beta1", t.adam.beta1);
  r.get("adam_beta2", t.adam.beta2);
  r.get("adam_epsilon", t.adam.epsilon);
  r.get("checkpoint_interval", c.checkpoint_interval);
  r.finish();
}

ExperimentConfig full_preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output_dir = name;
  auto ladder = [&](std::size_t n, double lo, double hi) {
    c.tempering.n_replicas = n;
    c.tempering.beta_min = lo;
    c.tempering.beta_max = hi;
    c.model.beta = hi;
  };
  if (name == "ising-144") {
    c.model.kind = ModelKind::Ising2D;
    c.model.side = 12;
    c.model.coupling = 1.0;
    ladder(4, 0.25, 0.5);
  } else if (name == "sk-144") {
    c.model.kind = ModelKind::SK;
    c.model.n = 144;
    ladder(8, 0.5, 2.0);
  } else if (name == "mis-250") {
    c.model.kind = ModelKind::MIS;
    c.model.nodes = 250;
    c.model.degree = 20;
    c.model.penalty = 2.0;
    ladder(40, 0.1, 2.0);
  } else if (name == "gset-g1" || name == "gset-g6" || name == "gset-g14" || name == "gset-g18") {
    c.model.kind = ModelKind::MaxCut;
    const std::string id = name.substr(6);
    c.model.gset = "G" + id;
    if (id == "1") ladder(16, 0.25, 1.0);
    if (id == "6") ladder(16, 0.25, 2.0);
    if (id == "14") ladder(32, 0.25, 4.0);
    if (id == "18") ladder(32, 0.25, 2.5);
  } else {
    throw InvalidArgument("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace

std::string tool_version() { return RDL_VERSION; }

// Config

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw InvalidArgument("config needs at least one seed");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InvalidArgument("seeds must be distinct");
  }
  if (objectives.empty()) throw InvalidArgument("config needs at least one objective");
  tempering.validate();
  if (std::abs(tempering.beta_max - model.beta) > 1e-12 * model.beta) {
    throw InvalidArgument("tempering.beta_max must equal model.beta (records come from that replica)");
  }
  if (training.minibatch < 1 || training.minibatch > tempering.train_size) {
    throw InvalidArgument("training.minibatch must be in [1, train_size]");
  }
  if (training.eval_interval < 1) throw InvalidArgument("training.eval_interval must be >= 1");
  if (training.objective.k_gibbs < 1) throw InvalidArgument("training.k_gibbs must be >= 1");
  if (checkpoint_interval % training.eval_interval != 0) {
    throw InvalidArgument("checkpoint_interval must be a multiple of eval_interval");
  }
  if (sampling.steps < 0) throw InvalidArgument("sampling.steps must be >= 0");
  if (evaluation.hamming_k < 2) throw InvalidArgument("evaluation.hamming_k must be >= 2");
  if (!model.file.empty() && !fs::exists(resolve_input(*this, model.file, nullptr))) {
    throw InvalidArgument("model file not found: " + model.file);
  }
  if (model.file.empty() && model.kind == ModelKind::MaxCut &&
      !fs::exists(resolve_input(*this, model.gset, "RDL_GSET_DIR"))) {
    throw InvalidArgument("Gset file not found: '" + model.gset +
                          "' (looked in the config directory and $RDL_GSET_DIR)");
  }
}

std::vector<std::string> preset_names() {
  return {"ising-144", "sk-144", "mis-250", "gset-g1", "gset-g6", "gset-g14", "gset-g18"};
}

ExperimentConfig preset(const std::string& name, const std::string& scale) {
  ExperimentConfig c = full_preset(name);
  if (scale == "full") return c;
  if (scale != "desk") throw InvalidArgument("scale must be 'full' or 'desk'");

  c.name = name + "-desk";
  c.output_dir = c.name;
  switch (c.model.kind) {
    case ModelKind::Ising2D: c.model.side = 4; break;
    case ModelKind::SK: c.model.n = 16; break;
    case ModelKind::MIS:
      c.model.nodes = 20;
      c.model.degree = 4;
      c.tempering.n_replicas = 10;
      break;
    case ModelKind::MaxCut: break;
  }
  c.tempering.total_mcs = 70'000;
  c.tempering.burn_in_records = 1'000;
  c.tempering.train_size = 4'096;
  c.tempering.val_size = 1'024;
  c.training.epochs = c.model.kind == ModelKind::MaxCut ? 100 : 500;
  c.sampling.count = 4'096;
  return c;
}

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  Reader r(j, "config");
  std::string preset_name, scale = "full";
  r.get("preset", preset_name);
  r.get("scale", scale);
  ExperimentConfig c = preset_name.empty() ? ExperimentConfig{} : preset(preset_name, scale);
  if (preset_name.empty() && scale != "full") throw InvalidArgument("'scale' needs a 'preset'");
  c.base_dir = base_dir;

  r.get("name", c.name);
  r.get("seed", c.seed);
  r.get("seeds", c.seeds);
  std::string out = c.output_dir.string();
  r.get("output_dir", out);
  c.output_dir = out;
  if (const Json* m = r.child("model")) apply_model(*m, c.model);
  if (const Json* t = r.child("tempering")) apply_tempering(*t, c.tempering);
  if (const Json* t = r.child("training")) apply_training(*t, c);
  if (const Json* s = r.child("sampling")) {
    Reader sr(*s, "sampling");
    sr.get("count", c.sampling.count);
    sr.get("steps", c.sampling.steps);
    sr.finish();
  }
  if (const Json* e = r.child("evaluation")) {
    Reader er(*e, "evaluation");
    er.get("hamming_k", c.evaluation.hamming_k);
    er.get("pca_points", c.evaluation.pca_points);
    er.finish();
  }
  if (const Json* o = r.child("objectives")) {
    if (!o->is_array()) throw InvalidArgument("objectives must be an array");
    c.objectives.clear();
    for (const auto& v : *o) c.objectives.push_back(parse_objective(v.get<std::string>()));
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_text(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::string config_to_json(const ExperimentConfig& c, bool include_output_dir) {
  Json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  if (include_output_dir) j["output_dir"] = c.output_dir.generic_string();
  Json m;
  m["kind"] = to_string(c.model.kind);
  m["beta"] = c.model.beta;
  switch (c.model.kind) {
    case ModelKind::Ising2D:
      m["side"] = c.model.side;
      m["coupling"] = c.model.coupling;
      m["periodic"] = c.model.periodic;
      break;
    case ModelKind::SK: m["n"] = c.model.n; break;
    case ModelKind::MIS:
      m["nodes"] = c.model.nodes;
      m["degree"] = c.model.degree;
      m["penalty"] = c.model.penalty;
      break;
    case ModelKind::MaxCut: m["gset"] = c.model.gset; break;
  }
  if (!c.model.file.empty()) m["file"] = c.model.file;
  j["model"] = m;
  const PtConfig& p = c.tempering;
  j["tempering"] = {{"replicas", p.n_replicas},         {"beta_min", p.beta_min},
                    {"beta_max", p.beta_max},           {"total_mcs", p.total_mcs},
                    {"swap_interval", p.swap_interval_mcs}, {"record_interval", p.record_interval_mcs},
                    {"burn_in_records", p.burn_in_records}, {"train_size", p.train_size},
                    {"val_size", p.val_size}};
  const TrainConfig& t = c.training;
  j["training"] = {{"epochs", t.epochs},
                   {"minibatch", t.minibatch},
                   {"k_gibbs", t.objective.k_gibbs},
                   {"eval_interval", t.eval_interval},
                   {"hidden", t.hidden},
                   {"init_stddev", t.init_stddev},
                   {"reset_chains", t.reset_chains_each_epoch},
                   {"learning_rate", t.adam.learning_rate},
                   {"adam_beta1", t.adam.beta1},
                   {"adam_beta2", t.adam.beta2},
                   {"adam_epsilon", t.adam.epsilon},
                   {"checkpoint_interval", c.checkpoint_interval}};
  j["sampling"] = {{"count", c.sampling.count}, {"steps", c.sampling.steps}};
  j["evaluation"] = {{"hamming_k", c.evaluation.hamming_k}, {"pca_points", c.evaluation.pca_points}};
  Json objs = Json::array();
  for (auto o : c.objectives) objs.push_back(to_string(o));
  j["objectives"] = objs;
  return j.dump();
}

std::uint64_t pt_seed(const ExperimentConfig& c) { return derive_seed(c.seed, "pt"); }
std::uint64_t instance_seed(const ExperimentConfig& c) { return derive_seed(c.seed, "instance"); }
std::uint64_t train_seed(std::uint64_t run_seed) { return derive_seed(run_seed, "train"); }
std::uint64_t sample_seed(std::uint64_t run_seed, ObjectiveKind o) {
  return derive_seed(run_seed, "sample/" + std::string(to_string(o)));
}

TargetModel build_model(const ExperimentConfig& c) {
  const ModelSpec& m = c.model;
  if (!m.file.empty()) {
    std::ifstream in(resolve_input(c, m.file, nullptr));
    if (!in) throw IoError("cannot open model file " + m.file);
    TargetModel model = read_model(in);
    return std::abs(model.beta() - m.beta) > 0.0 ? model.with_beta(m.beta) : model;
  }
  Rng rng(instance_seed(c));
  switch (m.kind) {
    case ModelKind::Ising2D: return TargetModel(IsingLattice{m.side, m.coupling, m.periodic}, m.beta);
    case ModelKind::SK: return TargetModel(sample_sk_couplings(m.n, rng), m.beta);
    case ModelKind::MIS:
      return TargetModel(MisInstance{random_regular_graph(m.nodes, m.degree, rng), m.penalty}, m.beta);
    case ModelKind::MaxCut:
      return TargetModel(load_gset(resolve_input(c, m.gset, "RDL_GSET_DIR").string()), m.beta);
  }
  throw InvalidArgument("unknown model kind");
}

fs::path RunPaths::run_dir(ObjectiveKind o, std::uint64_t seed) const {
  return root / "runs" / std::string(to_string(o)) / ("seed-" + std::to_string(seed));
}

RunPaths paths_for(const ExperimentConfig& c) {
  fs::path out = c.output_dir;
  if (out.is_relative()) {
    if (const char* root = std::getenv("RDL_OUTPUT_ROOT")) out = fs::path(root) / out;
  }
  return RunPaths{out};
}

// generate-data

GenerateDataSummary cmd_generate_data(const ExperimentConfig& cfg) {
  cfg.validate();
  const TargetModel model = build_model(cfg);
  const RunPaths paths = paths_for(cfg);
  OutputTransaction tx;

  const std::string model_text = model.describe();
  fs::create_directories(paths.train_data().parent_path());
  write_text(tx.add(paths.model()), model_text);

  PtConfig pt = cfg.tempering;
  pt.seed = pt_seed(cfg);
  PtResult res = generate_dataset(model, pt);
  const std::string echo = config_to_json(cfg, false);
  for (Dataset* d : {&res.train, &res.val}) {
    d->meta.model_hash = content_hash(model_text);
    d->meta.config_json = echo;
  }
  save_dataset(tx.add(paths.train_data()), res.train);
  tx.add(paths.train_data().string() + ".json");
  save_dataset(tx.add(paths.val_data()), res.val);
  tx.add(paths.val_data().string() + ".json");

  GenerateDataSummary summary{res.train.size(), res.val.size(), {}};
  for (std::size_t k = 0; k + 1 < pt.n_replicas; ++k) summary.swap_rates.push_back(res.stats.swap_rate(k));
  Json extra;
  extra["swap_acceptance"] = summary.swap_rates;
  extra["flip_acceptance"] = res.stats.flip_acceptance;
  extra["ladder"] = build_ladder(pt.n_replicas, pt.beta_min, pt.beta_max).betas;
  write_manifest(tx.add(paths.manifest("generate-data")), cfg, "generate-data",
                 {paths.model(), paths.train_data(), paths.val_data()}, paths.root, extra);
  tx.commit();
  return summary;
}

// train

namespace {

struct LoadedData {
  TargetModel model;
  Dataset train;
  Dataset val;
};

LoadedData load_generated(const ExperimentConfig& cfg, const RunPaths& paths) {
  for (const auto& p : {paths.model(), paths.train_data(), paths.val_data()}) {
    if (!fs::exists(p)) throw IoError("missing " + p.string() + " (run generate-data first)");
  }
  const std::string text = read_text(paths.model());
  LoadedData d{parse_model(text), load_dataset(paths.train_data()), load_dataset(paths.val_data())};
  const std::string hash = content_hash(text);
  if (d.train.meta.model_hash != hash || d.val.meta.model_hash != hash) {
    throw IoError("datasets were generated for a different model than model.txt");
  }
  if (std::abs(d.model.beta() - cfg.model.beta) > 1e-12 * cfg.model.beta) {
    throw InvalidArgument("model.txt beta differs from the config's model.beta");
  }
  return d;
}

}  // namespace

TrainSummary cmd_train(const ExperimentConfig& cfg, ObjectiveKind objective, std::uint64_t seed) {
  cfg.validate();
  const RunPaths paths = paths_for(cfg);
  const LoadedData data = load_generated(cfg, paths);

  TrainConfig tc = cfg.training;
  tc.seed = train_seed(seed);
  tc.objective.kind = objective;

  const fs::path dir = paths.run_dir(objective, seed);
  fs::create_directories(dir);
  OutputTransaction tx;
  std::ofstream metrics(tx.add(paths.metrics(objective, seed)), std::ios::trunc);
  std::ofstream timing(tx.add(paths.timing(objective, seed)), std::ios::trunc);
  if (!metrics || !timing) throw IoError("cannot write metrics in " + dir.string());
  metrics << "epoch,objective,r_theta\n";
  timing << "epoch,wall_seconds\n";

  std::vector<fs::path> checkpoints;
  auto on_eval = [&](const MetricsRecord& r, const RbmParams& p) {
    metrics << r.epoch << ',' << fmt(r.objective) << ',' << fmt(r.r_theta) << '\n' << std::flush;
    timing << r.epoch << ',' << fmt(r.wall_seconds) << '\n';
    if (cfg.checkpoint_interval && r.epoch % cfg.checkpoint_interval == 0) {
      std::ostringstream name;
      name << "epoch-" << std::setw(6) << std::setfill('0') << r.epoch << ".rdp";
      const fs::path ck = dir / "checkpoints" / name.str();
      fs::create_directories(ck.parent_path());
      save_params(tx.add(ck), p);
      checkpoints.push_back(ck);
    }
  };
  const TrainResult res = train(data.train, data.val, data.model, tc, on_eval);
  metrics.close();
  timing.close();
  save_params(tx.add(paths.params(objective, seed)), res.params);

  TrainSummary s;
  s.initial_r_theta = res.initial_r_theta;
  s.final_r_theta = res.metrics.empty() ? res.initial_r_theta : res.metrics.back().r_theta;
  s.metric_rows = res.metrics.size();

  std::vector<fs::path> arts{paths.params(objective, seed), paths.metrics(objective, seed)};
  arts.insert(arts.end(), checkpoints.begin(), checkpoints.end());
  Json extra;
  extra["objective"] = to_string(objective);
  extra["seed"] = seed;
  extra["initial_r_theta"] = s.initial_r_theta;
  extra["final_r_theta"] = s.final_r_theta;
  const std::string tag = "train-" + std::string(to_string(objective)) + "-seed-" + std::to_string(seed);
  write_manifest(tx.add(paths.manifest(tag)), cfg, "train", arts, paths.root, extra);
  tx.commit();
  return s;
}

std::vector<TrainSummary> cmd_train_all(const ExperimentConfig& cfg, unsigned jobs) {
  std::vector<std::pair<ObjectiveKind, std::uint64_t>> cells;
  for (auto o : cfg.objectives)
    for (auto s : cfg.seeds) cells.emplace_back(o, s);
  std::vector<TrainSummary> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      try {
        out[i] = cmd_train(cfg, cells[i].first, cells[i].second);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// sample

void cmd_sample(const SampleArgs& a) {
  if (!fs::exists(a.checkpoint)) throw IoError("checkpoint not found: " + a.checkpoint.string());
  if (!fs::exists(a.init)) throw IoError("initial dataset not found: " + a.init.string());
  const RbmParams params = load_params(a.checkpoint);
  const Dataset init = load_dataset(a.init);
  if (init.nx() != params.nx()) {
    throw DimensionError("checkpoint Nx (" + std::to_string(params.nx()) + ") differs from dataset Nx (" +
                         std::to_string(init.nx()) + ")");
  }
  Rng rng(a.seed);
  Dataset out = generate_samples(params, init, a.steps, rng, a.count);
  out.meta.model_hash = init.meta.model_hash;
  Json echo;
  echo["checkpoint_hash"] = file_content_hash(a.checkpoint);
  echo["init_hash"] = file_content_hash(a.init);
  echo["steps"] = a.steps;
  echo["count"] = out.size();
  echo["seed"] = a.seed;
  out.meta.config_json = echo.dump();

  OutputTransaction tx;
  if (a.output.has_parent_path()) fs::create_directories(a.output.parent_path());
  save_dataset(tx.add(a.output), out);
  tx.add(a.output.string() + ".json");
  tx.commit();
}

void cmd_sample(const ExperimentConfig& cfg, ObjectiveKind objective, std::uint64_t seed) {
  cfg.validate();
  const RunPaths paths = paths_for(cfg);
  SampleArgs a;
  a.checkpoint = paths.params(objective, seed);
  a.init = paths.train_data();
  a.output = paths.samples(objective, seed);
  a.steps = cfg.sampling.steps;
  a.count = cfg.sampling.count;
  a.seed = sample_seed(seed, objective);
  OutputTransaction tx;
  tx.add(a.output);
  tx.add(a.output.string() + ".json");
  cmd_sample(a);
  Json extra;
  extra["objective"] = to_string(objective);
  extra["seed"] = seed;
  const std::string tag = "sample-" + std::string(to_string(objective)) + "-seed-" + std::to_string(seed);
  write_manifest(tx.add(paths.manifest(tag)), cfg, "sample", {a.output}, paths.root, extra);
  tx.commit();
}

// evaluate

void cmd_evaluate(const ExperimentConfig& cfg) {
  cfg.validate();
  const RunPaths paths = paths_for(cfg);
  const LoadedData data = load_generated(cfg, paths);
  const EmpiricalEnergyDist train_dist = EmpiricalEnergyDist::of(data.model, data.train);
  const PcaModel pca = fit_pca(data.train);

  const fs::path dir = paths.eval_dir();
  fs::create_directories(dir);
  OutputTransaction tx;
  std::ostringstream metrics, summary, hamming, pcs;
  metrics << "method,seed,metric,value\n";
  summary << "method,metric,mean,stderr,n\n";
  hamming << "source,seed,distance,count\n";
  pcs << "source,seed,pc1,pc2\n";

  auto dump_sample_stats = [&](const std::string& source, const std::string& seed_label,
                               const Dataset& ds) {
    const std::size_t k = std::min(cfg.evaluation.hamming_k, ds.size());
    Rng hrng(derive_seed(cfg.seed, "hamming/" + source + "/" + seed_label));
    const auto counts = hamming_histogram(ds, k, hrng).counts_by_distance();
    for (std::size_t d = 0; d < counts.size(); ++d)
      hamming << source << ',' << seed_label << ',' << d << ',' << counts[d] << '\n';

    Rng prng(derive_seed(cfg.seed, "pca/" + source + "/" + seed_label));
    const std::size_t n = std::min(cfg.evaluation.pca_points, ds.size());
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + prng.below(idx.size() - i)]);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xy = pca.project(ds[idx[i]]);
      pcs << source << ',' << seed_label << ',' << fmt(xy[0]) << ',' << fmt(xy[1]) << '\n';
    }
  };

  dump_sample_stats("train", "", data.train);
  std::vector<fs::path> inputs;
  for (auto o : cfg.objectives) {
    std::vector<double> w_values, r_values;
    for (auto s : cfg.seeds) {
      const fs::path sp = paths.samples(o, s);
      const fs::path pp = paths.params(o, s);
      if (fs::exists(sp)) {
        const Dataset samples = load_dataset(sp);
        if (samples.nx() != data.model.nx()) throw DimensionError("sample file Nx differs from the model: " + sp.string());
        const double w = wasserstein_1d(EmpiricalEnergyDist::of(data.model, samples), train_dist);
        w_values.push_back(w);
        metrics << objective_label(o) << ',' << s << ",wasserstein," << fmt(w) << '\n';
        dump_sample_stats(objective_label(o), std::to_string(s), samples);
        inputs.push_back(sp);
      }
      if (fs::exists(pp)) {
        const RbmParams params = load_params(pp);
        if (params.nx() != data.model.nx()) throw DimensionError("checkpoint Nx differs from the model: " + pp.string());
        const double r = r_theta(params, data.model, data.val);
        r_values.push_back(r);
        metrics << objective_label(o) << ',' << s << ",r_theta," << fmt(r) << '\n';
        inputs.push_back(pp);
      }
    }
    for (const auto& [metric, vals] : {std::pair{"wasserstein", &w_values}, std::pair{"r_theta", &r_values}}) {
      if (vals->empty()) continue;
      const MeanStderr ms = mean_stderr(*vals);
      summary << objective_label(o) << ',' << metric << ',' << fmt(ms.mean) << ',' << fmt(ms.std_error) << ','
              << ms.n << '\n';
    }
  }

  const std::vector<std::pair<std::string, std::string>> files{
      {"metrics.csv", metrics.str()}, {"summary.csv", summary.str()},
      {"hamming.csv", hamming.str()}, {"pca.csv", pcs.str()}};
  std::vector<fs::path> arts;
  for (const auto& [name, text] : files) {
    write_text(tx.add(dir / name), text);
    arts.push_back(dir / name);
  }
  write_manifest(tx.add(paths.manifest("evaluate")), cfg, "evaluate", arts, paths.root);
  tx.commit();
}

std::string cmd_evaluate_files(const AdHocEvalArgs& a) {
  std::ifstream min(a.model);
  if (!min) throw IoError("cannot open model file " + a.model.string());
  const TargetModel model = read_model(min);
  const Dataset ref = load_dataset(a.reference);
  if (ref.nx() != model.nx()) throw DimensionError("reference Nx differs from the model");
  const EmpiricalEnergyDist ref_dist = EmpiricalEnergyDist::of(model, ref);

  std::optional<double> r;
  if (!a.checkpoint.empty()) {
    const RbmParams params = load_params(a.checkpoint);
    if (params.nx() != model.nx()) throw DimensionError("checkpoint Nx differs from the model");
    r = r_theta(params, model, load_dataset(a.val.empty() ? a.reference : a.val));
  }
  std::ostringstream os;
  os << "file,wasserstein" << (r ? ",r_theta" : "") << '\n';
  for (const auto& p : a.samples) {
    const Dataset s = load_dataset(p);
    if (s.nx() != model.nx()) throw DimensionError("sample Nx differs from the model: " + p.string());
    os << p.generic_string() << ',' << fmt(wasserstein_1d(EmpiricalEnergyDist::of(model, s), ref_dist));
    if (r) os << ',' << fmt(*r);
    os << '\n';
  }
  if (!a.output.empty()) write_text(a.output, os.str());
  return os.str();
}

// report

std::string cmd_report(const ExperimentConfig& cfg) {
  const RunPaths paths = paths_for(cfg);
  const fs::path summary_path = paths.eval_dir() / "summary.csv";
  if (!fs::exists(summary_path)) throw IoError("missing " + summary_path.string() + " (run evaluate first)");
  std::istringstream in(read_text(summary_path));
  std::string line;
  std::getline(in, line);  // header

  std::map<std::pair<std::string, std::string>, std::string> cell;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string tok; std::getline(ls, tok, ',');) f.push_back(tok);
    if (f.size() != 5) throw ParseError("summary.csv row must have 5 fields", 0);
    std::ostringstream v;
    v << std::fixed << std::setprecision(3) << std::stod(f[2]) << " ± " << std::stod(f[3]) << " (n=" << f[4] << ")";
    cell[{f[1], f[0]}] = v.str();
  }

  std::ostringstream md;
  md << "# " << cfg.name << "\n\n";
  md << "Mean ± standard error over seeds.\n\n| metric |";
  for (auto o : cfg.objectives) md << ' ' << to_string(o) << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < cfg.objectives.size(); ++i) md << "---|";
  md << '\n';
  for (const char* metric : {"wasserstein", "r_theta"}) {
    md << "| " << metric << " |";
    for (auto o : cfg.objectives) {
      auto it = cell.find({metric, std::string(to_string(o))});
      md << ' ' << (it == cell.end() ? "-" : it->second) << " |";
    }
    md << '\n';
  }
  write_text(paths.root / "report.md", md.str());
  return md.str();
}

}  // namespace rdl
