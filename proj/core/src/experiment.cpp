#include "dmace/experiment.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmace/checkpoint.hpp"
#include "dmace/errors.hpp"
#include "dmace/rng.hpp"
#include "dmace/solvers.hpp"
#include "dmace/theory.hpp"

namespace dmace {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok)
      throw ConfigError(std::string("config: unknown key \"") + item.key() +
                        "\" in " + where);
  }
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot write " + path.string());
  out << text;
  if (!out) throw PersistenceError("short write to " + path.string());
}

bool is_perfect_square(std::size_t d) {
  std::size_t r = static_cast<std::size_t>(std::llround(std::sqrt(double(d))));
  return r * r == d;
}

std::size_t grid_side(std::size_t d) {
  return static_cast<std::size_t>(std::llround(std::sqrt(double(d))));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const fs::path& path) {
  return from_json_string(read_text_file(path));
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    check_keys(j, "top level",
               {"name", "seed", "output_dir", "dma", "grid", "datasets",
                "snr_db", "layers", "layer_list", "dict_sizes",
                "pilot_counts", "training", "solver", "eval_snr_db"});
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("dma")) {
      const json& d = j["dma"];
      check_keys(d, "dma",
                 {"n_d", "n_e", "wavelength", "dx", "dy", "alpha", "beta"});
      c.dma.n_d = d.value("n_d", c.dma.n_d);
      c.dma.n_e = d.value("n_e", c.dma.n_e);
      c.dma.wavelength = d.value("wavelength", c.dma.wavelength);
      c.dma.dx = d.value("dx", c.dma.dx);
      c.dma.dy = d.value("dy", c.dma.dy);
      c.dma.alpha = d.value("alpha", c.dma.alpha);
      c.dma.beta = d.value("beta", c.dma.beta);
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      check_keys(g, "grid", {"k_theta", "k_phi"});
      c.k_theta = g.value("k_theta", c.k_theta);
      c.k_phi = g.value("k_phi", c.k_phi);
    }
    if (j.contains("datasets")) {
      const json& d = j["datasets"];
      check_keys(d, "datasets", {"train", "test", "validation"});
      c.train_count = d.value("train", c.train_count);
      c.test_count = d.value("test", c.test_count);
      c.validation_count = d.value("validation", c.validation_count);
    }
    if (j.contains("snr_db"))
      c.snr_list = j["snr_db"].get<std::vector<double>>();
    c.layers = j.value("layers", c.layers);
    if (j.contains("layer_list"))
      c.layer_list = j["layer_list"].get<std::vector<std::size_t>>();
    if (j.contains("dict_sizes"))
      c.dict_sizes = j["dict_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("pilot_counts"))
      c.pilot_counts = j["pilot_counts"].get<std::vector<std::size_t>>();
    if (j.contains("training")) {
      const json& t = j["training"];
      check_keys(t, "training",
                 {"batch_size", "learning_rate", "max_epochs", "window",
                  "shards"});
      c.training.batch_size = t.value("batch_size", c.training.batch_size);
      c.training.learning_rate =
          t.value("learning_rate", c.training.learning_rate);
      c.training.max_epochs = t.value("max_epochs", c.training.max_epochs);
      c.training.window = t.value("window", c.training.window);
      c.training.shards = t.value("shards", c.training.shards);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      check_keys(s, "solver", {"eta", "ista_iters", "fista_iters"});
      c.solver_eta = s.value("eta", c.solver_eta);
      c.ista_iters = s.value("ista_iters", c.ista_iters);
      c.fista_iters = s.value("fista_iters", c.fista_iters);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad field type: ") + e.what());
  }
}

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["dma"] = {{"n_d", dma.n_d},   {"n_e", dma.n_e},
              {"wavelength", dma.wavelength},
              {"dx", dma.dx},     {"dy", dma.dy},
              {"alpha", dma.alpha}, {"beta", dma.beta}};
  j["grid"] = {{"k_theta", k_theta}, {"k_phi", k_phi}};
  j["datasets"] = {{"train", train_count},
                   {"test", test_count},
                   {"validation", validation_count}};
  j["snr_db"] = snr_list;
  j["layers"] = layers;
  j["layer_list"] = layer_list;
  j["dict_sizes"] = dict_sizes;
  j["pilot_counts"] = pilot_counts;
  j["training"] = {{"batch_size", training.batch_size},
                   {"learning_rate", training.learning_rate},
                   {"max_epochs", training.max_epochs},
                   {"window", training.window},
                   {"shards", training.shards}};
  j["solver"] = {{"eta", solver_eta},
                 {"ista_iters", ista_iters},
                 {"fista_iters", fista_iters}};
  return j.dump(2);
}

std::string ExperimentConfig::config_hash() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(to_json_string()));
  return buf;
}

void ExperimentConfig::validate() const {
  dma.validate();
  if (name.empty()) throw ConfigError("config: name must be nonempty");
  if (k_theta < 1 || k_phi < 1)
    throw ConfigError("config: grid sides must be >= 1");
  if (train_count < 1 || test_count < 1 || validation_count < 1)
    throw ConfigError("config: dataset sizes must be >= 1");
  if (snr_list.empty()) throw ConfigError("config: snr_db must be nonempty");
  if (layers < 1) throw ConfigError("config: layers must be >= 1");
  if (layer_list.empty())
    throw ConfigError("config: layer_list must be nonempty");
  for (std::size_t l : layer_list)
    if (l < 1) throw ConfigError("config: layer_list entries must be >= 1");
  if (dict_sizes.empty())
    throw ConfigError("config: dict_sizes must be nonempty");
  for (std::size_t d : dict_sizes)
    if (d < 1 || !is_perfect_square(d))
      throw ConfigError("config: dict_sizes entries must be perfect squares");
  if (pilot_counts.empty())
    throw ConfigError("config: pilot_counts must be nonempty");
  for (std::size_t p : pilot_counts)
    if (p < 1) throw ConfigError("config: pilot_counts entries must be >= 1");
  if (!(solver_eta > 0.0)) throw ConfigError("config: solver eta must be > 0");
  if (ista_iters < 1 || fista_iters < 1)
    throw ConfigError("config: solver iteration counts must be >= 1");
  training.validate();
}

Scenario make_scenario(const ExperimentConfig& cfg) {
  cfg.validate();
  Scenario sc;
  sc.cfg = cfg;
  sc.dict = build_grid_dictionary(cfg.k_phi, cfg.k_theta, cfg.dma);
  sc.h = build_h(cfg.dma);
  sc.h_diag = diagonal_of(sc.h);
  Rng rng(derive_seed(cfg.seed, "q-ran"));
  sc.q_fixed = build_q(random_dma_weights(cfg.dma, rng), cfg.dma);
  return sc;
}

Dataset make_train_dataset(const ExperimentConfig& cfg,
                           const GridDictionary& dict) {
  return generate_dataset(cfg.train_count, SnrPolicy::uniform(0.0, 21.0),
                          cfg.dma, dict, derive_seed(cfg.seed, "dataset-train"));
}

Dataset make_test_dataset(const ExperimentConfig& cfg,
                          const GridDictionary& dict) {
  return generate_dataset(cfg.test_count, SnrPolicy::uniform(0.0, 21.0),
                          cfg.dma, dict, derive_seed(cfg.seed, "dataset-test"));
}

Dataset make_validation_dataset(const ExperimentConfig& cfg,
                                const GridDictionary& dict, double snr_db) {
  const auto key = static_cast<std::uint64_t>(std::llround(snr_db * 1000.0));
  return generate_dataset(cfg.validation_count, SnrPolicy::at(snr_db), cfg.dma,
                          dict, derive_seed(cfg.seed, "dataset-val", key));
}

double nmse(const ComplexVector& g_hat, const ComplexVector& g_star) {
  return nmse_ratio(g_hat, g_star);
}

double nmse_db(double ratio) {
  if (!(ratio > 0.0)) throw DomainError("nmse_db: ratio must be > 0");
  return 10.0 * std::log10(ratio);
}

MultiPilotObservation multi_pilot_observe(const ComplexVector& g,
                                          double snr_db,
                                          const std::vector<DmaWeights>& w,
                                          const DmaConfig& cfg, Rng& rng) {
  if (w.empty())
    throw DomainError("multi_pilot_observe: need at least one pilot");
  if (g.cols() != 1 || g.rows() != cfg.elements())
    throw ShapeError("multi_pilot_observe: channel length mismatch");
  const std::size_t n = cfg.elements();
  const double energy = l2_norm(g) * l2_norm(g);
  if (energy == 0.0)
    throw DomainError("multi_pilot_observe: zero channel has undefined snr");
  const double sigma2 =
      energy / (static_cast<double>(n) * std::pow(10.0, snr_db / 10.0));
  const double s = std::sqrt(sigma2 / 2.0);

  const ComplexMatrix h = build_h(cfg);
  MultiPilotObservation out;
  out.sigma = std::sqrt(sigma2);
  out.z = ComplexVector(w.size() * cfg.n_d, 1);
  out.sensing = ComplexMatrix(w.size() * cfg.n_d, n);
  for (std::size_t p = 0; p < w.size(); ++p) {
    ComplexVector y(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      y[i] = g[i] + cplx{s * re, s * im};
    }
    const ComplexMatrix q = build_q(w[p], cfg);
    const ComplexMatrix qh = cmatmul(q, h);
    const ComplexVector z_p = cmatmul(qh, y);
    for (std::size_t r = 0; r < cfg.n_d; ++r) {
      out.z[p * cfg.n_d + r] = z_p[r];
      for (std::size_t c = 0; c < n; ++c)
        out.sensing(p * cfg.n_d + r, c) = qh(r, c);
    }
  }
  return out;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "snr") return SweepAxis::kSnr;
  if (s == "layers") return SweepAxis::kLayers;
  if (s == "dict") return SweepAxis::kDict;
  if (s == "compression") return SweepAxis::kCompression;
  throw ConfigError("sweep: unknown axis \"" + s +
                    "\" (expected snr|layers|dict|compression)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSnr: return "snr";
    case SweepAxis::kLayers: return "layers";
    case SweepAxis::kDict: return "dict";
    case SweepAxis::kCompression: return "compression";
  }
  throw DomainError("sweep: bad axis enum");
}

namespace {

constexpr double kEvalSnrDb = 12.0;  // fixed-SNR axes evaluate here

std::string model_tag(const std::string& arch, std::size_t layers,
                      LossMode mode) {
  return arch + "-L" + std::to_string(layers) +
         (mode == LossMode::kSupervised ? "-sup" : "-selfsup");
}

struct TrainingNote {
  std::string tag;
  double seconds = 0.0;
  std::size_t best_epoch = 0;
  double best_test_nmse = 0.0;
  bool converged = false;
};

// Shared state for one sweep run: lazily built datasets, model cache on
// disk keyed by the config hash, and bookkeeping for the manifest.
struct SweepContext {
  const ExperimentConfig& cfg;
  Scenario sc;
  std::string hash;
  fs::path cache_dir;
  fs::path ckpt_dir;
  fs::path log_dir;
  std::optional<Dataset> train_ds;
  std::optional<Dataset> test_ds;
  std::vector<TrainingNote> training_notes;

  explicit SweepContext(const ExperimentConfig& c)
      : cfg(c), sc(make_scenario(c)), hash(c.config_hash()) {}

  const Dataset& train() {
    if (!train_ds) train_ds = make_train_dataset(cfg, sc.dict);
    return *train_ds;
  }
  const Dataset& test() {
    if (!test_ds) test_ds = make_test_dataset(cfg, sc.dict);
    return *test_ds;
  }

  TrainConfig train_config(std::uint64_t train_seed, LossMode mode) const {
    TrainConfig tc = cfg.training;
    tc.seed = train_seed;
    tc.loss = mode;
    return tc;
  }

  // Returns the trained coefficient network for depth L, loading it from
  // the checkpoint cache when a run with the same config already made one.
  std::pair<ListaParams, std::uint64_t> lista_model(std::size_t l,
                                                    LossMode mode) {
    const std::uint64_t mode_ix = mode == LossMode::kSupervised ? 0 : 1;
    const std::uint64_t train_seed =
        derive_seed(cfg.seed, "train-lista", l, mode_ix);
    const std::string tag = model_tag("lista", l, mode);
    const fs::path ckpt = ckpt_dir / (tag + "-" + hash + ".ckpt");
    if (fs::exists(ckpt))
      return {lista_from_checkpoint(load_checkpoint(ckpt)), train_seed};
    Rng init_rng(derive_seed(cfg.seed, "init-lista", l, mode_ix));
    ListaParams init =
        init_lista(sc.dict.size(), cfg.dma.n_d, l, init_rng);
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult<ListaParams> res =
        train_lista(init, sc.q_fixed, sc.h_diag, sc.dict, train(), test(),
                    train_config(train_seed, mode));
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    CheckpointMeta meta{"lista", l, cfg.dma.n_d, cfg.dma.n_e,
                        sc.dict.size(), train_seed};
    save_checkpoint(ckpt, make_checkpoint(res.params, meta));
    write_epoch_log_csv(log_dir / (tag + ".csv"), res.log);
    training_notes.push_back({tag, dt.count(), res.best_epoch,
                              res.best_test_nmse, res.converged});
    return {res.params, train_seed};
  }

  std::pair<ListaSmoParams, std::uint64_t> smo_model(std::size_t l,
                                                     LossMode mode) {
    const std::uint64_t mode_ix = mode == LossMode::kSupervised ? 0 : 1;
    const std::uint64_t train_seed =
        derive_seed(cfg.seed, "train-smo", l, mode_ix);
    const std::string tag = model_tag("lista-smo", l, mode);
    const fs::path ckpt = ckpt_dir / (tag + "-" + hash + ".ckpt");
    if (fs::exists(ckpt))
      return {lista_smo_from_checkpoint(load_checkpoint(ckpt)), train_seed};
    Rng init_rng(derive_seed(cfg.seed, "init-smo", l, mode_ix));
    ListaSmoParams init = init_lista_smo(cfg.dma, sc.dict.size(), l, init_rng);
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult<ListaSmoParams> res = train_lista_smo(
        init, sc.h_diag, train(), test(), train_config(train_seed, mode));
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    CheckpointMeta meta{"lista-smo", l, cfg.dma.n_d, cfg.dma.n_e,
                        sc.dict.size(), train_seed};
    save_checkpoint(ckpt, make_checkpoint(res.params, meta));
    write_epoch_log_csv(log_dir / (tag + ".csv"), res.log);
    training_notes.push_back({tag, dt.count(), res.best_epoch,
                              res.best_test_nmse, res.converged});
    return {res.params, train_seed};
  }
};

double dataset_mean_nmse(
    const Dataset& val,
    const std::function<ComplexVector(const ChannelSample&)>& estimate) {
  if (val.count() == 0) throw DomainError("nmse: empty validation set");
  double total = 0.0;
  for (const ChannelSample& s : val.samples)
    total += nmse_ratio(estimate(s), s.g_star);
  return total / static_cast<double>(val.count());
}

}  // namespace

double evaluate_nmse_zero(const Dataset& val) {
  const std::size_t n = val.dma.n_d * val.dma.n_e;
  return dataset_mean_nmse(
      val, [&](const ChannelSample&) { return ComplexVector(n, 1); });
}

double evaluate_nmse_fista(const Scenario& sc, const GridDictionary& dict,
                           const Dataset& val) {
  const ComplexMatrix psi =
      cmatmul(cmatmul(sc.q_fixed, sc.h), dict.atoms);
  return dataset_mean_nmse(val, [&](const ChannelSample& s) {
    LassoProblem p{psi, dma_receive(sc.q_fixed, sc.h, s.y),
                   sc.cfg.solver_eta};
    SolveTrace t = fista(p, sc.cfg.solver_eta, sc.cfg.fista_iters);
    return cmatmul(dict.atoms, t.alpha);
  });
}

double evaluate_nmse_lista(const Scenario& sc, const ListaParams& p,
                           const Dataset& val) {
  return dataset_mean_nmse(val, [&](const ChannelSample& s) {
    return lista_estimate(p, dma_receive(sc.q_fixed, sc.h, s.y), sc.dict);
  });
}

double evaluate_nmse_smo(const Scenario& sc, const ListaSmoParams& p,
                         const Dataset& val) {
  return dataset_mean_nmse(val, [&](const ChannelSample& s) {
    return lista_smo_forward(p, s.y, sc.h_diag, sc.cfg.dma);
  });
}

double evaluate_nmse_multi_pilot(const Scenario& sc, std::size_t pilots,
                                 const Dataset& val, double snr_db) {
  const ExperimentConfig& cfg = sc.cfg;
  std::vector<DmaWeights> w;
  for (std::size_t p = 0; p < pilots; ++p) {
    Rng rng(derive_seed(cfg.seed, "pilot-weights", pilots, p));
    w.push_back(random_dma_weights(cfg.dma, rng));
  }
  std::size_t index = 0;
  return dataset_mean_nmse(val, [&](const ChannelSample& s) {
    Rng rng(derive_seed(cfg.seed, "multi-pilot", pilots, index++));
    MultiPilotObservation obs =
        multi_pilot_observe(s.g_star, snr_db, w, cfg.dma, rng);
    LassoProblem p{cmatmul(obs.sensing, sc.dict.atoms), obs.z,
                   cfg.solver_eta};
    SolveTrace t = fista(p, cfg.solver_eta, cfg.fista_iters);
    return cmatmul(sc.dict.atoms, t.alpha);
  });
}

namespace {

json row_to_json(const SweepRow& r) {
  return json{{"axis_value", r.axis_value}, {"algorithm", r.algorithm},
              {"nmse", r.nmse},             {"nmse_db", r.nmse_db},
              {"runtime_s", r.runtime_s},   {"seed", r.seed},
              {"config_hash", r.config_hash},
              {"realization", r.realization}};
}

SweepRow row_from_json(const json& j) {
  SweepRow r;
  r.axis_value = j.at("axis_value").get<double>();
  r.algorithm = j.at("algorithm").get<std::string>();
  r.nmse = j.at("nmse").get<double>();
  r.nmse_db = j.at("nmse_db").get<double>();
  r.runtime_s = j.at("runtime_s").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.realization = j.value("realization", std::string{});
  return r;
}

// Runs one sweep cell unless a cached result with a matching config hash
// already exists; either way the finished row lands in rows. Failures are
// recorded and the sweep moves on.
void run_point(SweepContext& ctx, const std::string& axis,
               std::size_t point_ix, const std::string& algorithm,
               double axis_value, const std::string& realization,
               std::uint64_t seed_hint, std::vector<SweepRow>& rows,
               std::vector<std::string>& errors,
               const std::function<double()>& compute_nmse) {
  const fs::path cache_file =
      ctx.cache_dir /
      (axis + "-" + std::to_string(point_ix) + "-" + algorithm + ".json");
  try {
    if (fs::exists(cache_file)) {
      const json j = json::parse(read_text_file(cache_file));
      if (j.value("config_hash", std::string{}) == ctx.hash) {
        rows.push_back(row_from_json(j));
        return;
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    const double ratio = compute_nmse();
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    SweepRow r;
    r.axis_value = axis_value;
    r.algorithm = algorithm;
    r.nmse = ratio;
    r.nmse_db = nmse_db(ratio);
    r.runtime_s = dt.count();
    r.seed = seed_hint;
    r.config_hash = ctx.hash;
    r.realization = realization;
    write_text_file(cache_file, row_to_json(r).dump(2));
    rows.push_back(r);
  } catch (const std::exception& e) {
    errors.push_back(axis + "[" + std::to_string(point_ix) + "]." +
                     algorithm + ": " + e.what());
  }
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "axis_value,algorithm,nmse,nmse_db,runtime_s,seed,config_hash\n";
  for (const SweepRow& r : rows) {
    out += fmt_g17(r.axis_value);
    out += ',';
    out += r.algorithm;
    out += ',';
    out += fmt_g17(r.nmse);
    out += ',';
    out += fmt_g17(r.nmse_db);
    out += ',';
    out += fmt_g17(r.runtime_s);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.config_hash;
    out += '\n';
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                      const fs::path& out_dir) {
  SweepContext ctx(cfg);
  ctx.cache_dir = out_dir / "cache";
  ctx.ckpt_dir = out_dir / "checkpoints";
  ctx.log_dir = out_dir / "logs";
  fs::create_directories(ctx.cache_dir);
  fs::create_directories(ctx.ckpt_dir);
  fs::create_directories(ctx.log_dir);

  const std::string axis_name = to_string(axis);
  SweepResult result;
  result.axis = axis_name;
  std::vector<SweepRow>& rows = result.rows;
  std::vector<std::string>& errors = result.errors;

  switch (axis) {
    case SweepAxis::kSnr: {
      for (std::size_t i = 0; i < cfg.snr_list.size(); ++i) {
        const double snr = cfg.snr_list[i];
        std::optional<Dataset> val;
        auto get_val = [&]() -> const Dataset& {
          if (!val) val = make_validation_dataset(cfg, ctx.sc.dict, snr);
          return *val;
        };
        run_point(ctx, axis_name, i, "zero", snr, "", cfg.seed, rows, errors,
                  [&] { return evaluate_nmse_zero(get_val()); });
        run_point(ctx, axis_name, i, "fista", snr, "", cfg.seed, rows, errors,
                  [&] { return evaluate_nmse_fista(ctx.sc, ctx.sc.dict, get_val()); });
        run_point(ctx, axis_name, i, "lista", snr, "",
                  derive_seed(cfg.seed, "train-lista", cfg.layers, 0), rows,
                  errors, [&] {
                    auto [p, s] =
                        ctx.lista_model(cfg.layers, LossMode::kSupervised);
                    (void)s;
                    return evaluate_nmse_lista(ctx.sc, p, get_val());
                  });
        run_point(ctx, axis_name, i, "lista-smo", snr, "",
                  derive_seed(cfg.seed, "train-smo", cfg.layers, 0), rows,
                  errors, [&] {
                    auto [p, s] =
                        ctx.smo_model(cfg.layers, LossMode::kSupervised);
                    (void)s;
                    return evaluate_nmse_smo(ctx.sc, p, get_val());
                  });
        run_point(ctx, axis_name, i, "lista-smo-selfsup", snr, "",
                  derive_seed(cfg.seed, "train-smo", cfg.layers, 1), rows,
                  errors, [&] {
                    auto [p, s] =
                        ctx.smo_model(cfg.layers, LossMode::kSelfSupervised);
                    (void)s;
                    return evaluate_nmse_smo(ctx.sc, p, get_val());
                  });
      }
      break;
    }
    case SweepAxis::kLayers: {
      std::optional<Dataset> val;
      auto get_val = [&]() -> const Dataset& {
        if (!val)
          val = make_validation_dataset(cfg, ctx.sc.dict, kEvalSnrDb);
        return *val;
      };
      for (std::size_t i = 0; i < cfg.layer_list.size(); ++i) {
        const std::size_t l = cfg.layer_list[i];
        const double value = static_cast<double>(l);
        run_point(ctx, axis_name, i, "zero", value, "", cfg.seed, rows,
                  errors, [&] { return evaluate_nmse_zero(get_val()); });
        run_point(ctx, axis_name, i, "lista", value, "",
                  derive_seed(cfg.seed, "train-lista", l, 0), rows, errors,
                  [&] {
                    auto [p, s] = ctx.lista_model(l, LossMode::kSupervised);
                    (void)s;
                    return evaluate_nmse_lista(ctx.sc, p, get_val());
                  });
        run_point(ctx, axis_name, i, "lista-smo", value, "",
                  derive_seed(cfg.seed, "train-smo", l, 0), rows, errors,
                  [&] {
                    auto [p, s] = ctx.smo_model(l, LossMode::kSupervised);
                    (void)s;
                    return evaluate_nmse_smo(ctx.sc, p, get_val());
                  });
      }
      break;
    }
    case SweepAxis::kDict: {
      for (std::size_t i = 0; i < cfg.dict_sizes.size(); ++i) {
        const std::size_t d = cfg.dict_sizes[i];
        const double value = static_cast<double>(d);
        const std::size_t side = grid_side(d);
        std::optional<GridDictionary> dict;
        std::optional<Dataset> val;
        auto get_dict = [&]() -> const GridDictionary& {
          if (!dict) dict = build_grid_dictionary(side, side, cfg.dma);
          return *dict;
        };
        auto get_val = [&]() -> const Dataset& {
          if (!val)
            val = make_validation_dataset(cfg, get_dict(), kEvalSnrDb);
          return *val;
        };
        run_point(ctx, axis_name, i, "zero", value, "", cfg.seed, rows,
                  errors, [&] { return evaluate_nmse_zero(get_val()); });
        run_point(ctx, axis_name, i, "fista", value, "", cfg.seed, rows,
                  errors,
                  [&] { return evaluate_nmse_fista(ctx.sc, get_dict(), get_val()); });
      }
      break;
    }
    case SweepAxis::kCompression: {
      std::optional<Dataset> val;
      auto get_val = [&]() -> const Dataset& {
        if (!val)
          val = make_validation_dataset(cfg, ctx.sc.dict, kEvalSnrDb);
        return *val;
      };
      for (std::size_t i = 0; i < cfg.pilot_counts.size(); ++i) {
        const std::size_t pilots = cfg.pilot_counts[i];
        const double gamma =
            static_cast<double>(cfg.dma.n_e) /
            (static_cast<double>(pilots) * static_cast<double>(cfg.dma.n_d));
        const std::string tag = "P=" + std::to_string(pilots);
        run_point(ctx, axis_name, i, "zero", gamma, tag, cfg.seed, rows,
                  errors, [&] { return evaluate_nmse_zero(get_val()); });
        run_point(ctx, axis_name, i, "fista", gamma, tag, cfg.seed, rows,
                  errors, [&] {
                    return evaluate_nmse_multi_pilot(ctx.sc, pilots,
                                                     get_val(), kEvalSnrDb);
                  });
      }
      break;
    }
  }

  fs::create_directories(out_dir);
  result.csv_path = out_dir / ("sweep-" + axis_name + ".csv");
  result.manifest_path = out_dir / ("sweep-" + axis_name + ".manifest.json");
  write_text_file(result.csv_path, rows_to_csv(rows));

  json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = "sweep";
  manifest["axis"] = axis_name;
  manifest["name"] = cfg.name;
  manifest["config_hash"] = ctx.hash;
  manifest["seed"] = cfg.seed;
  manifest["csv"] = result.csv_path.filename().string();
  manifest["rows"] = json::array();
  for (const SweepRow& r : rows) manifest["rows"].push_back(row_to_json(r));
  manifest["errors"] = errors;
  manifest["training"] = json::array();
  for (const TrainingNote& t : ctx.training_notes)
    manifest["training"].push_back({{"tag", t.tag},
                                    {"seconds", t.seconds},
                                    {"best_epoch", t.best_epoch},
                                    {"best_test_nmse", t.best_test_nmse},
                                    {"converged", t.converged}});
  write_text_file(result.manifest_path, manifest.dump(2));
  return result;
}

TrainRunSummary run_training(const ExperimentConfig& cfg,
                             const std::string& arch, std::size_t layers,
                             LossMode mode, const fs::path& out_dir) {
  if (arch != "lista" && arch != "lista-smo")
    throw ConfigError("train: unknown arch \"" + arch +
                      "\" (expected lista|lista-smo)");
  if (layers < 1) throw ConfigError("train: layers must be >= 1");
  SweepContext ctx(cfg);
  ctx.cache_dir = out_dir / "cache";
  ctx.ckpt_dir = out_dir / "checkpoints";
  ctx.log_dir = out_dir / "logs";
  fs::create_directories(ctx.ckpt_dir);
  fs::create_directories(ctx.log_dir);

  TrainRunSummary s;
  s.tag = model_tag(arch, layers, mode);
  s.checkpoint_path = ctx.ckpt_dir / (s.tag + "-" + ctx.hash + ".ckpt");
  s.log_path = ctx.log_dir / (s.tag + ".csv");
  s.reused_cache = fs::exists(s.checkpoint_path);
  if (arch == "lista")
    s.train_seed = ctx.lista_model(layers, mode).second;
  else
    s.train_seed = ctx.smo_model(layers, mode).second;

  if (!s.reused_cache && !ctx.training_notes.empty()) {
    const TrainingNote& note = ctx.training_notes.back();
    s.seconds = note.seconds;
    s.best_epoch = note.best_epoch;
    s.best_test_nmse = note.best_test_nmse;
    s.converged = note.converged;
  } else if (fs::exists(s.log_path)) {
    const std::vector<EpochStats> log = read_epoch_log_csv(s.log_path);
    s.best_epoch = log.front().epoch;
    s.best_test_nmse = log.front().test_nmse;
    for (const EpochStats& e : log)
      if (e.test_nmse < s.best_test_nmse) {
        s.best_test_nmse = e.test_nmse;
        s.best_epoch = e.epoch;
      }
    s.converged = analyze_convergence(log, cfg.training.window).fired;
  }
  return s;
}

ConvergenceReport analyze_convergence(const std::vector<EpochStats>& log,
                                      std::size_t window) {
  if (log.empty()) throw DomainError("convergence: empty epoch log");
  std::vector<double> curve;
  curve.reserve(log.size());
  for (const EpochStats& e : log) curve.push_back(e.test_nmse);
  ConvergenceReport rep;
  rep.log = log;
  rep.window = window;
  const std::size_t ep = convergence_epoch(curve, window);
  rep.fired = ep != 0;
  rep.converged_epoch = rep.fired ? ep : log.back().epoch;
  return rep;
}

void write_epoch_log_csv(const fs::path& path,
                         const std::vector<EpochStats>& log) {
  std::string out = "epoch,train_loss,test_nmse\n";
  for (const EpochStats& e : log) {
    out += std::to_string(e.epoch);
    out += ',';
    out += fmt_g17(e.train_loss);
    out += ',';
    out += fmt_g17(e.test_nmse);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<EpochStats> read_epoch_log_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot read " + path.string());
  std::vector<EpochStats> log;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("epoch,", 0) == 0) continue;
    }
    EpochStats e;
    unsigned long long ep = 0;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf", &ep, &e.train_loss,
                    &e.test_nmse) != 3)
      throw PersistenceError("bad epoch log line in " + path.string() +
                             ": " + line);
    e.epoch = static_cast<std::size_t>(ep);
    log.push_back(e);
  }
  if (log.empty())
    throw PersistenceError("epoch log " + path.string() + " has no rows");
  return log;
}

std::string theory_check_json(const ExperimentConfig& cfg,
                              std::size_t trials) {
  cfg.validate();
  if (trials < 2) throw DomainError("theory check: trials must be >= 2");
  json j;
  j["version"] = kVersion;
  j["seed"] = cfg.seed;

  // Reference points of the error function.
  j["erf"] = json::array();
  for (double x : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0})
    j["erf"].push_back({{"x", x}, {"value", erf_value(x)}});

  // Recovery-probability bound, both denominator readings, over a grid of
  // array widths and path counts.
  const std::vector<std::size_t> widths{1, 2, 4, 8, 12, 16, 20, 28, 40};
  const std::vector<std::size_t> path_counts{1, 2, 4, 6};
  json rec;
  rec["elements"] = widths;
  rec["paths"] = path_counts;
  rec["as_printed"] = json::array();
  rec["clt"] = json::array();
  bool monotone = true;
  for (std::size_t lp : path_counts) {
    json row_a = json::array(), row_b = json::array();
    double prev = 2.0;
    for (std::size_t ne : widths) {
      const double v = p_rec_formula(ne, lp);
      if (v > prev + 1e-15) monotone = false;
      prev = v;
      row_a.push_back(v);
      row_b.push_back(p_rec_formula_clt(ne, lp));
    }
    rec["as_printed"].push_back(row_a);
    rec["clt"].push_back(row_b);
  }
  rec["monotone_decreasing_as_printed"] = monotone;
  j["recovery_probability"] = rec;

  // Restricted-isometry Monte Carlo on the configured array.
  const std::size_t k = std::min<std::size_t>(4, cfg.dma.elements());
  RipEstimate rip =
      ric_monte_carlo(cfg.dma, k, trials, derive_seed(cfg.seed, "ric"));
  json ric;
  ric["k"] = rip.k;
  ric["trials"] = rip.trials;
  ric["delta_mean"] = mean_of(rip.deltas);
  ric["delta_std_error"] = std_error_of(rip.deltas);
  ric["s_max_mean"] = mean_of(rip.s_max);
  ric["s_max_std_error"] = std_error_of(rip.s_max);
  ric["strip_mean_expected"] = static_cast<double>(cfg.dma.n_e) / 2.0;
  ric["strip_var_expected"] = static_cast<double>(cfg.dma.n_e) / 12.0;
  ric["strip_mean_observed"] = mean_of(rip.s_samples);
  ric["ks_vs_normal"] =
      ks_against_normal(rip.s_samples, static_cast<double>(cfg.dma.n_e) / 2.0,
                        static_cast<double>(cfg.dma.n_e) / 12.0);
  j["restricted_isometry"] = ric;

  // Gridding-loss identity on seeded random scenarios: closed form vs the
  // paired Monte Carlo estimate, distance in standard errors.
  const GridDictionary dict =
      build_grid_dictionary(cfg.k_phi, cfg.k_theta, cfg.dma);
  json grid = json::array();
  double worst = 0.0;
  for (std::size_t s = 0; s < 20; ++s) {
    Rng rng(derive_seed(cfg.seed, "grid-scenario", s));
    const PathSet paths = sample_paths(cfg.dma, rng);
    double a_max = 0.0;
    for (const Path& p : paths.paths)
      a_max = std::max(a_max, std::abs(p.gain));
    const double xi = rng.uniform(0.3, 1.2) * a_max;
    const double sigma = rng.uniform(0.2, 1.0) * a_max;
    const double closed = delta_rho_formula(paths, xi, sigma, dict, cfg.dma);
    const GriddingLossEstimate emp = empirical_gridding_loss(
        paths, xi, sigma, dict, cfg.dma, trials,
        derive_seed(cfg.seed, "grid-empirical", s));
    const double dist =
        emp.std_error > 0.0 ? std::abs(closed - emp.value) / emp.std_error
                            : std::abs(closed - emp.value);
    worst = std::max(worst, dist);
    grid.push_back({{"scenario", s},
                    {"xi", xi},
                    {"sigma", sigma},
                    {"closed_form", closed},
                    {"empirical", emp.value},
                    {"std_error", emp.std_error},
                    {"distance_in_std_errors", dist}});
  }
  j["gridding_loss"] = {{"scenarios", grid},
                        {"max_distance_in_std_errors", worst},
                        {"trials", trials}};
  return j.dump(2);
}

}  // namespace dmace
