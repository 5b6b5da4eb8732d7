// Command-line front end: dataset generation, training, evaluation,
// parameter sweeps, analytic checks, and convergence reports, all driven
// by a JSON scenario config. Every command prints a JSON summary on
// success; failures print a JSON error object to stderr and exit nonzero.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dmace/checkpoint.hpp"
#include "dmace/dataset.hpp"
#include "dmace/errors.hpp"
#include "dmace/experiment.hpp"
#include "dmace/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dmace;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot write " + path.string());
  out << text;
  if (!out) throw PersistenceError("short write to " + path.string());
}

fs::path resolve_output_dir(const std::string& flag,
                            const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DMACE_OUTPUT_DIR"); env && *env)
    return env;
  return cfg.output_dir;
}

LossMode parse_loss(const std::string& s) {
  if (s == "supervised") return LossMode::kSupervised;
  if (s == "self-supervised") return LossMode::kSelfSupervised;
  throw ConfigError("train: unknown loss \"" + s +
                    "\" (expected supervised|self-supervised)");
}

int cmd_generate_data(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const fs::path data_dir = out_dir / "datasets";
  fs::create_directories(data_dir);
  const Scenario sc = make_scenario(cfg);

  json files = json::array();
  auto emit = [&](const std::string& name, const Dataset& ds) {
    const fs::path p = data_dir / name;
    write_dataset(p, ds);
    files.push_back({{"file", p.string()}, {"samples", ds.count()}});
  };
  const Dataset train = make_train_dataset(cfg, sc.dict);
  emit("train.bin", train);
  emit("test.bin", make_test_dataset(cfg, sc.dict));
  for (double snr : cfg.snr_list) {
    char name[64];
    std::snprintf(name, sizeof name, "validation-snr%g.bin", snr);
    emit(name, make_validation_dataset(cfg, sc.dict, snr));
  }
  write_matrix_file(data_dir / "dictionary.bin", sc.dict.atoms);
  write_text(data_dir / "train.preview.json",
             dataset_to_json_string(train, 3));

  json manifest{{"version", kVersion},
                {"command", "generate-data"},
                {"name", cfg.name},
                {"config_hash", cfg.config_hash()},
                {"seed", cfg.seed},
                {"dictionary", (data_dir / "dictionary.bin").string()},
                {"preview", (data_dir / "train.preview.json").string()},
                {"datasets", files}};
  write_text(out_dir / "generate-data.manifest.json", manifest.dump(2));
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, const fs::path& out_dir,
              const std::string& arch, std::size_t layers,
              const std::string& loss) {
  const TrainRunSummary s =
      run_training(cfg, arch, layers, parse_loss(loss), out_dir);
  json manifest{{"version", kVersion},
                {"command", "train"},
                {"name", cfg.name},
                {"config_hash", cfg.config_hash()},
                {"tag", s.tag},
                {"checkpoint", s.checkpoint_path.string()},
                {"epoch_log", s.log_path.string()},
                {"reused_cache", s.reused_cache},
                {"train_seed", s.train_seed},
                {"seconds", s.seconds},
                {"best_epoch", s.best_epoch},
                {"best_test_nmse", s.best_test_nmse},
                {"converged", s.converged}};
  write_text(out_dir / ("train-" + s.tag + ".manifest.json"),
             manifest.dump(2));
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const ExperimentConfig& cfg, const fs::path& out_dir,
                 const std::string& ckpt_path) {
  const Checkpoint ck = load_checkpoint(ckpt_path);
  if (ck.meta.n_d != cfg.dma.n_d || ck.meta.n_e != cfg.dma.n_e)
    throw ContractError("evaluate: checkpoint array shape " +
                        std::to_string(ck.meta.n_d) + "x" +
                        std::to_string(ck.meta.n_e) +
                        " does not match the config");
  const Scenario sc = make_scenario(cfg);
  if (ck.meta.arch == "lista" && ck.meta.dict_size != sc.dict.size())
    throw ContractError("evaluate: checkpoint dictionary size mismatch");

  json rows = json::array();
  std::string csv = "snr_db,algorithm,nmse,nmse_db\n";
  for (double snr : cfg.snr_list) {
    const Dataset val = make_validation_dataset(cfg, sc.dict, snr);
    double ratio = 0.0;
    if (ck.meta.arch == "lista") {
      ratio = evaluate_nmse_lista(sc, lista_from_checkpoint(ck), val);
    } else if (ck.meta.arch == "lista-smo") {
      ratio = evaluate_nmse_smo(sc, lista_smo_from_checkpoint(ck), val);
    } else {
      throw ContractError("evaluate: unknown checkpoint arch \"" +
                          ck.meta.arch + "\"");
    }
    char line[160];
    std::snprintf(line, sizeof line, "%.17g,%s,%.17g,%.17g\n", snr,
                  ck.meta.arch.c_str(), ratio, nmse_db(ratio));
    csv += line;
    rows.push_back({{"snr_db", snr},
                    {"algorithm", ck.meta.arch},
                    {"nmse", ratio},
                    {"nmse_db", nmse_db(ratio)}});
  }
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / "evaluate.csv";
  write_text(csv_path, csv);
  json manifest{{"version", kVersion},
                {"command", "evaluate"},
                {"name", cfg.name},
                {"config_hash", cfg.config_hash()},
                {"checkpoint", ckpt_path},
                {"arch", ck.meta.arch},
                {"layers", ck.meta.layers},
                {"csv", csv_path.string()},
                {"rows", rows}};
  write_text(out_dir / "evaluate.manifest.json", manifest.dump(2));
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& out_dir,
              const std::string& axis) {
  const SweepResult res = run_sweep(cfg, sweep_axis_from_string(axis), out_dir);
  json summary{{"version", kVersion},
               {"command", "sweep"},
               {"axis", res.axis},
               {"csv", res.csv_path.string()},
               {"manifest", res.manifest_path.string()},
               {"rows", res.rows.size()},
               {"errors", res.errors}};
  std::cout << summary.dump(2) << "\n";
  // Partial failure still writes the completed rows but reports nonzero.
  return res.errors.empty() ? 0 : 2;
}

int cmd_theory_check(const ExperimentConfig& cfg, const fs::path& out_dir,
                     std::size_t trials) {
  const std::string report = theory_check_json(cfg, trials);
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "theory-check.json";
  write_text(path, report);
  std::cout << report << "\n";
  return 0;
}

int cmd_convergence_report(const ExperimentConfig& cfg,
                           const fs::path& out_dir, const std::string& log,
                           std::size_t window) {
  const std::vector<EpochStats> epochs = read_epoch_log_csv(log);
  const std::size_t w = window > 0 ? window : cfg.training.window;
  const ConvergenceReport rep = analyze_convergence(epochs, w);
  json curve = json::array();
  for (const EpochStats& e : rep.log)
    curve.push_back({{"epoch", e.epoch},
                     {"train_loss", e.train_loss},
                     {"test_nmse", e.test_nmse}});
  json report{{"version", kVersion},
              {"command", "convergence-report"},
              {"epoch_log", log},
              {"window", rep.window},
              {"fired", rep.fired},
              {"converged_epoch", rep.converged_epoch},
              {"epochs", curve}};
  fs::create_directories(out_dir);
  write_text(out_dir / "convergence-report.json", report.dump(2));
  std::cout << report.dump(2) << "\n";
  return 0;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const PersistenceError*>(&e)) return "persistence";
  if (dynamic_cast<const ContractError*>(&e)) return "contract";
  return "internal";
}

int fail(const char* kind, const std::string& message) {
  json err{{"error", {{"type", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel estimation for dynamic metasurface arrays"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_flag;
  app.add_option("--config", config_path,
                 "JSON scenario config (defaults to built-in desk scenario)");
  app.add_option("--output-dir", output_dir_flag,
                 "output directory (overrides DMACE_OUTPUT_DIR and config)");

  CLI::App* gen = app.add_subcommand(
      "generate-data", "Write train/test/validation datasets to disk");

  CLI::App* train =
      app.add_subcommand("train", "Train one estimator and checkpoint it");
  std::string arch = "lista-smo";
  std::size_t layers = 0;
  std::string loss = "supervised";
  train->add_option("--arch", arch, "lista | lista-smo")
      ->check(CLI::IsMember({"lista", "lista-smo"}));
  train->add_option("--layers", layers, "unrolled depth (default: config)");
  train->add_option("--loss", loss, "supervised | self-supervised")
      ->check(CLI::IsMember({"supervised", "self-supervised"}));

  CLI::App* eval =
      app.add_subcommand("evaluate", "Evaluate a checkpoint across SNR");
  std::string ckpt_path;
  eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "Run one experiment axis end to end");
  std::string axis;
  sweep->add_option("--axis", axis, "snr | layers | dict | compression")
      ->required();

  CLI::App* theory = app.add_subcommand(
      "theory-check", "Validate the analytic guarantees numerically");
  std::size_t trials = 4000;
  theory->add_option("--trials", trials, "Monte Carlo trials per check");

  CLI::App* conv = app.add_subcommand("convergence-report",
                                      "Epochs-to-convergence from a log");
  std::string log_path;
  std::size_t window = 0;
  conv->add_option("--log", log_path, "epoch log CSV from training")
      ->required();
  conv->add_option("--window", window,
                   "trailing window (default: config training window)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("cli", e.what());
  }

  try {
    const ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{}
                            : ExperimentConfig::from_json_file(config_path);
    cfg.validate();
    const fs::path out_dir = resolve_output_dir(output_dir_flag, cfg);
    fs::create_directories(out_dir);
    if (*gen) return cmd_generate_data(cfg, out_dir);
    if (*train)
      return cmd_train(cfg, out_dir, arch, layers > 0 ? layers : cfg.layers,
                       loss);
    if (*eval) return cmd_evaluate(cfg, out_dir, ckpt_path);
    if (*sweep) return cmd_sweep(cfg, out_dir, axis);
    if (*theory) return cmd_theory_check(cfg, out_dir, trials);
    if (*conv) return cmd_convergence_report(cfg, out_dir, log_path, window);
    return fail("cli", "no subcommand selected");
  } catch (const std::exception& e) {
    return fail(error_kind(e), e.what());
  }
}
