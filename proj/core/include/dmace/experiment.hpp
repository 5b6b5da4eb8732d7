#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmace/channel.hpp"
#include "dmace/complex_matrix.hpp"
#include "dmace/dataset.hpp"
#include "dmace/dictionary.hpp"
#include "dmace/dma.hpp"
#include "dmace/nets.hpp"

namespace dmace {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  std::string name = "desk";
  std::uint64_t seed = 20260814;
  std::string output_dir = "out/desk";
  DmaConfig dma{4, 4, 0.0107, 0.00535, 0.00535, 0.6, 827.67};
  std::size_t k_theta = 6;
  std::size_t k_phi = 6;
  std::size_t train_count = 8000;
  std::size_t test_count = 512;
  std::size_t validation_count = 2048;
  std::vector<double> snr_list{0.0, 6.0, 12.0, 18.0};
  std::size_t layers = 8;                     // depth for single-model runs
  std::vector<std::size_t> layer_list{1, 8};  // depth axis
  std::vector<std::size_t> dict_sizes{16, 36, 64, 100};
  std::vector<std::size_t> pilot_counts{4, 2, 1};
  TrainConfig training;
  double solver_eta = 1e-4;
  std::size_t ista_iters = 2000;
  std::size_t fista_iters = 300;

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_string(const std::string& text);
  std::string to_json_string() const;
  // FNV-1a over the canonical JSON rendering; keys are emitted sorted, so
  // equal configs hash equally regardless of input formatting.
  std::string config_hash() const;
  void validate() const;
};

// Fixed per-scenario operators derived from the master seed.
struct Scenario {
  ExperimentConfig cfg;
  GridDictionary dict;
  ComplexMatrix h{0, 0};
  ComplexVector h_diag{0, 1};
  ComplexMatrix q_fixed{0, 0};  // random combining weights, role "q-ran"
};

Scenario make_scenario(const ExperimentConfig& cfg);

Dataset make_train_dataset(const ExperimentConfig& cfg,
                           const GridDictionary& dict);
Dataset make_test_dataset(const ExperimentConfig& cfg,
                          const GridDictionary& dict);
Dataset make_validation_dataset(const ExperimentConfig& cfg,
                                const GridDictionary& dict, double snr_db);

double nmse(const ComplexVector& g_hat, const ComplexVector& g_star);
double nmse_db(double ratio);

struct MultiPilotObservation {
  ComplexVector z{0, 1};        // stacked backend observations, P * n_d
  ComplexMatrix sensing{0, 0};  // stacked Q_p H, (P * n_d) x N
  double sigma = 0.0;
};

// Each pilot repetition sees the same channel under fresh noise and its own
// combining weights; rows of the stacked operator feed any sparse solver.
MultiPilotObservation multi_pilot_observe(const ComplexVector& g,
                                          double snr_db,
                                          const std::vector<DmaWeights>& w,
                                          const DmaConfig& cfg, Rng& rng);

// Dataset-mean NMSE of each estimator on a validation set. The zero
// estimator is the sanity baseline and evaluates to exactly 1.
double evaluate_nmse_zero(const Dataset& val);
double evaluate_nmse_fista(const Scenario& sc, const GridDictionary& dict,
                           const Dataset& val);
double evaluate_nmse_lista(const Scenario& sc, const ListaParams& p,
                           const Dataset& val);
double evaluate_nmse_smo(const Scenario& sc, const ListaSmoParams& p,
                         const Dataset& val);
// Stacked multi-pilot recovery at the fixed evaluation SNR; pilot weights
// and per-sample noise come from streams derived off the config seed.
double evaluate_nmse_multi_pilot(const Scenario& sc, std::size_t pilots,
                                 const Dataset& val, double snr_db);

struct TrainRunSummary {
  std::string tag;
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
  bool reused_cache = false;  // checkpoint from an earlier identical run
  std::uint64_t train_seed = 0;
  double seconds = 0.0;
  std::size_t best_epoch = 0;
  double best_test_nmse = 0.0;
  bool converged = false;
};

// Trains one model (arch "lista" or "lista-smo") against the scenario's
// datasets, or loads the cached checkpoint a previous identical run left
// under out_dir/checkpoints. Writes the epoch log CSV beside it.
TrainRunSummary run_training(const ExperimentConfig& cfg,
                             const std::string& arch, std::size_t layers,
                             LossMode mode,
                             const std::filesystem::path& out_dir);

enum class SweepAxis { kSnr, kLayers, kDict, kCompression };

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  std::string algorithm;
  double nmse = 0.0;  // validation mean ratio
  double nmse_db = 0.0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string realization;  // extra point detail, e.g. "P=2"
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRow> rows;
  std::vector<std::string> errors;  // per-point failures, sweep continued
  std::filesystem::path csv_path;
  std::filesystem::path manifest_path;
};

// Runs every point of the axis, caching finished points under
// out_dir/cache and trained models under out_dir/checkpoints so an
// interrupted sweep resumes to byte-identical output.
SweepResult run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                      const std::filesystem::path& out_dir);

struct ConvergenceReport {
  std::vector<EpochStats> log;
  std::size_t window = 10;
  bool fired = false;             // trailing-window rule triggered
  std::size_t converged_epoch = 0;  // rule epoch, or last epoch if unfired
};

ConvergenceReport analyze_convergence(const std::vector<EpochStats>& log,
                                      std::size_t window);

void write_epoch_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochStats>& log);
std::vector<EpochStats> read_epoch_log_csv(const std::filesystem::path& path);

// JSON report covering the recovery-probability formula (both denominator
// readings), the restricted-isometry Monte Carlo, and closed-form vs
// empirical gridding loss on seeded random scenarios.
std::string theory_check_json(const ExperimentConfig& cfg,
                              std::size_t trials);

}  // namespace dmace
