#pragma once
#include <cstdint>
#include <vector>

#include "dmace/complex_matrix.hpp"
#include "dmace/dataset.hpp"
#include "dmace/dictionary.hpp"
#include "dmace/dma.hpp"
#include "dmace/rng.hpp"

namespace dmace {

// Unrolled shrinkage network alpha^{l+1} = h_eta_l(W_a alpha^l + W_b z).
// Matrices are shared across layers; thresholds are per layer. Real-valued
// parameter vectors (thresholds, step sizes, pre-phases) are stored in the
// real channel of a complex matrix so one optimizer handles everything.
struct ListaParams {
  ComplexMatrix w_a{0, 0};  // D x D
  ComplexMatrix w_b{0, 0};  // D x n_d
  ComplexMatrix eta{0, 1};  // L x 1, real payload, clamped >= 0 in training
  std::size_t layers() const { return eta.rows(); }
  double eta_at(std::size_t l) const { return eta[l].real(); }
};

// Physics-in-the-loop variant alpha^{l+1} =
// h_eta_l(alpha^l - kappa_l W (QHA alpha^l - z)) with fixed Q, H, A.
struct AlistaParams {
  ComplexMatrix w{0, 0};      // D x n_d
  ComplexMatrix eta{0, 1};    // L x 1
  ComplexMatrix kappa{0, 1};  // L x 1
  std::size_t layers() const { return eta.rows(); }
  double eta_at(std::size_t l) const { return eta[l].real(); }
  double kappa_at(std::size_t l) const { return kappa[l].real(); }
};

// Channel-domain network with a learned analog front end: the combining
// matrix is materialized from unconstrained pre-phases on every forward
// pass (w_q = scatter(phase_to_weight(sigmoid_phase_map(w_phi)))), so its
// weights stay physically realizable while remaining trainable.
struct ListaSmoParams {
  ComplexMatrix w_phi{0, 1};  // N x 1, real payload
  ComplexMatrix w_a{0, 0};    // D x N sparsifying analysis operator
  ComplexMatrix w_smo{0, 0};  // N x n_d recovery operator
  ComplexMatrix eta{0, 1};    // L x 1
  ComplexMatrix kappa{0, 1};  // L x 1
  std::size_t layers() const { return eta.rows(); }
  double eta_at(std::size_t l) const { return eta[l].real(); }
  double kappa_at(std::size_t l) const { return kappa[l].real(); }
};

// Matrices ~ complex Gaussian with std 1/sqrt(fan-in); thresholds 1e-4,
// step sizes 1, pre-phases standard normal. Draw order is fixed.
ListaParams init_lista(std::size_t dict_size, std::size_t n_d,
                       std::size_t layers, Rng& rng);
ListaSmoParams init_lista_smo(const DmaConfig& cfg, std::size_t dict_size,
                              std::size_t layers, Rng& rng);

ComplexVector lista_forward(const ListaParams& p, const ComplexVector& z,
                            std::vector<ComplexVector>* layer_trace = nullptr);

ComplexVector alista_forward(const AlistaParams& p, const ComplexVector& z,
                             const ComplexMatrix& q, const ComplexMatrix& h,
                             const ComplexMatrix& dict_atoms);

ComplexMatrix materialize_q(const ListaSmoParams& p, const DmaConfig& cfg);

// Training mode: forms z_hat = W_q H y from the raw element observation.
ComplexVector lista_smo_forward(const ListaSmoParams& p,
                                const ComplexVector& y,
                                const ComplexVector& h_diag,
                                const DmaConfig& cfg);

// Inference mode: consumes a backend observation z measured under the
// exported combining weights.
ComplexVector lista_smo_infer(const ListaSmoParams& p, const ComplexVector& z,
                              const ComplexVector& h_diag,
                              const DmaConfig& cfg);

// Channel estimate from the coefficient network: g_hat = A_G alpha^{(L)}.
ComplexVector lista_estimate(const ListaParams& p, const ComplexVector& z,
                             const GridDictionary& dict);

// Phases to configure on the physical array after training.
DmaWeights export_trained_dma(const ListaSmoParams& p, const DmaConfig& cfg);

// Batch losses: sums of per-sample l2 errors (norms, not squared norms).
double supervised_loss(const std::vector<ComplexVector>& labels,
                       const std::vector<ComplexVector>& outputs);
double self_supervised_loss(const std::vector<ComplexVector>& observations,
                            const std::vector<ComplexVector>& outputs);

// ||g_star - g_hat||^2 / ||g_star||^2.
double nmse_ratio(const ComplexVector& g_hat, const ComplexVector& g_star);

struct ListaGrads {
  ComplexMatrix w_a{0, 0};
  ComplexMatrix w_b{0, 0};
  ComplexMatrix eta{0, 1};
};

struct SmoGrads {
  ComplexMatrix w_phi{0, 1};
  ComplexMatrix w_a{0, 0};
  ComplexMatrix w_smo{0, 0};
  ComplexMatrix eta{0, 1};
  ComplexMatrix kappa{0, 1};
};

// Loss and parameter gradients over a batch. Targets are sparse labels
// (dict == nullptr, coefficient-domain loss) or element-domain vectors
// (dict != nullptr, loss on dict * alpha). Pass grads = nullptr for loss
// only.
double lista_batch_loss(const ListaParams& p,
                        const std::vector<const ComplexVector*>& z,
                        const std::vector<const ComplexVector*>& targets,
                        const ComplexMatrix* dict, ListaGrads* grads);

// Targets are g_star (supervised) or y itself (self-supervised).
double smo_batch_loss(const ListaSmoParams& p,
                      const std::vector<const ComplexVector*>& y,
                      const std::vector<const ComplexVector*>& targets,
                      const ComplexVector& h_diag, const DmaConfig& cfg,
                      SmoGrads* grads);

enum class LossMode { kSupervised, kSelfSupervised };

struct TrainConfig {
  std::size_t batch_size = 32;
  double learning_rate = 1e-4;
  std::size_t max_epochs = 40;
  std::size_t window = 10;  // trailing epochs for the stop rule
  std::uint64_t seed = 1;
  LossMode loss = LossMode::kSupervised;
  std::size_t shards = 1;  // gradient shards per batch; fixed boundaries
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_nmse = 0.0;  // mean ratio over the test set
};

template <typename Params>
struct TrainResult {
  Params params;  // best-test-NMSE snapshot, not the last epoch
  std::vector<EpochStats> log;
  std::size_t best_epoch = 0;
  double best_test_nmse = 0.0;
  bool converged = false;  // stop rule fired before max_epochs
};

// First 1-based epoch at which the trailing-window mean of the test NMSE
// stops decreasing (equivalently, NMSE at or above its value one window
// earlier); 0 if the rule never fires.
std::size_t convergence_epoch(const std::vector<double>& test_nmse,
                              std::size_t window);

// Coefficient-domain training against a fixed combining matrix. Per-sample
// inputs z = q (h .* y) are formed once up front. Test NMSE is evaluated in
// the channel domain through the dictionary.
TrainResult<ListaParams> train_lista(const ListaParams& init,
                                     const ComplexMatrix& q,
                                     const ComplexVector& h_diag,
                                     const GridDictionary& dict,
                                     const Dataset& train_set,
                                     const Dataset& test_set,
                                     const TrainConfig& tc);

TrainResult<ListaSmoParams> train_lista_smo(const ListaSmoParams& init,
                                            const ComplexVector& h_diag,
                                            const Dataset& train_set,
                                            const Dataset& test_set,
                                            const TrainConfig& tc);

}  // namespace dmace
