#include "dmace/nets.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>
#include <utility>

#include "dmace/adam.hpp"
#include "dmace/errors.hpp"
#include "dmace/tape.hpp"

namespace dmace {

namespace {

// Complex Gaussian entries with E|w|^2 = 1/fan_in; real/imag drawn in pairs,
// row-major, so initialization is reproducible from the rng stream alone.
ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                              std::size_t fan_in, Rng& rng) {
  ComplexMatrix m(rows, cols);
  const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(fan_in));
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    m[i] = cplx{s * re, s * im};
  }
  return m;
}

ComplexMatrix real_constant_column(std::size_t n, double value) {
  ComplexMatrix m(n, 1);
  for (std::size_t i = 0; i < n; ++i) m[i] = cplx{value, 0.0};
  return m;
}

ComplexVector apply_diag(const ComplexVector& d, const ComplexVector& x) {
  ComplexVector out(x.rows(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = d[i] * x[i];
  return out;
}

ComplexMatrix grad_or_zero(const Tape& tape, Tape::NodeId id,
                           std::size_t rows, std::size_t cols) {
  const ComplexMatrix& g = tape.grad(id);
  if (g.size() == 0) return ComplexMatrix(rows, cols);
  return g;
}

void fisher_yates(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::pair<std::size_t, std::size_t>> shard_ranges(
    std::size_t count, std::size_t shards) {
  // Fixed boundaries independent of hardware: ceil(count/shards) per shard.
  const std::size_t chunk = (count + shards - 1) / shards;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t begin = 0; begin < count; begin += chunk)
    out.emplace_back(begin, std::min(begin + chunk, count));
  return out;
}

}  // namespace

ListaParams init_lista(std::size_t dict_size, std::size_t n_d,
                       std::size_t layers, Rng& rng) {
  if (dict_size < 1 || n_d < 1 || layers < 1)
    throw DomainError("init_lista: dimensions must be >= 1");
  ListaParams p;
  p.w_a = gaussian_matrix(dict_size, dict_size, dict_size, rng);
  p.w_b = gaussian_matrix(dict_size, n_d, n_d, rng);
  p.eta = real_constant_column(layers, 1e-4);
  return p;
}

ListaSmoParams init_lista_smo(const DmaConfig& cfg, std::size_t dict_size,
                              std::size_t layers, Rng& rng) {
  cfg.validate();
  if (dict_size < 1 || layers < 1)
    throw DomainError("init_lista_smo: dimensions must be >= 1");
  const std::size_t n = cfg.elements();
  ListaSmoParams p;
  p.w_phi = ComplexMatrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) p.w_phi[i] = cplx{rng.gaussian(), 0.0};
  p.w_a = gaussian_matrix(dict_size, n, n, rng);
  p.w_smo = gaussian_matrix(n, cfg.n_d, cfg.n_d, rng);
  p.eta = real_constant_column(layers, 1e-4);
  p.kappa = real_constant_column(layers, 1.0);
  return p;
}

ComplexVector lista_forward(const ListaParams& p, const ComplexVector& z,
                            std::vector<ComplexVector>* layer_trace) {
  if (p.w_a.rows() != p.w_a.cols() || p.w_b.rows() != p.w_a.rows())
    throw ShapeError("lista_forward: inconsistent parameter shapes");
  if (z.cols() != 1 || z.rows() != p.w_b.cols())
    throw ShapeError("lista_forward: observation length mismatch");
  if (layer_trace) layer_trace->clear();
  const ComplexVector bz = cmatmul(p.w_b, z);
  ComplexVector alpha(p.w_a.rows(), 1);
  for (std::size_t l = 0; l < p.layers(); ++l) {
    alpha = complex_soft_threshold(add(cmatmul(p.w_a, alpha), bz),
                                   p.eta_at(l));
    if (layer_trace) layer_trace->push_back(alpha);
  }
  return alpha;
}

ComplexVector alista_forward(const AlistaParams& p, const ComplexVector& z,
                             const ComplexMatrix& q, const ComplexMatrix& h,
                             const ComplexMatrix& dict_atoms) {
  if (p.kappa.rows() != p.eta.rows())
    throw ShapeError("alista_forward: eta/kappa length mismatch");
  const ComplexMatrix qha = cmatmul(cmatmul(q, h), dict_atoms);
  if (p.w.rows() != qha.cols() || p.w.cols() != qha.rows())
    throw ShapeError("alista_forward: recovery matrix shape mismatch");
  if (z.cols() != 1 || z.rows() != qha.rows())
    throw ShapeError("alista_forward: observation length mismatch");
  ComplexVector alpha(qha.cols(), 1);
  for (std::size_t l = 0; l < p.layers(); ++l) {
    const ComplexVector resid = sub(cmatmul(qha, alpha), z);
    const ComplexVector step = cmatmul(p.w, resid);
    ComplexVector pre(alpha.rows(), 1);
    const double k = p.kappa_at(l);
    for (std::size_t i = 0; i < pre.size(); ++i)
      pre[i] = alpha[i] - k * step[i];
    alpha = complex_soft_threshold(pre, p.eta_at(l));
  }
  return alpha;
}

ComplexMatrix materialize_q(const ListaSmoParams& p, const DmaConfig& cfg) {
  if (p.w_phi.cols() != 1 || p.w_phi.rows() != cfg.elements())
    throw ShapeError("materialize_q: pre-phase length mismatch");
  DmaWeights w;
  w.phases.resize(cfg.elements());
  for (std::size_t i = 0; i < w.phases.size(); ++i)
    w.phases[i] = sigmoid_phase_map(p.w_phi[i].real());
  return build_q(w, cfg);
}

namespace {

ComplexVector smo_run(const ListaSmoParams& p, const ComplexVector& zhat,
                      const ComplexVector& h_diag, const ComplexMatrix& q) {
  const ComplexMatrix w_ah = adjoint(p.w_a);
  ComplexVector g(p.w_a.cols(), 1);
  for (std::size_t l = 0; l < p.layers(); ++l) {
    const ComplexVector resid = sub(cmatmul(q, apply_diag(h_diag, g)), zhat);
    const ComplexVector step = cmatmul(p.w_smo, resid);
    ComplexVector pre(g.rows(), 1);
    const double k = p.kappa_at(l);
    for (std::size_t i = 0; i < pre.size(); ++i)
      pre[i] = g[i] - k * step[i];
    g = cmatmul(w_ah,
                complex_soft_threshold(cmatmul(p.w_a, pre), p.eta_at(l)));
  }
  return g;
}

void check_smo_shapes(const ListaSmoParams& p, const ComplexVector& h_diag,
                      const DmaConfig& cfg) {
  const std::size_t n = cfg.elements();
  if (p.w_phi.rows() != n || p.w_a.cols() != n || p.w_smo.rows() != n ||
      p.w_smo.cols() != cfg.n_d || p.kappa.rows() != p.eta.rows())
    throw ShapeError("lista_smo: inconsistent parameter shapes");
  if (h_diag.cols() != 1 || h_diag.rows() != n)
    throw ShapeError("lista_smo: propagation diagonal length mismatch");
}

}  // namespace

ComplexVector lista_smo_forward(const ListaSmoParams& p,
                                const ComplexVector& y,
                                const ComplexVector& h_diag,
                                const DmaConfig& cfg) {
  check_smo_shapes(p, h_diag, cfg);
  if (y.cols() != 1 || y.rows() != cfg.elements())
    throw ShapeError("lista_smo_forward: observation length mismatch");
  const ComplexMatrix q = materialize_q(p, cfg);
  const ComplexVector zhat = cmatmul(q, apply_diag(h_diag, y));
  return smo_run(p, zhat, h_diag, q);
}

ComplexVector lista_smo_infer(const ListaSmoParams& p, const ComplexVector& z,
                              const ComplexVector& h_diag,
                              const DmaConfig& cfg) {
  check_smo_shapes(p, h_diag, cfg);
  if (z.cols() != 1 || z.rows() != cfg.n_d)
    throw ShapeError("lista_smo_infer: backend observation length mismatch");
  const ComplexMatrix q = materialize_q(p, cfg);
  return smo_run(p, z, h_diag, q);
}

ComplexVector lista_estimate(const ListaParams& p, const ComplexVector& z,
                             const GridDictionary& dict) {
  return cmatmul(dict.atoms, lista_forward(p, z));
}

DmaWeights export_trained_dma(const ListaSmoParams& p, const DmaConfig& cfg) {
  if (p.w_phi.cols() != 1 || p.w_phi.rows() != cfg.elements())
    throw ShapeError("export_trained_dma: pre-phase length mismatch");
  DmaWeights w;
  w.phases.resize(cfg.elements());
  for (std::size_t i = 0; i < w.phases.size(); ++i)
    w.phases[i] = sigmoid_phase_map(p.w_phi[i].real());
  return w;
}

double supervised_loss(const std::vector<ComplexVector>& labels,
                       const std::vector<ComplexVector>& outputs) {
  if (labels.size() != outputs.size())
    throw ShapeError("supervised_loss: batch size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    total += l2_norm(sub(labels[i], outputs[i]));
  return total;
}

double self_supervised_loss(const std::vector<ComplexVector>& observations,
                            const std::vector<ComplexVector>& outputs) {
  return supervised_loss(observations, outputs);
}

double nmse_ratio(const ComplexVector& g_hat, const ComplexVector& g_star) {
  if (!g_hat.same_shape(g_star)) throw ShapeError("nmse: shape mismatch");
  const double denom = l2_norm(g_star);
  if (denom == 0.0) throw DomainError("nmse: zero reference channel");
  const double num = l2_norm(sub(g_star, g_hat));
  return (num * num) / (denom * denom);
}

double lista_batch_loss(const ListaParams& p,
                        const std::vector<const ComplexVector*>& z,
                        const std::vector<const ComplexVector*>& targets,
                        const ComplexMatrix* dict, ListaGrads* grads) {
  if (z.empty() || z.size() != targets.size())
    throw ShapeError("lista_batch_loss: batch size mismatch");
  const std::size_t d = p.w_a.rows();
  if (dict && dict->cols() != d)
    throw ShapeError("lista_batch_loss: dictionary width mismatch");
  const std::size_t layers = p.layers();

  Tape tape;
  const auto wa = tape.parameter(p.w_a);
  const auto wb = tape.parameter(p.w_b);
  std::vector<Tape::NodeId> etas(layers);
  for (std::size_t l = 0; l < layers; ++l)
    etas[l] = tape.parameter(ComplexMatrix(1, 1, {p.eta[l]}));
  const Tape::NodeId dict_node = dict ? tape.constant(*dict) : -1;

  Tape::NodeId loss = -1;
  for (std::size_t s = 0; s < z.size(); ++s) {
    const auto zc = tape.constant(*z[s]);
    const auto bz = tape.matmul(wb, zc);
    Tape::NodeId alpha = tape.constant(ComplexMatrix(d, 1));
    for (std::size_t l = 0; l < layers; ++l)
      alpha = tape.soft_threshold(tape.add(tape.matmul(wa, alpha), bz),
                                  etas[l]);
    const Tape::NodeId out =
        dict ? tape.matmul(dict_node, alpha) : alpha;
    const auto err = tape.norm2(tape.sub(tape.constant(*targets[s]), out));
    loss = (loss < 0) ? err : tape.add(loss, err);
  }
  const double value = tape.value(loss)[0].real();
  if (grads) {
    tape.backward(loss);
    grads->w_a = grad_or_zero(tape, wa, p.w_a.rows(), p.w_a.cols());
    grads->w_b = grad_or_zero(tape, wb, p.w_b.rows(), p.w_b.cols());
    grads->eta = ComplexMatrix(layers, 1);
    for (std::size_t l = 0; l < layers; ++l)
      grads->eta[l] = grad_or_zero(tape, etas[l], 1, 1)[0];
  }
  return value;
}

double smo_batch_loss(const ListaSmoParams& p,
                      const std::vector<const ComplexVector*>& y,
                      const std::vector<const ComplexVector*>& targets,
                      const ComplexVector& h_diag, const DmaConfig& cfg,
                      SmoGrads* grads) {
  if (y.empty() || y.size() != targets.size())
    throw ShapeError("smo_batch_loss: batch size mismatch");
  check_smo_shapes(p, h_diag, cfg);
  const std::size_t n = cfg.elements();
  const std::size_t layers = p.layers();

  Tape tape;
  const auto wphi = tape.parameter(p.w_phi);
  const auto wa = tape.parameter(p.w_a);
  const auto wsmo = tape.parameter(p.w_smo);
  std::vector<Tape::NodeId> etas(layers), kappas(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    etas[l] = tape.parameter(ComplexMatrix(1, 1, {p.eta[l]}));
    kappas[l] = tape.parameter(ComplexMatrix(1, 1, {p.kappa[l]}));
  }
  const auto q = tape.scatter_strips(
      tape.phase_weight(tape.sigmoid_phase(wphi)), cfg.n_d, cfg.n_e);
  const auto wah = tape.adjoint_of(wa);
  const auto h = tape.constant(h_diag);

  Tape::NodeId loss = -1;
  for (std::size_t s = 0; s < y.size(); ++s) {
    const auto yc = tape.constant(*y[s]);
    const auto zhat = tape.matmul(q, tape.diag_scale(h, yc));
    Tape::NodeId g = tape.constant(ComplexMatrix(n, 1));
    for (std::size_t l = 0; l < layers; ++l) {
      const auto resid =
          tape.sub(tape.matmul(q, tape.diag_scale(h, g)), zhat);
      const auto step = tape.matmul(wsmo, resid);
      const auto pre = tape.sub(g, tape.scale_by(kappas[l], step));
      const auto coeff = tape.soft_threshold(tape.matmul(wa, pre), etas[l]);
      g = tape.matmul(wah, coeff);
    }
    const auto err = tape.norm2(tape.sub(tape.constant(*targets[s]), g));
    loss = (loss < 0) ? err : tape.add(loss, err);
  }
  const double value = tape.value(loss)[0].real();
  if (grads) {
    tape.backward(loss);
    grads->w_phi = grad_or_zero(tape, wphi, n, 1);
    grads->w_a = grad_or_zero(tape, wa, p.w_a.rows(), p.w_a.cols());
    grads->w_smo = grad_or_zero(tape, wsmo, p.w_smo.rows(), p.w_smo.cols());
    grads->eta = ComplexMatrix(layers, 1);
    grads->kappa = ComplexMatrix(layers, 1);
    for (std::size_t l = 0; l < layers; ++l) {
      grads->eta[l] = grad_or_zero(tape, etas[l], 1, 1)[0];
      grads->kappa[l] = grad_or_zero(tape, kappas[l], 1, 1)[0];
    }
  }
  return value;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (window < 2) throw ConfigError("train: window must be >= 2");
  if (!(learning_rate > 0.0))
    throw ConfigError("train: learning rate must be positive");
  if (shards < 1) throw ConfigError("train: shard count must be >= 1");
}

std::size_t convergence_epoch(const std::vector<double>& test_nmse,
                              std::size_t window) {
  if (window < 2) throw DomainError("convergence_epoch: window must be >= 2");
  // Trailing-window mean m_e first exists at e = window; it stops decreasing
  // at e iff nmse[e] >= nmse[e - window] (the value rolling out), so isolated
  // spikes below that level do not end a run that is still descending.
  for (std::size_t i = window; i < test_nmse.size(); ++i)
    if (test_nmse[i] >= test_nmse[i - window]) return i + 1;
  return 0;
}

namespace {

// Runs fn(shard) for every shard range, serially for one shard and on
// threads otherwise; results land in pre-sized slots so the later reduction
// is in fixed shard order regardless of scheduling.
template <typename Fn>
void for_each_shard(const std::vector<std::pair<std::size_t, std::size_t>>&
                        ranges,
                    Fn&& fn) {
  if (ranges.size() == 1) {
    fn(0);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(ranges.size());
  workers.reserve(ranges.size());
  for (std::size_t s = 0; s < ranges.size(); ++s)
    workers.emplace_back([&, s] {
      try {
        fn(s);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

void clamp_nonnegative_real(ComplexMatrix& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = cplx{std::max(0.0, v[i].real()), 0.0};
}

}  // namespace

TrainResult<ListaParams> train_lista(const ListaParams& init,
                                     const ComplexMatrix& q,
                                     const ComplexVector& h_diag,
                                     const GridDictionary& dict,
                                     const Dataset& train_set,
                                     const Dataset& test_set,
                                     const TrainConfig& tc) {
  tc.validate();
  if (train_set.count() == 0 || test_set.count() == 0)
    throw ConfigError("train_lista: empty dataset");
  const bool self_supervised = tc.loss == LossMode::kSelfSupervised;

  auto compress = [&](const Dataset& ds) {
    std::vector<ComplexVector> z;
    z.reserve(ds.count());
    for (const ChannelSample& s : ds.samples)
      z.push_back(cmatmul(q, apply_diag(h_diag, s.y)));
    return z;
  };
  const std::vector<ComplexVector> train_z = compress(train_set);
  const std::vector<ComplexVector> test_z = compress(test_set);

  auto target_of = [&](const ChannelSample& s) -> const ComplexVector& {
    return self_supervised ? s.y : s.alpha_star;
  };
  const ComplexMatrix* loss_dict = self_supervised ? &dict.atoms : nullptr;

  TrainResult<ListaParams> res;
  res.params = init;
  res.best_test_nmse = std::numeric_limits<double>::infinity();
  ListaParams current = init;
  Adam adam({tc.learning_rate});

  auto eval_nmse = [&](const ListaParams& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < test_set.count(); ++i)
      acc += nmse_ratio(cmatmul(dict.atoms, lista_forward(p, test_z[i])),
                        test_set.samples[i].g_star);
    return acc / static_cast<double>(test_set.count());
  };

  std::vector<std::size_t> order(train_set.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> nmse_log;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(tc.seed, "shuffle", epoch));
    fisher_yates(order, shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += tc.batch_size) {
      const std::size_t end = std::min(start + tc.batch_size, order.size());
      const auto ranges = shard_ranges(end - start, tc.shards);
      std::vector<ListaGrads> shard_grads(ranges.size());
      std::vector<double> shard_loss(ranges.size(), 0.0);
      for_each_shard(ranges, [&](std::size_t s) {
        std::vector<const ComplexVector*> zs, ts;
        zs.reserve(ranges[s].second - ranges[s].first);
        ts.reserve(zs.capacity());
        for (std::size_t k = ranges[s].first; k < ranges[s].second; ++k) {
          const std::size_t idx = order[start + k];
          zs.push_back(&train_z[idx]);
          ts.push_back(&target_of(train_set.samples[idx]));
        }
        shard_loss[s] =
            lista_batch_loss(current, zs, ts, loss_dict, &shard_grads[s]);
      });
      ListaGrads total = std::move(shard_grads[0]);
      for (std::size_t s = 1; s < shard_grads.size(); ++s) {
        total.w_a = add(total.w_a, shard_grads[s].w_a);
        total.w_b = add(total.w_b, shard_grads[s].w_b);
        total.eta = add(total.eta, shard_grads[s].eta);
      }
      for (double l : shard_loss) epoch_loss += l;
      adam.step({&current.w_a, &current.w_b, &current.eta},
                {&total.w_a, &total.w_b, &total.eta});
      clamp_nonnegative_real(current.eta);
    }
    const double tn = eval_nmse(current);
    nmse_log.push_back(tn);
    res.log.push_back({epoch, epoch_loss, tn});
    if (tn < res.best_test_nmse) {
      res.best_test_nmse = tn;
      res.best_epoch = epoch;
      res.params = current;
    }
    if (convergence_epoch(nmse_log, tc.window) != 0) {
      res.converged = true;
      break;
    }
  }
  return res;
}

TrainResult<ListaSmoParams> train_lista_smo(const ListaSmoParams& init,
                                            const ComplexVector& h_diag,
                                            const Dataset& train_set,
                                            const Dataset& test_set,
                                            const TrainConfig& tc) {
  tc.validate();
  if (train_set.count() == 0 || test_set.count() == 0)
    throw ConfigError("train_lista_smo: empty dataset");
  const DmaConfig& cfg = train_set.dma;
  const bool self_supervised = tc.loss == LossMode::kSelfSupervised;

  auto target_of = [&](const ChannelSample& s) -> const ComplexVector& {
    return self_supervised ? s.y : s.g_star;
  };

  TrainResult<ListaSmoParams> res;
  res.params = init;
  res.best_test_nmse = std::numeric_limits<double>::infinity();
  ListaSmoParams current = init;
  Adam adam({tc.learning_rate});

  auto eval_nmse = [&](const ListaSmoParams& p) {
    double acc = 0.0;
    for (const ChannelSample& s : test_set.samples)
      acc += nmse_ratio(lista_smo_forward(p, s.y, h_diag, cfg), s.g_star);
    return acc / static_cast<double>(test_set.count());
  };

  std::vector<std::size_t> order(train_set.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> nmse_log;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(tc.seed, "shuffle", epoch));
    fisher_yates(order, shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += tc.batch_size) {
      const std::size_t end = std::min(start + tc.batch_size, order.size());
      const auto ranges = shard_ranges(end - start, tc.shards);
      std::vector<SmoGrads> shard_grads(ranges.size());
      std::vector<double> shard_loss(ranges.size(), 0.0);
      for_each_shard(ranges, [&](std::size_t s) {
        std::vector<const ComplexVector*> ys, ts;
        ys.reserve(ranges[s].second - ranges[s].first);
        ts.reserve(ys.capacity());
        for (std::size_t k = ranges[s].first; k < ranges[s].second; ++k) {
          const std::size_t idx = order[start + k];
          ys.push_back(&train_set.samples[idx].y);
          ts.push_back(&target_of(train_set.samples[idx]));
        }
        shard_loss[s] = smo_batch_loss(current, ys, ts, h_diag, cfg,
                                       &shard_grads[s]);
      });
      SmoGrads total = std::move(shard_grads[0]);
      for (std::size_t s = 1; s < shard_grads.size(); ++s) {
        total.w_phi = add(total.w_phi, shard_grads[s].w_phi);
        total.w_a = add(total.w_a, shard_grads[s].w_a);
        total.w_smo = add(total.w_smo, shard_grads[s].w_smo);
        total.eta = add(total.eta, shard_grads[s].eta);
        total.kappa = add(total.kappa, shard_grads[s].kappa);
      }
      for (double l : shard_loss) epoch_loss += l;
      adam.step({&current.w_phi, &current.w_a, &current.w_smo, &current.eta,
                 &current.kappa},
                {&total.w_phi, &total.w_a, &total.w_smo, &total.eta,
                 &total.kappa});
      clamp_nonnegative_real(current.eta);
    }
    const double tn = eval_nmse(current);
    nmse_log.push_back(tn);
    res.log.push_back({epoch, epoch_loss, tn});
    if (tn < res.best_test_nmse) {
      res.best_test_nmse = tn;
      res.best_epoch = epoch;
      res.params = current;
    }
    if (convergence_epoch(nmse_log, tc.window) != 0) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace dmace
