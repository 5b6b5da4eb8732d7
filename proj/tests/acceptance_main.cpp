// Acceptance gate: nine scripted end-to-end checks, one printed verdict
// line each. The process exits with the number of failed checks, so any
// nonzero status means the gate is closed. Heavier checks reuse trained
// checkpoints through the on-disk model cache shared with the sweep
// machinery; the work directory is wiped at startup so every run measures a
// cold start.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "dmace/checkpoint.hpp"
#include "dmace/experiment.hpp"
#include "dmace/solvers.hpp"
#include "dmace/theory.hpp"
#include "oracles.hpp"

using namespace dmace;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances and budgets -----------------------------------
constexpr double kSolverObjectiveTol = 1e-6;   // vs coordinate-descent optimum
constexpr double kSolverKktTol = 1e-5;         // stationarity residual
constexpr double kLayerEquivalenceTol = 1e-12; // unrolled vs iterated
constexpr double kGradRelTol = 1e-5;           // finite-difference agreement
constexpr double kKinkMargin = 1e-3;           // pre-activation distance to eta
constexpr double kTieAllowanceDb = 0.3;        // ordering slack, criterion 4
constexpr double kSelfSupGapDb = 3.0;          // supervised vs self-supervised
constexpr double kSnrSlackDb = 0.5;            // monotonicity slack per step
constexpr double kErfTol = 1e-12;              // vs quadrature
constexpr double kGriddingBandSe = 3.0;        // closed form vs monte carlo
constexpr double kSolverBudgetS = 30.0;
constexpr double kGradBudgetS = 60.0;
constexpr double kTrendBudgetS = 900.0;
constexpr double kTheoryBudgetS = 60.0;

// Desk-scale run: the library defaults describe the scenario; the training
// schedule is stretched so the combiner network can work its random
// initialization back down (its test curve is noisy for ~100 epochs, so the
// stop rule needs a wide window to not fire mid-descent).
ExperimentConfig desk_config(const fs::path& out_dir) {
  ExperimentConfig cfg;
  cfg.output_dir = out_dir.string();
  cfg.training.max_epochs = 260;
  cfg.training.window = 60;
  return cfg;
}

ExperimentConfig micro_config() {
  ExperimentConfig cfg;
  cfg.name = "micro";
  cfg.seed = 97;
  cfg.dma.n_d = 2;
  cfg.dma.n_e = 2;
  cfg.k_theta = 3;
  cfg.k_phi = 3;
  cfg.train_count = 48;
  cfg.test_count = 16;
  cfg.validation_count = 24;
  cfg.snr_list = {6.0, 12.0};
  cfg.layers = 2;
  cfg.layer_list = {1, 2};
  cfg.dict_sizes = {4, 9};
  cfg.pilot_counts = {2, 1};
  cfg.training.batch_size = 16;
  cfg.training.max_epochs = 2;
  cfg.training.window = 2;
  cfg.ista_iters = 50;
  cfg.fista_iters = 40;
  return cfg;
}

int g_failures = 0;

void verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return std::string(buf);
}

ComplexMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = cplx(rng.gaussian(), rng.gaussian());
  return m;
}

ComplexVector random_vector(std::size_t n, Rng& rng) {
  return random_matrix(n, 1, rng);
}

LassoProblem random_sparse_instance(std::size_t rows, std::size_t dict,
                                    std::size_t support, Rng& rng) {
  LassoProblem p;
  p.psi = random_matrix(rows, dict, rng);
  ComplexVector alpha(dict, 1);
  for (std::size_t k = 0; k < support; ++k)
    alpha[std::size_t(rng.uniform_int(0, std::int64_t(dict) - 1))] =
        cplx(rng.gaussian(), rng.gaussian());
  p.z = cmatmul(p.psi, alpha);
  for (std::size_t i = 0; i < p.z.size(); ++i)
    p.z[i] += 0.02 * cplx(rng.gaussian(), rng.gaussian());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

std::string mask_runtime_column(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      os << line << '\n';
      header = false;
      continue;
    }
    std::size_t col = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (col != 4) os << line.substr(start, i - start);
        os << (i == line.size() ? '\n' : ',');
        start = i + 1;
        ++col;
      }
    }
  }
  return os.str();
}

// ---- criterion 1: iterative solvers vs coordinate-descent oracle ------

void criterion_solvers() {
  const auto t0 = std::chrono::steady_clock::now();
  // Threshold keeps the optimum sparse (support below the row count), the
  // regime where the plain iteration converges linearly.
  const double eta = 0.05;
  double worst_obj_gap = 0.0, worst_kkt = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(1001, "solver-instance", std::uint64_t(trial)));
    const LassoProblem p = random_sparse_instance(8, 20, 2, rng);
    const IstaOperator op = make_ista_operator(p.psi);
    const double xi_tilde = eta * op.lambda_max;
    const ComplexVector ref = coordinate_descent(p.psi, p.z, xi_tilde, 1e-13);
    const double ref_obj = smooth_lasso_objective(p.psi, p.z, xi_tilde, ref);
    const SolveTrace si = ista(p, eta, 2000);
    const SolveTrace sf = fista(p, eta, 300);
    const double gap_i = si.objective.back() - ref_obj;
    const double gap_f = sf.objective.back() - ref_obj;
    worst_obj_gap = std::max({worst_obj_gap, gap_i, gap_f});
    for (const ComplexVector* a : {&ref, &si.alpha, &sf.alpha}) {
      const KktReport rep = kkt_check(p.psi, p.z, xi_tilde, *a);
      worst_kkt = std::max({worst_kkt, rep.zero_set_excess,
                            rep.support_mismatch});
    }
  }
  const double dt = seconds_since(t0);
  ok = worst_obj_gap <= kSolverObjectiveTol && worst_kkt <= kSolverKktTol &&
       dt < kSolverBudgetS;
  verdict(1, ok,
          fmt("iterative solvers vs coordinate oracle on 20 instances: max "
              "objective gap %.3g (tol %.0e), max kkt residual %.3g (tol "
              "%.0e), %.1fs (budget %.0fs)",
              worst_obj_gap, kSolverObjectiveTol, worst_kkt, kSolverKktTol,
              dt, kSolverBudgetS));
}

// ---- criterion 2: unrolled network replays the iteration --------------

void criterion_unrolled_equivalence() {
  double worst = 0.0;
  const std::size_t layers = 8;
  const double eta = 5e-3;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(2002, "unroll", std::uint64_t(seed)));
    const LassoProblem p = random_sparse_instance(8, 20, 2, rng);
    const IstaOperator op = make_ista_operator(p.psi);
    ListaParams lp;
    lp.w_a = op.w_a;
    lp.w_b = op.w_b;
    lp.eta = ComplexMatrix(layers, 1);
    for (std::size_t l = 0; l < layers; ++l) lp.eta[l] = cplx(eta, 0.0);
    std::vector<ComplexVector> trace;
    lista_forward(lp, p.z, &trace);
    for (std::size_t l = 1; l <= layers; ++l) {
      const SolveTrace st = ista(p, eta, l);
      for (std::size_t i = 0; i < st.alpha.size(); ++i)
        worst = std::max(worst, std::abs(st.alpha[i] - trace[l - 1][i]));
    }
  }
  verdict(2, worst <= kLayerEquivalenceTol,
          fmt("unrolled network with analytic weights vs iterated solver, "
              "10 seeds x 8 layers: max entry difference %.3g (tol %.0e)",
              worst, kLayerEquivalenceTol));
}

// ---- criterion 3: gradient suite ---------------------------------------

struct GradCheckStats {
  double worst_rel = 0.0;
  std::size_t checked = 0;
};

// Relative disagreement with a unit floor so near-zero channels compare
// absolutely.
void fd_compare(double analytic, const std::function<double(double)>& bump,
                GradCheckStats& stats) {
  const double h = 1e-6;
  const double fd = (bump(h) - bump(-h)) / (2.0 * h);
  const double rel =
      std::abs(analytic - fd) / std::max({std::abs(fd), std::abs(analytic), 1.0});
  stats.worst_rel = std::max(stats.worst_rel, rel);
  ++stats.checked;
}

// Smallest pre-activation distance to the active threshold across layers:
// points closer than the margin are resampled so central differences never
// straddle the shrinkage kink.
double lista_kink_distance(const ListaParams& p,
                           const std::vector<ComplexVector>& zs) {
  double dist = 1e9;
  for (const ComplexVector& z : zs) {
    const ComplexVector bz = cmatmul(p.w_b, z);
    ComplexVector alpha(p.w_a.rows(), 1);
    for (std::size_t l = 0; l < p.layers(); ++l) {
      const ComplexVector pre = add(cmatmul(p.w_a, alpha), bz);
      for (std::size_t i = 0; i < pre.size(); ++i)
        dist = std::min(dist, std::abs(std::abs(pre[i]) - p.eta_at(l)));
      alpha = complex_soft_threshold(pre, p.eta_at(l));
    }
  }
  return dist;
}

double smo_kink_distance(const ListaSmoParams& p,
                         const std::vector<ComplexVector>& ys,
                         const ComplexVector& h_diag, const DmaConfig& cfg) {
  double dist = 1e9;
  const ComplexMatrix q = materialize_q(p, cfg);
  for (const ComplexVector& y : ys) {
    ComplexVector hy(y.rows(), 1);
    for (std::size_t i = 0; i < y.size(); ++i) hy[i] = h_diag[i] * y[i];
    const ComplexVector zhat = cmatmul(q, hy);
    ComplexVector g(cfg.elements(), 1);
    const ComplexMatrix w_ah = adjoint(p.w_a);
    for (std::size_t l = 0; l < p.layers(); ++l) {
      ComplexVector hg(g.rows(), 1);
      for (std::size_t i = 0; i < g.size(); ++i) hg[i] = h_diag[i] * g[i];
      const ComplexVector resid = sub(cmatmul(q, hg), zhat);
      const ComplexVector step = cmatmul(p.w_smo, resid);
      ComplexVector pre(g.rows(), 1);
      for (std::size_t i = 0; i < pre.size(); ++i)
        pre[i] = g[i] - p.kappa_at(l) * step[i];
      const ComplexVector lin = cmatmul(p.w_a, pre);
      for (std::size_t i = 0; i < lin.size(); ++i)
        dist = std::min(dist, std::abs(std::abs(lin[i]) - p.eta_at(l)));
      g = cmatmul(w_ah, complex_soft_threshold(lin, p.eta_at(l)));
    }
  }
  return dist;
}

void criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  DmaConfig cfg;
  cfg.n_d = 2;
  cfg.n_e = 4;  // N = 8
  const std::size_t dict_size = 12;
  const std::size_t layers = 2;
  const std::size_t batch = 3;
  const ComplexVector h_diag = diagonal_of(build_h(cfg));
  GradCheckStats stats;
  std::size_t points_done = 0;

  for (std::uint64_t attempt = 0; points_done < 10 && attempt < 40;
       ++attempt) {
    Rng rng(derive_seed(3003, "grad-point", attempt));
    // Coefficient-domain network.
    ListaParams lp = init_lista(dict_size, cfg.n_d, layers, rng);
    for (std::size_t l = 0; l < layers; ++l)
      lp.eta[l] = cplx(0.02 + 0.03 * rng.uniform(), 0.0);
    std::vector<ComplexVector> zs, ztargets;
    for (std::size_t b = 0; b < batch; ++b) {
      zs.push_back(random_vector(cfg.n_d, rng));
      ztargets.push_back(random_vector(dict_size, rng));
    }
    // Channel-domain network.
    ListaSmoParams sp = init_lista_smo(cfg, dict_size, layers, rng);
    for (std::size_t l = 0; l < layers; ++l) {
      sp.eta[l] = cplx(0.02 + 0.03 * rng.uniform(), 0.0);
      sp.kappa[l] = cplx(0.5 + rng.uniform(), 0.0);
    }
    std::vector<ComplexVector> ys, ytargets;
    for (std::size_t b = 0; b < batch; ++b) {
      ys.push_back(random_vector(cfg.elements(), rng));
      ytargets.push_back(random_vector(cfg.elements(), rng));
    }
    if (lista_kink_distance(lp, zs) < kKinkMargin ||
        smo_kink_distance(sp, ys, h_diag, cfg) < kKinkMargin)
      continue;  // too close to a shrinkage kink: next random point
    ++points_done;

    std::vector<const ComplexVector*> zp, ztp, yp, ytp;
    for (std::size_t b = 0; b < batch; ++b) {
      zp.push_back(&zs[b]);
      ztp.push_back(&ztargets[b]);
      yp.push_back(&ys[b]);
      ytp.push_back(&ytargets[b]);
    }

    ListaGrads lg;
    lista_batch_loss(lp, zp, ztp, nullptr, &lg);
    auto lista_loss = [&] {
      return lista_batch_loss(lp, zp, ztp, nullptr, nullptr);
    };
    auto check_lista_matrix = [&](ComplexMatrix& m, const ComplexMatrix& g) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        fd_compare(g[i].real(), [&](double d) {
          m[i] += cplx(d, 0.0);
          const double v = lista_loss();
          m[i] -= cplx(d, 0.0);
          return v;
        }, stats);
        fd_compare(g[i].imag(), [&](double d) {
          m[i] += cplx(0.0, d);
          const double v = lista_loss();
          m[i] -= cplx(0.0, d);
          return v;
        }, stats);
      }
    };
    check_lista_matrix(lp.w_a, lg.w_a);
    check_lista_matrix(lp.w_b, lg.w_b);
    for (std::size_t l = 0; l < layers; ++l)
      fd_compare(lg.eta[l].real(), [&](double d) {
        lp.eta[l] += cplx(d, 0.0);
        const double v = lista_loss();
        lp.eta[l] -= cplx(d, 0.0);
        return v;
      }, stats);

    SmoGrads sg;
    smo_batch_loss(sp, yp, ytp, h_diag, cfg, &sg);
    auto smo_loss = [&] {
      return smo_batch_loss(sp, yp, ytp, h_diag, cfg, nullptr);
    };
    auto check_smo_matrix = [&](ComplexMatrix& m, const ComplexMatrix& g,
                                bool imag_channel) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        fd_compare(g[i].real(), [&](double d) {
          m[i] += cplx(d, 0.0);
          const double v = smo_loss();
          m[i] -= cplx(d, 0.0);
          return v;
        }, stats);
        if (!imag_channel) continue;
        fd_compare(g[i].imag(), [&](double d) {
          m[i] += cplx(0.0, d);
          const double v = smo_loss();
          m[i] -= cplx(0.0, d);
          return v;
        }, stats);
      }
    };
    check_smo_matrix(sp.w_a, sg.w_a, true);
    check_smo_matrix(sp.w_smo, sg.w_smo, true);
    check_smo_matrix(sp.w_phi, sg.w_phi, false);  // real pre-phases
    for (std::size_t l = 0; l < layers; ++l) {
      fd_compare(sg.eta[l].real(), [&](double d) {
        sp.eta[l] += cplx(d, 0.0);
        const double v = smo_loss();
        sp.eta[l] -= cplx(d, 0.0);
        return v;
      }, stats);
      fd_compare(sg.kappa[l].real(), [&](double d) {
        sp.kappa[l] += cplx(d, 0.0);
        const double v = smo_loss();
        sp.kappa[l] -= cplx(d, 0.0);
        return v;
      }, stats);
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = points_done == 10 && stats.worst_rel < kGradRelTol &&
                  dt < kGradBudgetS;
  verdict(3, ok,
          fmt("finite-difference gradient suite, %zu points, %zu channel "
              "checks: worst relative error %.3g (tol %.0e), %.1fs (budget "
              "%.0fs)",
              points_done, stats.checked, stats.worst_rel, kGradRelTol, dt,
              kGradBudgetS));
}

// ---- criteria 4-6: desk-scale trend reproduction -----------------------

struct DeskResults {
  double fista_db = 0.0;
  double lista_db = 0.0;
  double smo_db = 0.0;
  double selfsup_db = 0.0;
  double untrained_db = 0.0;
  double train_seconds = 0.0;
};

void criterion_trends(const fs::path& work) {
  const fs::path desk_dir = work / "desk";
  const ExperimentConfig cfg = desk_config(desk_dir);
  DeskResults res;

  // Criterion 4: supervised ordering at 12 dB within the compute budget.
  {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
      const TrainRunSummary lista_run =
          run_training(cfg, "lista", cfg.layers, LossMode::kSupervised,
                       desk_dir);
      const TrainRunSummary smo_run =
          run_training(cfg, "lista-smo", cfg.layers, LossMode::kSupervised,
                       desk_dir);
      const Scenario sc = make_scenario(cfg);
      const Dataset val = make_validation_dataset(cfg, sc.dict, 12.0);
      res.fista_db = nmse_db(evaluate_nmse_fista(sc, sc.dict, val));
      const ListaParams lp =
          lista_from_checkpoint(load_checkpoint(lista_run.checkpoint_path));
      const ListaSmoParams sp = lista_smo_from_checkpoint(
          load_checkpoint(smo_run.checkpoint_path));
      res.lista_db = nmse_db(evaluate_nmse_lista(sc, lp, val));
      res.smo_db = nmse_db(evaluate_nmse_smo(sc, sp, val));
      res.train_seconds = seconds_since(t0);
      const bool order_ok =
          res.smo_db <= res.lista_db + kTieAllowanceDb &&
          res.lista_db <= res.fista_db + kTieAllowanceDb;
      const bool budget_ok = res.train_seconds < kTrendBudgetS;
      ok = order_ok && budget_ok;
      detail = fmt(
          "12 dB validation NMSE ordering: combiner-net %.2f dB <= "
          "coefficient-net %.2f dB <= accelerated solver %.2f dB (tie "
          "allowance %.1f dB), %.0fs (budget %.0fs)",
          res.smo_db, res.lista_db, res.fista_db, kTieAllowanceDb,
          res.train_seconds, kTrendBudgetS);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("desk-scale training failed: ") + e.what();
    }
    verdict(4, ok, detail);
  }

  // Criterion 5: self-supervised variant lands near the supervised one and
  // clearly improves on its starting point.
  {
    bool ok = true;
    std::string detail;
    try {
      const TrainRunSummary self_run = run_training(
          cfg, "lista-smo", cfg.layers, LossMode::kSelfSupervised, desk_dir);
      const Scenario sc = make_scenario(cfg);
      const Dataset val = make_validation_dataset(cfg, sc.dict, 12.0);
      const ListaSmoParams sp = lista_smo_from_checkpoint(
          load_checkpoint(self_run.checkpoint_path));
      res.selfsup_db = nmse_db(evaluate_nmse_smo(sc, sp, val));
      // The untrained baseline is the exact initialization the run started
      // from (same derived seed).
      Rng init_rng(derive_seed(cfg.seed, "init-smo", cfg.layers, 1));
      const ListaSmoParams init =
          init_lista_smo(cfg.dma, sc.dict.size(), cfg.layers, init_rng);
      res.untrained_db = nmse_db(evaluate_nmse_smo(sc, init, val));
      ok = res.selfsup_db <= res.smo_db + kSelfSupGapDb &&
           res.selfsup_db < res.untrained_db;
      detail = fmt(
          "self-supervised combiner-net %.2f dB vs supervised %.2f dB (gap "
          "allowance %.1f dB), untrained initialization %.2f dB",
          res.selfsup_db, res.smo_db, kSelfSupGapDb, res.untrained_db);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("self-supervised training failed: ") + e.what();
    }
    verdict(5, ok, detail);
  }

  // Criterion 6: monotone trends along all four sweep axes.
  {
    bool ok = true;
    std::string detail;
    try {
      std::vector<std::string> notes;
      const SweepResult snr = run_sweep(cfg, SweepAxis::kSnr, desk_dir);
      if (!snr.errors.empty())
        throw ContractError("snr sweep reported point failures");
      std::map<std::string, std::vector<std::pair<double, double>>> by_algo;
      for (const SweepRow& r : snr.rows)
        by_algo[r.algorithm].push_back({r.axis_value, r.nmse_db});
      for (const auto& [algo, pts] : by_algo) {
        if (algo == "zero") continue;
        for (std::size_t i = 1; i < pts.size(); ++i)
          if (pts[i].second > pts[i - 1].second + kSnrSlackDb) {
            ok = false;
            notes.push_back(fmt("%s not snr-monotone at %g dB", algo.c_str(),
                                pts[i].first));
          }
      }

      const SweepResult layers = run_sweep(cfg, SweepAxis::kLayers, desk_dir);
      if (!layers.errors.empty())
        throw ContractError("layer sweep reported point failures");
      std::map<std::string, std::map<double, double>> depth;
      for (const SweepRow& r : layers.rows)
        depth[r.algorithm][r.axis_value] = r.nmse;
      for (const char* algo : {"lista", "lista-smo"}) {
        if (depth[algo][8.0] > depth[algo][1.0]) {
          ok = false;
          notes.push_back(fmt("%s deep net worse than single layer", algo));
        }
      }

      const SweepResult comp =
          run_sweep(cfg, SweepAxis::kCompression, desk_dir);
      if (!comp.errors.empty())
        throw ContractError("compression sweep reported point failures");
      std::vector<std::pair<double, double>> gam;
      for (const SweepRow& r : comp.rows)
        if (r.algorithm == "fista") gam.push_back({r.axis_value, r.nmse});
      for (std::size_t i = 1; i < gam.size(); ++i) {
        if (gam[i].first <= gam[i - 1].first) {
          ok = false;
          notes.push_back("compression axis not ordered by gamma");
        }
        if (gam[i].second < gam[i - 1].second - 1e-12) {
          ok = false;
          notes.push_back(fmt("nmse improved when compressing harder "
                              "(gamma %.2f)",
                              gam[i].first));
        }
      }

      const SweepResult dict = run_sweep(cfg, SweepAxis::kDict, desk_dir);
      if (!dict.errors.empty())
        throw ContractError("dictionary sweep reported point failures");
      std::map<double, double> dsize;
      for (const SweepRow& r : dict.rows)
        if (r.algorithm == "fista") dsize[r.axis_value] = r.nmse;
      const double coarse_step = std::abs(dsize[16.0] - dsize[36.0]);
      const double fine_step = std::abs(dsize[64.0] - dsize[100.0]);
      if (fine_step > coarse_step) {
        ok = false;
        notes.push_back(fmt("dictionary curve not flattening (%.4g vs %.4g)",
                            fine_step, coarse_step));
      }

      detail = fmt(
          "snr/layer/compression/dictionary sweeps: snr curves monotone "
          "within %.1f dB, depth 8 <= depth 1, nmse non-decreasing in gamma, "
          "dictionary saturation %.4g <= %.4g",
          kSnrSlackDb, fine_step, coarse_step);
      if (!ok) {
        detail = "trend violations:";
        for (const std::string& n : notes) detail += " " + n + ";";
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("sweep failed: ") + e.what();
    }
    verdict(6, ok, detail);
  }
}

// ---- criterion 7: recovery-probability machinery ------------------------

void criterion_recovery_probability(const fs::path& work) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string note;
  double worst_erf = 0.0;
  for (double x = -6.0; x <= 6.0 + 1e-9; x += 0.0625)
    worst_erf =
        std::max(worst_erf, std::abs(erf_value(x) - oracle::erf_quadrature(x)));
  if (worst_erf > kErfTol) {
    ok = false;
    note += fmt(" erf error %.3g;", worst_erf);
  }
  // Monotone non-increasing in both arguments, vanishing for wide strips.
  const std::size_t widths[] = {1, 2, 4, 8, 12, 16, 24, 40, 64};
  for (std::size_t lp = 1; lp <= 6; ++lp) {
    double prev = 1.0 + 1e-15;
    for (std::size_t w : widths) {
      const double p = p_rec_formula(w, lp);
      if (p < 0.0 || p > 1.0 || p > prev + 1e-15) {
        ok = false;
        note += fmt(" p_rec not monotone at n_e=%zu l_p=%zu;", w, lp);
      }
      prev = p;
    }
  }
  for (std::size_t w : widths)
    for (std::size_t lp = 1; lp < 6; ++lp)
      if (p_rec_formula(w, lp + 1) > p_rec_formula(w, lp) + 1e-15) {
        ok = false;
        note += fmt(" p_rec not monotone in l_p at n_e=%zu;", w);
      }
  if (p_rec_formula(64, 1) > 1e-10) {
    ok = false;
    note += " tail does not vanish;";
  }
  // Monte carlo report with standard errors for both statistic variants.
  ExperimentConfig cfg;
  cfg.output_dir = (work / "theory").string();
  const std::string text = theory_check_json(cfg, 200);
  const auto j = nlohmann::json::parse(text);
  const auto& iso = j["restricted_isometry"];
  for (const char* field : {"delta_mean", "delta_std_error", "s_max_mean",
                            "s_max_std_error", "ks_vs_normal"})
    if (!iso.contains(field)) {
      ok = false;
      note += fmt(" isometry report missing %s;", field);
    }
  if (!j["recovery_probability"].contains("as_printed") ||
      !j["recovery_probability"].contains("clt")) {
    ok = false;
    note += " missing denominator variant tables;";
  }
  fs::create_directories(work / "theory");
  std::ofstream(work / "theory" / "theory-check.json") << text;
  const double dt = seconds_since(t0);
  if (dt >= kTheoryBudgetS) {
    ok = false;
    note += fmt(" budget exceeded (%.1fs);", dt);
  }
  verdict(7, ok,
          ok ? fmt("erf within %.0e of quadrature (worst %.3g), recovery "
                   "probability monotone and vanishing, monte carlo report "
                   "with both variants written, %.1fs",
                   kErfTol, worst_erf, dt)
             : note);
}

// ---- criterion 8: gridding-loss machinery -------------------------------

void criterion_gridding() {
  bool ok = true;
  std::string note;
  DmaConfig cfg;
  cfg.n_d = 4;
  cfg.n_e = 4;
  const GridDictionary dict = build_grid_dictionary(6, 6, cfg);
  // Exact zero on the grid.
  PathSet on;
  Path p;
  p.theta = dict.angles[14].first;
  p.phi = dict.angles[14].second;
  p.gain = cplx(0.7, -0.4);
  on.paths = {p};
  const double zero_val = delta_rho_formula(on, 0.5, 0.4, dict, cfg);
  if (zero_val != 0.0) {
    ok = false;
    note += fmt(" on-grid loss %.3g != 0;", zero_val);
  }
  // Non-negative over random scenarios, and closed form within the monte
  // carlo band.
  double worst_dist = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(derive_seed(8008, "grid-scenario", s));
    const PathSet ps = sample_paths(cfg, rng);
    double a_max = 0.0;
    for (const Path& q : ps.paths) a_max = std::max(a_max, std::abs(q.gain));
    const double xi = (0.3 + 0.9 * rng.uniform()) * a_max;
    const double sigma = (0.2 + 0.8 * rng.uniform()) * a_max;
    const double closed = delta_rho_formula(ps, xi, sigma, dict, cfg);
    if (closed < 0.0) {
      ok = false;
      note += fmt(" negative closed form at scenario %llu;",
                  static_cast<unsigned long long>(s));
    }
    const GriddingLossEstimate mc = empirical_gridding_loss(
        ps, xi, sigma, dict, cfg, 500, derive_seed(8008, "grid-trials", s));
    const double dist = mc.std_error > 0.0
                            ? std::abs(mc.value - closed) / mc.std_error
                            : (mc.value == closed ? 0.0 : 1e9);
    worst_dist = std::max(worst_dist, dist);
  }
  if (worst_dist > kGriddingBandSe) {
    ok = false;
    note += fmt(" closed form %.2f standard errors from monte carlo;",
                worst_dist);
  }
  verdict(8, ok,
          ok ? fmt("grid-snap loss: exact zero on grid, nonnegative, closed "
                   "form within %.2f of %.1f allowed standard errors over 20 "
                   "scenarios",
                   worst_dist, kGriddingBandSe)
             : note);
}

// ---- criterion 9: determinism and persistence ---------------------------

void criterion_determinism(const fs::path& work) {
  bool ok = true;
  std::string note;
  const ExperimentConfig cfg = micro_config();
  try {
    // Datasets: regeneration and round trip are byte-stable.
    const Scenario sc = make_scenario(cfg);
    const Dataset d1 = make_train_dataset(cfg, sc.dict);
    const Dataset d2 = make_train_dataset(cfg, sc.dict);
    const fs::path data_dir = work / "determinism";
    fs::create_directories(data_dir);
    write_dataset(data_dir / "a.bin", d1);
    write_dataset(data_dir / "b.bin", d2);
    if (slurp(data_dir / "a.bin") != slurp(data_dir / "b.bin")) {
      ok = false;
      note += " regenerated dataset differs;";
    }
    const Dataset rt = read_dataset(data_dir / "a.bin");
    write_dataset(data_dir / "rt.bin", rt);
    if (slurp(data_dir / "rt.bin") != slurp(data_dir / "a.bin")) {
      ok = false;
      note += " dataset round trip not lossless;";
    }

    // Checkpoints: identical seeds retrain to identical bytes.
    const TrainRunSummary t1 = run_training(cfg, "lista-smo", 2,
                                            LossMode::kSupervised,
                                            data_dir / "train1");
    const TrainRunSummary t2 = run_training(cfg, "lista-smo", 2,
                                            LossMode::kSupervised,
                                            data_dir / "train2");
    const std::string ck1 = slurp(t1.checkpoint_path);
    if (ck1.empty() || ck1 != slurp(t2.checkpoint_path)) {
      ok = false;
      note += " retrained checkpoint differs;";
    }
    const Checkpoint ck = load_checkpoint(t1.checkpoint_path);
    save_checkpoint(data_dir / "rt.ckpt", ck);
    if (slurp(data_dir / "rt.ckpt") != ck1) {
      ok = false;
      note += " checkpoint round trip not lossless;";
    }

    // Sweeps: resumed runs are byte-identical, cold runs differ only in
    // the runtime column.
    const SweepResult s1 = run_sweep(cfg, SweepAxis::kSnr, data_dir / "s1");
    const std::string csv1 = slurp(s1.csv_path);
    const SweepResult s1b = run_sweep(cfg, SweepAxis::kSnr, data_dir / "s1");
    if (slurp(s1b.csv_path) != csv1) {
      ok = false;
      note += " resumed sweep csv differs;";
    }
    const SweepResult s2 = run_sweep(cfg, SweepAxis::kSnr, data_dir / "s2");
    if (mask_runtime_column(slurp(s2.csv_path)) != mask_runtime_column(csv1)) {
      ok = false;
      note += " cold sweep csv differs beyond runtime;";
    }
  } catch (const std::exception& e) {
    ok = false;
    note += std::string(" exception: ") + e.what();
  }
  verdict(9, ok,
          ok ? "datasets, checkpoints and sweep csv byte-stable across "
               "reruns; round trips lossless"
             : note);
}

}  // namespace

int main() {
  const fs::path work = fs::current_path() / "acceptance-out";
  std::error_code ec;
  fs::remove_all(work, ec);  // cold start: no reuse between gate runs
  fs::create_directories(work);

  criterion_solvers();
  criterion_unrolled_equivalence();
  criterion_gradients();
  criterion_trends(work);
  criterion_recovery_probability(work);
  criterion_gridding();
  criterion_determinism(work);

  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
