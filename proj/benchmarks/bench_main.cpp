// Microbenchmarks for the numeric hot paths: dense complex products, the
// spectral-norm power iteration, sparse solvers, and network forward and
// forward+backward passes at desk scale.
#include <benchmark/benchmark.h>

#include <vector>

#include "dmace/complex_matrix.hpp"
#include "dmace/dictionary.hpp"
#include "dmace/dma.hpp"
#include "dmace/nets.hpp"
#include "dmace/rng.hpp"
#include "dmace/solvers.hpp"

using namespace dmace;

namespace {

ComplexMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = cplx(rng.gaussian(), rng.gaussian());
  return m;
}

LassoProblem desk_problem(Rng& rng) {
  LassoProblem p;
  p.psi = random_matrix(4, 36, rng);
  ComplexVector alpha(36, 1);
  for (int k = 0; k < 3; ++k)
    alpha[std::size_t(rng.uniform_int(0, 35))] =
        cplx(rng.gaussian(), rng.gaussian());
  p.z = cmatmul(p.psi, alpha);
  for (std::size_t i = 0; i < p.z.size(); ++i)
    p.z[i] += 0.02 * cplx(rng.gaussian(), rng.gaussian());
  return p;
}

void bm_cmatmul(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  Rng rng(1);
  const ComplexMatrix a = random_matrix(n, n, rng);
  const ComplexMatrix b = random_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cmatmul(a, b));
  state.SetItemsProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(n * n * n));
}
BENCHMARK(bm_cmatmul)->Arg(16)->Arg(36)->Arg(100);

void bm_lambda_max(benchmark::State& state) {
  Rng rng(2);
  const ComplexMatrix psi = random_matrix(4, std::size_t(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(make_ista_operator(psi));
}
BENCHMARK(bm_lambda_max)->Arg(36)->Arg(100);

void bm_ista(benchmark::State& state) {
  Rng rng(3);
  const LassoProblem p = desk_problem(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(ista(p, 1e-4, std::size_t(state.range(0))));
}
BENCHMARK(bm_ista)->Arg(100)->Arg(2000);

void bm_fista(benchmark::State& state) {
  Rng rng(4);
  const LassoProblem p = desk_problem(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(fista(p, 1e-4, std::size_t(state.range(0))));
}
BENCHMARK(bm_fista)->Arg(100)->Arg(300);

void bm_lista_forward(benchmark::State& state) {
  Rng rng(5);
  const ListaParams p = init_lista(36, 4, std::size_t(state.range(0)), rng);
  const ComplexVector z = random_matrix(4, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lista_forward(p, z));
}
BENCHMARK(bm_lista_forward)->Arg(1)->Arg(8);

void bm_smo_forward(benchmark::State& state) {
  DmaConfig cfg{4, 4, 0.0107, 0.00535, 0.00535, 0.6, 827.67};
  Rng rng(6);
  const ListaSmoParams p =
      init_lista_smo(cfg, 36, std::size_t(state.range(0)), rng);
  const ComplexVector h_diag = diagonal_of(build_h(cfg));
  const ComplexVector y = random_matrix(cfg.elements(), 1, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(lista_smo_forward(p, y, h_diag, cfg));
}
BENCHMARK(bm_smo_forward)->Arg(1)->Arg(8);

void bm_lista_batch_grad(benchmark::State& state) {
  Rng rng(7);
  const std::size_t batch = 32;
  ListaParams p = init_lista(36, 4, 8, rng);
  std::vector<ComplexVector> zs, ts;
  for (std::size_t b = 0; b < batch; ++b) {
    zs.push_back(random_matrix(4, 1, rng));
    ts.push_back(random_matrix(36, 1, rng));
  }
  std::vector<const ComplexVector*> zp, tp;
  for (std::size_t b = 0; b < batch; ++b) {
    zp.push_back(&zs[b]);
    tp.push_back(&ts[b]);
  }
  for (auto _ : state) {
    ListaGrads g;
    benchmark::DoNotOptimize(lista_batch_loss(p, zp, tp, nullptr, &g));
  }
}
BENCHMARK(bm_lista_batch_grad);

void bm_smo_batch_grad(benchmark::State& state) {
  DmaConfig cfg{4, 4, 0.0107, 0.00535, 0.00535, 0.6, 827.67};
  Rng rng(8);
  const std::size_t batch = 32;
  ListaSmoParams p = init_lista_smo(cfg, 36, 8, rng);
  const ComplexVector h_diag = diagonal_of(build_h(cfg));
  std::vector<ComplexVector> ys, ts;
  for (std::size_t b = 0; b < batch; ++b) {
    ys.push_back(random_matrix(cfg.elements(), 1, rng));
    ts.push_back(random_matrix(cfg.elements(), 1, rng));
  }
  std::vector<const ComplexVector*> yp, tp;
  for (std::size_t b = 0; b < batch; ++b) {
    yp.push_back(&ys[b]);
    tp.push_back(&ts[b]);
  }
  for (auto _ : state) {
    SmoGrads g;
    benchmark::DoNotOptimize(smo_batch_loss(p, yp, tp, h_diag, cfg, &g));
  }
}
BENCHMARK(bm_smo_batch_grad);

}  // namespace

BENCHMARK_MAIN();
