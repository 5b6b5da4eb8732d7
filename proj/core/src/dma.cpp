#include "dmace/dma.hpp"

#include <cmath>
#include <numbers>

#include "dmace/errors.hpp"

namespace dmace {

void DmaConfig::validate() const {
  if (n_d < 1 || n_e < 1) throw DomainError("dma: need n_d >= 1 and n_e >= 1");
  if (!(wavelength > 0.0) || !(dx > 0.0) || !(dy > 0.0))
    throw DomainError("dma: wavelength and spacings must be positive");
  if (!(alpha >= 0.0)) throw DomainError("dma: attenuation must be >= 0");
  if (!(beta > 0.0)) throw DomainError("dma: wavenumber must be positive");
}

cplx phase_to_weight(double phi) {
  return (cplx{0.0, 1.0} + std::exp(cplx{0.0, phi})) * 0.5;
}

double sigmoid_phase_map(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (x >= 0.0) return two_pi / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return two_pi * e / (1.0 + e);
}

ComplexMatrix build_h(const DmaConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.elements();
  ComplexMatrix h(n, n);
  for (std::size_t s = 0; s < cfg.n_d; ++s)
    for (std::size_t e = 0; e < cfg.n_e; ++e) {
      const double rho = static_cast<double>(e) * cfg.dx;
      const std::size_t k = s * cfg.n_e + e;
      h(k, k) = std::exp(cplx{-rho * cfg.alpha, -rho * cfg.beta});
    }
  return h;
}

ComplexMatrix build_q(const DmaWeights& w, const DmaConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.elements();
  if (w.phases.size() != n)
    throw ShapeError("build_q: phase count does not match element count");
  ComplexMatrix q(cfg.n_d, n);
  for (std::size_t k = 0; k < n; ++k)
    q(k / cfg.n_e, k) = phase_to_weight(w.phases[k]);
  return q;
}

ComplexVector dma_receive(const ComplexMatrix& q, const ComplexMatrix& h,
                          const ComplexVector& y) {
  if (y.cols() != 1) throw ShapeError("dma_receive: y must be a column");
  if (h.rows() != h.cols() || h.rows() != y.rows() || q.cols() != h.rows())
    throw ShapeError("dma_receive: inconsistent shapes");
  // H is diagonal; apply it elementwise before the combining matmul.
  ComplexVector hy(y.rows(), 1);
  for (std::size_t i = 0; i < y.rows(); ++i) hy[i] = h(i, i) * y[i];
  return cmatmul(q, hy);
}

DmaWeights random_dma_weights(const DmaConfig& cfg, Rng& rng) {
  cfg.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  DmaWeights w;
  w.phases.resize(cfg.elements());
  for (double& p : w.phases) p = rng.uniform(0.0, two_pi);
  return w;
}

}  // namespace dmace
