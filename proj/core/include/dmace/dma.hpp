#pragma once
#include <cstddef>
#include <vector>

#include "dmace/complex_matrix.hpp"
#include "dmace/rng.hpp"

namespace dmace {

// Planar metasurface receiver: n_d parallel microstrips, each feeding n_e
// radiating elements. Element (strip, elem) has linear index
// strip * n_e + elem with both indices 0-based.
struct DmaConfig {
  std::size_t n_d = 20;
  std::size_t n_e = 20;
  double wavelength = 0.0107;   // m
  double dx = 0.00535;          // element spacing along a strip, m
  double dy = 0.00535;          // strip spacing, m
  double alpha = 0.6;           // waveguide attenuation, Np/m
  double beta = 827.67;         // waveguide wavenumber, rad/m

  std::size_t elements() const { return n_d * n_e; }
  void validate() const;  // throws DomainError on bad values
};

// Per-element tunable phases, one per metamaterial element.
struct DmaWeights {
  std::vector<double> phases;  // radians, each in [0, 2*pi)
};

// Per-element response weight q = (j + exp(j*phi)) / 2.
cplx phase_to_weight(double phi);

// Smooth map from an unconstrained real to a phase in (0, 2*pi).
double sigmoid_phase_map(double x);

// Signal propagation along each strip: diagonal N x N matrix with entry
// exp(-rho * (alpha + j*beta)) at element (strip, elem), rho = elem * dx.
ComplexMatrix build_h(const DmaConfig& cfg);

// Analog combining matrix, n_d x N: row s carries the weights of strip s's
// elements in their own columns, zeros elsewhere.
ComplexMatrix build_q(const DmaWeights& w, const DmaConfig& cfg);

// Observation at the digital backend: z = Q H y.
ComplexVector dma_receive(const ComplexMatrix& q, const ComplexMatrix& h,
                          const ComplexVector& y);

// N i.i.d. phases uniform on [0, 2*pi).
DmaWeights random_dma_weights(const DmaConfig& cfg, Rng& rng);

}  // namespace dmace
