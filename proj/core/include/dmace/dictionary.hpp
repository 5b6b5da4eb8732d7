#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "dmace/channel.hpp"
#include "dmace/complex_matrix.hpp"
#include "dmace/dma.hpp"

namespace dmace {

// Steering-vector dictionary over a uniform product grid of arrival angles.
struct GridDictionary {
  ComplexMatrix atoms{0, 0};                        // N x D, unit-norm columns
  std::vector<std::pair<double, double>> angles;    // (theta, phi) per column
  std::size_t size() const { return angles.size(); }
};

// Grid points theta = k*pi/k_theta (k = 1..k_theta) and
// phi = k*pi/(2*k_phi) (k = 1..k_phi); column order is theta-major.
GridDictionary build_grid_dictionary(std::size_t k_phi, std::size_t k_theta,
                                     const DmaConfig& cfg);

// Index of the grid point closest to (theta, phi) in Euclidean angle space.
std::size_t nearest_grid_index(double theta, double phi,
                               const GridDictionary& dict);

// Sparse label: each path contributes sqrt(N/L_p) * gain at its nearest
// grid index; paths sharing a grid point sum their coefficients.
ComplexVector nearest_grid_label(const PathSet& paths,
                                 const GridDictionary& dict);

// Inner product between the nearest grid atom and the path's true steering
// vector; |chi| <= 1, == 1 when the path lies exactly on a grid point.
cplx mismatch_chi(const Path& path, const GridDictionary& dict,
                  const DmaConfig& cfg);

}  // namespace dmace
