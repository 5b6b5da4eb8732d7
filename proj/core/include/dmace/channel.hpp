#pragma once
#include <cstddef>
#include <vector>

#include "dmace/complex_matrix.hpp"
#include "dmace/dma.hpp"
#include "dmace/rng.hpp"

namespace dmace {

struct Path {
  cplx gain{0.0, 0.0};
  double theta = 0.0;     // azimuth, radians
  double phi = 0.0;       // elevation, radians
  double distance = 0.0;  // meters
};

struct PathSet {
  std::vector<Path> paths;
  std::size_t count() const { return paths.size(); }
};

// Unit-norm array response for arrival (theta, phi): per-strip factor
// a_y[m] = exp(j*m*2*pi*(dy/wl)*sin(theta)sin(phi)) / sqrt(n_d) and
// per-element factor a_x[k] = exp(j*k*2*pi*(dx/wl)*cos(theta)sin(phi)) /
// sqrt(n_e), combined as entry(m*n_e + k) = a_y[m] * a_x[k].
ComplexVector steering_vector(double theta, double phi, const DmaConfig& cfg);

// Distance/elevation attenuation sqrt(2(b+1)cos^b(phi)) * wl / (4*pi*d).
double path_gain(double d, double phi, double wavelength, int b = 2);

// L_p ~ U{2..6}; per path d ~ U(15,60) m, theta ~ U(pi/6, 5pi/6),
// phi ~ U(pi/12, 5pi/12), gain from path_gain with b = 2.
PathSet sample_paths(const DmaConfig& cfg, Rng& rng);

// g = sqrt(N / L_p) * sum_l gain_l * steering_vector(theta_l, phi_l).
ComplexVector synthesize_channel(const PathSet& paths, const DmaConfig& cfg);

struct PilotObservation {
  ComplexVector y;
  double sigma = 0.0;  // per-element noise standard deviation
};

// y = g + n, n circularly symmetric complex Gaussian with per-element
// variance sigma^2 = ||g||^2 / (N * 10^(snr_db/10)).
PilotObservation observe_pilot(const ComplexVector& g, double snr_db,
                               const DmaConfig& cfg, Rng& rng);

}  // namespace dmace
