#include "dmace/channel.hpp"

#include <cmath>
#include <numbers>

#include "dmace/errors.hpp"

namespace dmace {

namespace {
constexpr double kPi = std::numbers::pi;
}

ComplexVector steering_vector(double theta, double phi, const DmaConfig& cfg) {
  cfg.validate();
  const double wx = 2.0 * kPi * (cfg.dx / cfg.wavelength) * std::cos(theta) *
                    std::sin(phi);
  const double wy = 2.0 * kPi * (cfg.dy / cfg.wavelength) * std::sin(theta) *
                    std::sin(phi);
  const double sx = 1.0 / std::sqrt(static_cast<double>(cfg.n_e));
  const double sy = 1.0 / std::sqrt(static_cast<double>(cfg.n_d));
  ComplexVector a(cfg.elements(), 1);
  for (std::size_t m = 0; m < cfg.n_d; ++m) {
    const cplx ay =
        std::exp(cplx{0.0, wy * static_cast<double>(m)}) * sy;
    for (std::size_t k = 0; k < cfg.n_e; ++k)
      a[m * cfg.n_e + k] =
          ay * std::exp(cplx{0.0, wx * static_cast<double>(k)}) * sx;
  }
  return a;
}

double path_gain(double d, double phi, double wavelength, int b) {
  if (!(d > 0.0)) throw DomainError("path_gain: distance must be positive");
  if (!(wavelength > 0.0))
    throw DomainError("path_gain: wavelength must be positive");
  const double profile = 2.0 * (b + 1) * std::pow(std::cos(phi), b);
  if (profile < 0.0)
    throw DomainError("path_gain: radiation profile negative at this angle");
  return std::sqrt(profile) * wavelength / (4.0 * kPi * d);
}

PathSet sample_paths(const DmaConfig& cfg, Rng& rng) {
  cfg.validate();
  PathSet set;
  const std::size_t lp = static_cast<std::size_t>(rng.uniform_int(2, 6));
  set.paths.resize(lp);
  for (Path& p : set.paths) {
    p.distance = rng.uniform(15.0, 60.0);
    p.theta = rng.uniform(kPi / 6.0, 5.0 * kPi / 6.0);
    p.phi = rng.uniform(kPi / 12.0, 5.0 * kPi / 12.0);
    p.gain = cplx{path_gain(p.distance, p.phi, cfg.wavelength), 0.0};
  }
  return set;
}

ComplexVector synthesize_channel(const PathSet& paths, const DmaConfig& cfg) {
  if (paths.count() == 0)
    throw DomainError("synthesize_channel: empty path set");
  const double pre = std::sqrt(static_cast<double>(cfg.elements()) /
                               static_cast<double>(paths.count()));
  ComplexVector g(cfg.elements(), 1);
  for (const Path& p : paths.paths) {
    const ComplexVector a = steering_vector(p.theta, p.phi, cfg);
    const cplx c = pre * p.gain;
    for (std::size_t i = 0; i < g.rows(); ++i) g[i] += c * a[i];
  }
  return g;
}

PilotObservation observe_pilot(const ComplexVector& g, double snr_db,
                               const DmaConfig& cfg, Rng& rng) {
  if (g.cols() != 1 || g.rows() != cfg.elements())
    throw ShapeError("observe_pilot: channel length must equal element count");
  const double energy = l2_norm(g) * l2_norm(g);
  if (energy == 0.0)
    throw DomainError("observe_pilot: zero channel has undefined snr");
  const double n = static_cast<double>(cfg.elements());
  const double sigma2 = energy / (n * std::pow(10.0, snr_db / 10.0));
  const double s = std::sqrt(sigma2 / 2.0);
  PilotObservation out;
  out.sigma = std::sqrt(sigma2);
  out.y = ComplexVector(g.rows(), 1);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    out.y[i] = g[i] + cplx{s * re, s * im};
  }
  return out;
}

}  // namespace dmace
