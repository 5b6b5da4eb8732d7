#include "dmace/dictionary.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dmace/errors.hpp"

namespace dmace {

GridDictionary build_grid_dictionary(std::size_t k_phi, std::size_t k_theta,
                                     const DmaConfig& cfg) {
  if (k_phi < 1 || k_theta < 1)
    throw DomainError("grid dictionary: need at least one point per axis");
  constexpr double pi = std::numbers::pi;
  GridDictionary dict;
  dict.angles.reserve(k_theta * k_phi);
  dict.atoms = ComplexMatrix(cfg.elements(), k_theta * k_phi);
  std::size_t col = 0;
  for (std::size_t it = 1; it <= k_theta; ++it) {
    const double theta = static_cast<double>(it) * pi /
                         static_cast<double>(k_theta);
    for (std::size_t ip = 1; ip <= k_phi; ++ip, ++col) {
      const double phi = static_cast<double>(ip) * pi /
                         (2.0 * static_cast<double>(k_phi));
      dict.angles.emplace_back(theta, phi);
      const ComplexVector a = steering_vector(theta, phi, cfg);
      for (std::size_t r = 0; r < a.rows(); ++r) dict.atoms(r, col) = a[r];
    }
  }
  return dict;
}

std::size_t nearest_grid_index(double theta, double phi,
                               const GridDictionary& dict) {
  if (dict.size() == 0) throw DomainError("nearest_grid_index: empty grid");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dict.angles.size(); ++i) {
    const double dt = theta - dict.angles[i].first;
    const double dp = phi - dict.angles[i].second;
    const double d2 = dt * dt + dp * dp;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

ComplexVector nearest_grid_label(const PathSet& paths,
                                 const GridDictionary& dict) {
  if (dict.size() == 0) throw DomainError("nearest_grid_label: empty grid");
  if (paths.count() == 0)
    throw DomainError("nearest_grid_label: empty path set");
  const double pre = std::sqrt(static_cast<double>(dict.atoms.rows()) /
                               static_cast<double>(paths.count()));
  ComplexVector label(dict.size(), 1);
  for (const Path& p : paths.paths)
    label[nearest_grid_index(p.theta, p.phi, dict)] += pre * p.gain;
  return label;
}

cplx mismatch_chi(const Path& path, const GridDictionary& dict,
                  const DmaConfig& cfg) {
  const std::size_t idx = nearest_grid_index(path.theta, path.phi, dict);
  // An arrival sitting exactly on its grid point has coherence 1 by
  // definition; short-circuiting keeps that value exact instead of
  // 1 +/- rounding from the inner product below.
  if (path.theta == dict.angles[idx].first &&
      path.phi == dict.angles[idx].second)
    return cplx(1.0, 0.0);
  ComplexVector atom(dict.atoms.rows(), 1);
  for (std::size_t r = 0; r < atom.rows(); ++r) atom[r] = dict.atoms(r, idx);
  const ComplexVector truth = steering_vector(path.theta, path.phi, cfg);
  return inner_product(atom, truth);
}

}  // namespace dmace
