#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dmace/dictionary.hpp"
#include "dmace/errors.hpp"

using namespace dmace;

namespace {
constexpr double kPi = std::numbers::pi;

DmaConfig cfg_2x2() {
  DmaConfig cfg;
  cfg.n_d = 2;
  cfg.n_e = 2;
  return cfg;
}
}  // namespace

TEST_CASE("grid geometry and column order") {
  const DmaConfig cfg = cfg_2x2();
  const GridDictionary dict = build_grid_dictionary(3, 4, cfg);  // k_phi, k_theta
  REQUIRE(dict.size() == 12);
  REQUIRE(dict.atoms.rows() == 4);
  REQUIRE(dict.atoms.cols() == 12);
  // Azimuth varies slowest: column it*k_phi + ip carries
  // theta = (it+1) pi / k_theta, phi = (ip+1) pi / (2 k_phi).
  for (std::size_t it = 0; it < 4; ++it)
    for (std::size_t ip = 0; ip < 3; ++ip) {
      const auto& [theta, phi] = dict.angles[it * 3 + ip];
      CHECK(theta == doctest::Approx(double(it + 1) * kPi / 4.0));
      CHECK(phi == doctest::Approx(double(ip + 1) * kPi / 6.0));
    }
  // Each column is the unit-norm response at its grid angles.
  for (std::size_t c = 0; c < dict.size(); ++c) {
    const ComplexVector a =
        steering_vector(dict.angles[c].first, dict.angles[c].second, cfg);
    double col_norm2 = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(std::abs(dict.atoms(r, c) - a[r]) < 1e-15);
      col_norm2 += std::norm(dict.atoms(r, c));
    }
    CHECK(std::sqrt(col_norm2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_grid_dictionary(0, 4, cfg), DomainError);
}

TEST_CASE("nearest grid point lookup") {
  const GridDictionary dict = build_grid_dictionary(3, 4, cfg_2x2());
  // On-grid angles map to their own column.
  for (std::size_t c = 0; c < dict.size(); ++c)
    CHECK(nearest_grid_index(dict.angles[c].first, dict.angles[c].second,
                             dict) == c);
  // A slightly perturbed angle keeps its column.
  const auto& [t0, p0] = dict.angles[5];
  CHECK(nearest_grid_index(t0 + 0.01, p0 - 0.01, dict) == 5);
}

TEST_CASE("sparse labels accumulate per grid cell") {
  const DmaConfig cfg = cfg_2x2();
  const GridDictionary dict = build_grid_dictionary(3, 4, cfg);
  PathSet ps;
  Path a;
  a.gain = cplx(0.5, 0.0);
  a.theta = dict.angles[2].first;
  a.phi = dict.angles[2].second;
  Path b = a;
  b.gain = cplx(0.0, 0.25);  // same cell: coefficients add
  Path c;
  c.gain = cplx(1.0, -1.0);
  c.theta = dict.angles[9].first + 0.02;  // snaps to cell 9
  c.phi = dict.angles[9].second;
  ps.paths = {a, b, c};
  const ComplexVector label = nearest_grid_label(ps, dict);
  REQUIRE(label.rows() == 12);
  const double pre = std::sqrt(4.0 / 3.0);  // sqrt(N / L_p)
  CHECK(std::abs(label[2] - pre * cplx(0.5, 0.25)) < 1e-15);
  CHECK(std::abs(label[9] - pre * cplx(1.0, -1.0)) < 1e-15);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < label.size(); ++i)
    if (std::abs(label[i]) > 0.0) ++nonzero;
  CHECK(nonzero == 2);
}

TEST_CASE("grid mismatch coherence") {
  const DmaConfig cfg = cfg_2x2();
  const GridDictionary dict = build_grid_dictionary(3, 4, cfg);
  Path on;
  on.theta = dict.angles[7].first;
  on.phi = dict.angles[7].second;
  // Exactly on the grid the atom and the response coincide.
  CHECK(std::abs(mismatch_chi(on, dict, cfg)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  Path off = on;
  off.theta += 0.12;
  off.phi -= 0.07;
  const double c = std::abs(mismatch_chi(off, dict, cfg));
  CHECK(c < 1.0);
  CHECK(c > 0.0);
  // Cauchy-Schwarz bound for a wide scan of arrivals.
  for (int k = 0; k < 50; ++k) {
    Path p;
    p.theta = kPi / 6 + (2 * kPi / 3) * (k / 50.0);
    p.phi = kPi / 12 + (kPi / 3) * ((k * 7 % 50) / 50.0);
    CHECK(std::abs(mismatch_chi(p, dict, cfg)) <= 1.0 + 1e-12);
  }
}
