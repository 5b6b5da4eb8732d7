#pragma once
#include <cstdint>
#include <vector>

#include "dmace/channel.hpp"
#include "dmace/dictionary.hpp"
#include "dmace/dma.hpp"

namespace dmace {

// Error function, |error| <= 1e-12 on [-6, 6]: Maclaurin series for small
// arguments, Lentz continued fraction for the complementary tail beyond.
double erf_value(double x);

// Standard normal CDF via erf_value.
double normal_cdf(double x, double mean = 0.0, double stddev = 1.0);

// Exact-recovery probability bound under random per-element phases,
// [1/2 + 1/2 erf((sqrt(2) - n_e/2) / (sqrt(2) * n_e / 12))]^(2 l_p),
// evaluated with the denominator exactly as printed in the source analysis.
double p_rec_formula(std::size_t n_e, std::size_t l_p);

// Same bound with the CLT-consistent denominator sqrt(2 * n_e / 12); the
// two readings disagree and both are reported by the theory check.
double p_rec_formula_clt(std::size_t n_e, std::size_t l_p);

struct RipEstimate {
  std::size_t k = 0;
  std::size_t trials = 0;
  DmaConfig cfg;
  std::vector<double> deltas;     // per-trial max |s - 1| over a random
                                  // size-k subset of the eigenvalue slots
  std::vector<double> s_max;      // per-trial largest strip eigenvalue
  std::vector<double> s_samples;  // every per-strip eigenvalue drawn
};

// Spectrum of C = (QH)^H QH is {s_1..s_n_d} plus N - n_d zeros, with
// s_n the summed |q h|^2 over strip n. Each trial draws fresh phases from
// a per-trial seed, so results are independent of evaluation order.
RipEstimate ric_monte_carlo(const DmaConfig& cfg, std::size_t k,
                            std::size_t trials, std::uint64_t seed);

double mean_of(const std::vector<double>& v);
double std_error_of(const std::vector<double>& v);

// Kolmogorov-Smirnov distance between samples and N(mean, variance).
double ks_against_normal(std::vector<double> samples, double mean,
                         double variance);

// Closed-form accuracy loss from snapping arrivals to the grid: for each
// path with amplitude a and grid-mismatch coherence chi,
//   a * [erf((xi - a*Re(chi)) / (sqrt(2) sigma)) -
//        erf((xi - a) / (sqrt(2) sigma))],
// summed over paths; nonnegative whenever 0 <= Re(chi) <= 1.
double delta_rho_formula(const PathSet& paths, double xi, double sigma,
                         const GridDictionary& dict, const DmaConfig& cfg);

struct GriddingLossEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// Paired Monte Carlo counterpart of delta_rho_formula: per trial and path,
// one shared noise draw decides whether the peak correlation falls below
// xi with and without grid mismatch; the paired difference estimates the
// same two-erf expression.
GriddingLossEstimate empirical_gridding_loss(const PathSet& paths, double xi,
                                             double sigma,
                                             const GridDictionary& dict,
                                             const DmaConfig& cfg,
                                             std::size_t trials,
                                             std::uint64_t seed);

}  // namespace dmace
