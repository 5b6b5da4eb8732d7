#include "dmace/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dmace/errors.hpp"
#include "dmace/rng.hpp"

namespace dmace {

namespace {
constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;

// Maclaurin series; alternating terms, partial sums stay O(10) for |x| <= 3
// so the absolute error is far below 1e-12 there.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 120; ++n) {
    term *= -x2 / n;
    const double inc = term / (2 * n + 1);
    sum += inc;
    if (std::abs(inc) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return 2.0 * kInvSqrtPi * sum;
}

// Lentz continued fraction for erfc(x), x > 0:
// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + (2/2)/(x + ...))).
double erfc_cf(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 400; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) * kInvSqrtPi / f;
}
}  // namespace

double erf_value(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (ax == 0.0) return x;  // preserves signed zero
  double v;
  if (ax <= 3.0)
    v = erf_series(ax);
  else if (ax < 27.0)
    v = 1.0 - erfc_cf(ax);
  else
    v = 1.0;  // erfc underflows double precision
  return x < 0.0 ? -v : v;
}

double normal_cdf(double x, double mean, double stddev) {
  if (!(stddev > 0.0)) throw DomainError("normal_cdf: stddev must be > 0");
  return 0.5 + 0.5 * erf_value((x - mean) / (stddev * std::numbers::sqrt2));
}

namespace {
double p_rec_from_denominator(std::size_t n_e, std::size_t l_p,
                              double denominator) {
  if (n_e < 1 || l_p < 1)
    throw DomainError("p_rec: need n_e >= 1 and l_p >= 1");
  const double num = std::numbers::sqrt2 - static_cast<double>(n_e) / 2.0;
  const double bracket = 0.5 + 0.5 * erf_value(num / denominator);
  return std::pow(bracket, 2.0 * static_cast<double>(l_p));
}
}  // namespace

double p_rec_formula(std::size_t n_e, std::size_t l_p) {
  return p_rec_from_denominator(
      n_e, l_p, std::numbers::sqrt2 * static_cast<double>(n_e) / 12.0);
}

double p_rec_formula_clt(std::size_t n_e, std::size_t l_p) {
  return p_rec_from_denominator(
      n_e, l_p, std::sqrt(2.0 * static_cast<double>(n_e) / 12.0));
}

RipEstimate ric_monte_carlo(const DmaConfig& cfg, std::size_t k,
                            std::size_t trials, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = cfg.elements();
  if (k < 1 || k > n)
    throw DomainError("ric_monte_carlo: need 1 <= k <= element count");
  if (trials < 1) throw DomainError("ric_monte_carlo: need trials >= 1");

  // |h| along a strip depends only on the element index.
  std::vector<double> h_mag2(cfg.n_e);
  for (std::size_t e = 0; e < cfg.n_e; ++e) {
    const double rho = static_cast<double>(e) * cfg.dx;
    h_mag2[e] = std::exp(-2.0 * cfg.alpha * rho);
  }

  RipEstimate est;
  est.k = k;
  est.trials = trials;
  est.cfg = cfg;
  est.deltas.resize(trials);
  est.s_max.resize(trials);
  est.s_samples.reserve(trials * cfg.n_d);

  std::vector<double> slots(n);
  std::vector<std::size_t> order(n);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "ric-trial", t));
    const DmaWeights w = random_dma_weights(cfg, rng);
    double smax = 0.0;
    for (std::size_t strip = 0; strip < cfg.n_d; ++strip) {
      double s = 0.0;
      for (std::size_t e = 0; e < cfg.n_e; ++e) {
        const double q2 =
            0.5 * (1.0 + std::sin(w.phases[strip * cfg.n_e + e]));
        s += q2 * h_mag2[e];
      }
      slots[strip] = s;
      est.s_samples.push_back(s);
      smax = std::max(smax, s);
    }
    std::fill(slots.begin() + static_cast<std::ptrdiff_t>(cfg.n_d),
              slots.end(), 0.0);
    est.s_max[t] = smax;

    // Partial Fisher-Yates: the first k entries are a uniform subset.
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    double delta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(
                                    0, static_cast<std::int64_t>(n - i) - 1));
      std::swap(order[i], order[j]);
      delta = std::max(delta, std::abs(slots[order[i]] - 1.0));
    }
    est.deltas[t] = delta;
  }
  return est;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw DomainError("mean_of: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) throw DomainError("std_error_of: need >= 2 samples");
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  const double var = acc / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

double ks_against_normal(std::vector<double> samples, double mean,
                         double variance) {
  if (samples.empty()) throw DomainError("ks_against_normal: empty sample");
  if (!(variance > 0.0))
    throw DomainError("ks_against_normal: variance must be > 0");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double sd = std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i], mean, sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return d;
}

double delta_rho_formula(const PathSet& paths, double xi, double sigma,
                         const GridDictionary& dict, const DmaConfig& cfg) {
  if (!(sigma > 0.0))
    throw DomainError("delta_rho_formula: sigma must be > 0");
  const double denom = std::numbers::sqrt2 * sigma;
  double total = 0.0;
  for (const Path& p : paths.paths) {
    const double a = std::abs(p.gain);
    const double chi = mismatch_chi(p, dict, cfg).real();
    total += a * (erf_value((xi - a * chi) / denom) -
                  erf_value((xi - a) / denom));
  }
  return total;
}

GriddingLossEstimate empirical_gridding_loss(const PathSet& paths, double xi,
                                             double sigma,
                                             const GridDictionary& dict,
                                             const DmaConfig& cfg,
                                             std::size_t trials,
                                             std::uint64_t seed) {
  if (!(sigma > 0.0))
    throw DomainError("empirical_gridding_loss: sigma must be > 0");
  if (trials < 1)
    throw DomainError("empirical_gridding_loss: need trials >= 1");
  std::vector<double> amp(paths.count());
  std::vector<double> chi(paths.count());
  for (std::size_t l = 0; l < paths.count(); ++l) {
    amp[l] = std::abs(paths.paths[l].gain);
    chi[l] = mismatch_chi(paths.paths[l], dict, cfg).real();
  }
  std::vector<double> draws(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "grid-trial", t));
    double x = 0.0;
    for (std::size_t l = 0; l < paths.count(); ++l) {
      const double nu = sigma * rng.gaussian();
      // Shared noise pairs the with/without-mismatch shrink events, so the
      // difference estimates the two-erf expression at this path.
      const bool shrunk_grid = amp[l] * chi[l] + nu < xi;
      const bool shrunk_exact = amp[l] + nu < xi;
      x += 2.0 * amp[l] *
           (static_cast<double>(shrunk_grid) -
            static_cast<double>(shrunk_exact));
    }
    draws[t] = x;
  }
  GriddingLossEstimate est;
  est.trials = trials;
  est.value = mean_of(draws);
  est.std_error = trials >= 2 ? std_error_of(draws) : 0.0;
  return est;
}

}  // namespace dmace
