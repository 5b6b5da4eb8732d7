#pragma once
#include <cstddef>
#include <vector>

#include "dmace/complex_matrix.hpp"

namespace dmace {

// min_alpha ||z - Psi*alpha||_2 + xi * ||alpha||_1 (unsquared data term).
// Iterative solvers descend the smooth companion objective
// 0.5 * ||z - Psi*alpha||_2^2 + xi_tilde * ||alpha||_1 with
// xi_tilde = eta * lambda_max(Psi^H Psi).
struct LassoProblem {
  ComplexMatrix psi{0, 0};  // rows x D sensing matrix
  ComplexVector z{0, 1};    // observation
  double xi = 1e-4;
  void validate() const;
};

double lasso_objective(const LassoProblem& p, const ComplexVector& alpha);

double smooth_lasso_objective(const ComplexMatrix& psi, const ComplexVector& z,
                              double xi_tilde, const ComplexVector& alpha);

// Fixed linear maps of the shrinkage iteration
//   alpha <- h_eta(w_a * alpha + w_b * z),
// w_a = I - Psi^H Psi / lambda_max, w_b = Psi^H / lambda_max.
struct IstaOperator {
  ComplexMatrix w_a{0, 0};
  ComplexMatrix w_b{0, 0};
  double lambda_max = 0.0;
};

IstaOperator make_ista_operator(const ComplexMatrix& psi);

struct SolveTrace {
  ComplexVector alpha{0, 1};
  // objective[t] = smooth objective after t iterations (index 0 = start).
  std::vector<double> objective;
};

SolveTrace ista(const LassoProblem& p, double eta, std::size_t iters);

// Accelerated variant; momentum t_1 = 1, t_{k+1} = (1 + sqrt(1+4t_k^2))/2.
// With monotone = true keeps the best iterate so the trace never increases.
SolveTrace fista(const LassoProblem& p, double eta, std::size_t iters,
                 bool monotone = true);

// Cyclic exact coordinate minimization of the smooth objective; sweeps until
// the largest coordinate change drops below tol. Test-side optimum certifier.
ComplexVector coordinate_descent(const ComplexMatrix& psi,
                                 const ComplexVector& z, double xi_tilde,
                                 double tol, std::size_t max_sweeps = 200000);

// Stationarity residuals at alpha: correlations c_i = psi_i^H (z - Psi*alpha)
// must satisfy |c_i| <= xi_tilde on the zero set and |c_i| == xi_tilde on
// the support.
struct KktReport {
  double zero_set_excess = 0.0;    // max(0, |c_i| - xi_tilde) over alpha_i == 0
  double support_mismatch = 0.0;   // max ||c_i| - xi_tilde| over alpha_i != 0
  bool within(double tol) const {
    return zero_set_excess <= tol && support_mismatch <= tol;
  }
};

KktReport kkt_check(const ComplexMatrix& psi, const ComplexVector& z,
                    double xi_tilde, const ComplexVector& alpha);

}  // namespace dmace
