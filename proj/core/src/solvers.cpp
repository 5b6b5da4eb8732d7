#include "dmace/solvers.hpp"

#include <cmath>

#include "dmace/errors.hpp"

namespace dmace {

void LassoProblem::validate() const {
  if (z.cols() != 1 || psi.rows() != z.rows())
    throw ShapeError("lasso: observation length must match sensing rows");
  if (!(xi > 0.0)) throw DomainError("lasso: regularizer must be positive");
}

double lasso_objective(const LassoProblem& p, const ComplexVector& alpha) {
  if (alpha.cols() != 1 || alpha.rows() != p.psi.cols())
    throw ShapeError("lasso_objective: coefficient length mismatch");
  const ComplexVector r = sub(p.z, cmatmul(p.psi, alpha));
  return l2_norm(r) + p.xi * l1_norm(alpha);
}

double smooth_lasso_objective(const ComplexMatrix& psi, const ComplexVector& z,
                              double xi_tilde, const ComplexVector& alpha) {
  const ComplexVector r = sub(z, cmatmul(psi, alpha));
  const double d = l2_norm(r);
  return 0.5 * d * d + xi_tilde * l1_norm(alpha);
}

IstaOperator make_ista_operator(const ComplexMatrix& psi) {
  const ComplexMatrix ph = adjoint(psi);
  const ComplexMatrix gram = cmatmul(ph, psi);
  const PowerIterationResult lm = lambda_max(gram);
  if (lm.value <= 0.0)
    throw DomainError("ista: degenerate problem, lambda_max is zero");
  IstaOperator op;
  op.lambda_max = lm.value;
  const cplx inv{1.0 / lm.value, 0.0};
  op.w_b = scale(ph, inv);
  op.w_a = sub(ComplexMatrix::identity(gram.rows()), scale(gram, inv));
  return op;
}

SolveTrace ista(const LassoProblem& p, double eta, std::size_t iters) {
  p.validate();
  if (iters < 1) throw DomainError("ista: need at least one iteration");
  if (!(eta >= 0.0)) throw DomainError("ista: threshold must be >= 0");
  const IstaOperator op = make_ista_operator(p.psi);
  const double xi_tilde = eta * op.lambda_max;
  const ComplexVector bz = cmatmul(op.w_b, p.z);
  SolveTrace out;
  out.alpha = ComplexVector(p.psi.cols(), 1);
  out.objective.reserve(iters + 1);
  out.objective.push_back(smooth_lasso_objective(p.psi, p.z, xi_tilde,
                                                 out.alpha));
  for (std::size_t t = 0; t < iters; ++t) {
    out.alpha = complex_soft_threshold(add(cmatmul(op.w_a, out.alpha), bz),
                                       eta);
    out.objective.push_back(smooth_lasso_objective(p.psi, p.z, xi_tilde,
                                                   out.alpha));
  }
  return out;
}

SolveTrace fista(const LassoProblem& p, double eta, std::size_t iters,
                 bool monotone) {
  p.validate();
  if (iters < 1) throw DomainError("fista: need at least one iteration");
  if (!(eta >= 0.0)) throw DomainError("fista: threshold must be >= 0");
  const IstaOperator op = make_ista_operator(p.psi);
  const double xi_tilde = eta * op.lambda_max;
  const ComplexVector bz = cmatmul(op.w_b, p.z);

  ComplexVector alpha(p.psi.cols(), 1);       // kept iterate
  ComplexVector alpha_prev = alpha;
  ComplexVector y = alpha;                    // extrapolated point
  double t_k = 1.0;
  double obj = smooth_lasso_objective(p.psi, p.z, xi_tilde, alpha);

  SolveTrace out;
  out.objective.reserve(iters + 1);
  out.objective.push_back(obj);

  for (std::size_t k = 0; k < iters; ++k) {
    const ComplexVector prox =
        complex_soft_threshold(add(cmatmul(op.w_a, y), bz), eta);
    const double prox_obj = smooth_lasso_objective(p.psi, p.z, xi_tilde, prox);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));

    alpha_prev = alpha;
    if (monotone && prox_obj > obj) {
      // Keep the incumbent; the prox point still drives the momentum so the
      // accelerated sequence is undisturbed.
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = alpha[i] + (t_k / t_next) * (prox[i] - alpha[i]) +
               ((t_k - 1.0) / t_next) * (alpha[i] - alpha_prev[i]);
    } else {
      alpha = prox;
      obj = prox_obj;
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = alpha[i] + ((t_k - 1.0) / t_next) * (alpha[i] - alpha_prev[i]);
    }
    t_k = t_next;
    out.objective.push_back(obj);
  }
  out.alpha = std::move(alpha);
  return out;
}

ComplexVector coordinate_descent(const ComplexMatrix& psi,
                                 const ComplexVector& z, double xi_tilde,
                                 double tol, std::size_t max_sweeps) {
  if (z.cols() != 1 || psi.rows() != z.rows())
    throw ShapeError("coordinate_descent: shape mismatch");
  if (!(tol > 0.0))
    throw DomainError("coordinate_descent: tolerance must be positive");
  const std::size_t d = psi.cols();
  const std::size_t m = psi.rows();
  std::vector<double> col_energy(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += std::norm(psi(r, i));
    col_energy[i] = acc;
  }
  ComplexVector alpha(d, 1);
  ComplexVector resid = z;  // z - Psi*alpha, starts at z since alpha = 0
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (col_energy[i] == 0.0) continue;
      cplx corr{0.0, 0.0};
      for (std::size_t r = 0; r < m; ++r)
        corr += std::conj(psi(r, i)) * resid[r];
      corr += col_energy[i] * alpha[i];
      const double mag = std::abs(corr);
      cplx next{0.0, 0.0};
      if (mag > xi_tilde)
        next = corr * ((mag - xi_tilde) / mag) / col_energy[i];
      const cplx delta = alpha[i] - next;
      if (delta != cplx{0.0, 0.0}) {
        for (std::size_t r = 0; r < m; ++r) resid[r] += psi(r, i) * delta;
        alpha[i] = next;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change < tol) return alpha;
  }
  return alpha;
}

KktReport kkt_check(const ComplexMatrix& psi, const ComplexVector& z,
                    double xi_tilde, const ComplexVector& alpha) {
  if (alpha.cols() != 1 || alpha.rows() != psi.cols() || z.rows() != psi.rows())
    throw ShapeError("kkt_check: shape mismatch");
  const ComplexVector resid = sub(z, cmatmul(psi, alpha));
  KktReport rep;
  for (std::size_t i = 0; i < psi.cols(); ++i) {
    cplx corr{0.0, 0.0};
    for (std::size_t r = 0; r < psi.rows(); ++r)
      corr += std::conj(psi(r, i)) * resid[r];
    const double mag = std::abs(corr);
    if (alpha[i] == cplx{0.0, 0.0})
      rep.zero_set_excess = std::max(rep.zero_set_excess, mag - xi_tilde);
    else
      rep.support_mismatch =
          std::max(rep.support_mismatch, std::abs(mag - xi_tilde));
  }
  rep.zero_set_excess = std::max(rep.zero_set_excess, 0.0);
  return rep;
}

}  // namespace dmace
