#include "dmace/complex_matrix.hpp"

#include <cmath>
#include <string>

namespace dmace {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::initializer_list<cplx> entries)
    : rows_(rows), cols_(cols), data_(entries) {
  if (data_.size() != rows * cols)
    throw ShapeError("ComplexMatrix: initializer has " + std::to_string(data_.size()) +
                     " entries, expected " + std::to_string(rows * cols));
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::initializer_list<cplx> entries) {
  ComplexMatrix m(entries.size(), 1);
  std::size_t i = 0;
  for (const cplx& v : entries) m[i++] = v;
  return m;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

ComplexMatrix cmatmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("cmatmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  ComplexMatrix out(n, m);
  // ikj order: the inner loop runs over contiguous rows of b and out.
  for (std::size_t i = 0; i < n; ++i) {
    cplx* out_row = out.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = a[i * k + p];
      if (aip == cplx(0.0, 0.0)) continue;
      const cplx* b_row = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) out_row[j] += aip * b_row[j];
    }
  }
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("sub: shape mismatch");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

ComplexMatrix scale(const ComplexMatrix& a, cplx c) {
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return out;
}

ComplexMatrix complex_soft_threshold(const ComplexMatrix& x, double eta) {
  if (eta < 0.0) throw DomainError("complex_soft_threshold: eta must be nonnegative");
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(x[i]);
    if (r > eta) out[i] = x[i] * ((r - eta) / r);
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i]);
  return std::sqrt(s);
}

double l2_norm(const ComplexMatrix& v) { return frobenius_norm(v); }

double l1_norm(const ComplexMatrix& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::abs(v[i]);
  return s;
}

cplx inner_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: shape mismatch");
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

ComplexVector diagonal_of(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw ShapeError("diagonal_of: matrix must be square");
  ComplexVector d(m.rows(), 1);
  for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
  return d;
}

PowerIterationResult lambda_max(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("lambda_max: matrix must be square");
  const std::size_t n = m.rows();
  PowerIterationResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }

  constexpr double kRelTol = 1e-10;
  constexpr int kMaxIters = 1000;

  // All-ones start with a tiny index-dependent tilt so the start vector is
  // never orthogonal to the dominant eigenvector of a structured matrix.
  ComplexVector v(n, 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-6 * static_cast<double>(i + 1) / n;
  double vn = l2_norm(v);
  for (std::size_t i = 0; i < n; ++i) v[i] /= vn;

  double lambda = 0.0;
  for (int it = 1; it <= kMaxIters; ++it) {
    ComplexVector w = cmatmul(m, v);
    const double next = inner_product(v, w).real();  // Rayleigh quotient, v unit
    res.iterations = it;
    if (it > 1 && std::abs(next - lambda) <= kRelTol * std::max(std::abs(next), 1e-300)) {
      res.value = next;
      res.converged = true;
      return res;
    }
    lambda = next;
    const double wn = l2_norm(w);
    if (wn == 0.0) {
      // v is in the null space; for PSD input the largest eigenvalue is 0.
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= wn;
    v = std::move(w);
  }
  res.value = lambda;
  res.converged = false;
  return res;
}

}  // namespace dmace
