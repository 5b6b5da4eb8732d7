#pragma once
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "dmace/errors.hpp"

namespace dmace {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Vectors are n-by-1 matrices.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(std::initializer_list<cplx> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool is_vector() const { return cols_ == 1; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  bool same_shape(const ComplexMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  void fill(cplx v) { data_.assign(data_.size(), v); }

  // True if every entry is finite in both components.
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

using ComplexVector = ComplexMatrix;  // n-by-1 by convention

// Exact complex matrix product. Throws ShapeError on inner-dimension mismatch.
ComplexMatrix cmatmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, cplx c);

// Phase-preserving shrinkage: entrywise (x/|x|) * max(|x| - eta, 0).
ComplexMatrix complex_soft_threshold(const ComplexMatrix& x, double eta);

double frobenius_norm(const ComplexMatrix& a);
double l2_norm(const ComplexMatrix& v);   // Frobenius; named for vector use
double l1_norm(const ComplexMatrix& v);   // sum of entry moduli
// <a, b> = sum conj(a_i) b_i over all entries (shapes must match).
cplx inner_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Main diagonal of a square matrix as a column vector.
ComplexVector diagonal_of(const ComplexMatrix& m);

struct PowerIterationResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
// Relative tolerance 1e-10, iteration cap 1000, deterministic start vector.
PowerIterationResult lambda_max(const ComplexMatrix& m);

}  // namespace dmace
