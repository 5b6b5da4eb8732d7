#include "dmace/adam.hpp"

#include <cmath>

#include "dmace/errors.hpp"

namespace dmace {

void Adam::step(const std::vector<ComplexMatrix*>& params,
                const std::vector<const ComplexMatrix*>& grads) {
  if (params.size() != grads.size())
    throw ShapeError("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const ComplexMatrix* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  } else if (m_.size() != params.size()) {
    throw ShapeError("adam: parameter count changed between steps");
  }

  ++t_;
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));

  for (std::size_t k = 0; k < params.size(); ++k) {
    ComplexMatrix& p = *params[k];
    const ComplexMatrix& g = *grads[k];
    if (!p.same_shape(m_[k]) || !g.same_shape(m_[k]))
      throw ShapeError("adam: shape mismatch with registered state");
    ComplexMatrix& m = m_[k];
    ComplexMatrix& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gr = g[i].real();
      const double gi = g[i].imag();
      const double mr = opt_.beta1 * m[i].real() + (1.0 - opt_.beta1) * gr;
      const double mi = opt_.beta1 * m[i].imag() + (1.0 - opt_.beta1) * gi;
      const double vr = opt_.beta2 * v[i].real() + (1.0 - opt_.beta2) * gr * gr;
      const double vi = opt_.beta2 * v[i].imag() + (1.0 - opt_.beta2) * gi * gi;
      m[i] = cplx{mr, mi};
      v[i] = cplx{vr, vi};
      const double ur = opt_.lr * (mr / bc1) / (std::sqrt(vr / bc2) + opt_.eps);
      const double ui = opt_.lr * (mi / bc1) / (std::sqrt(vi / bc2) + opt_.eps);
      p[i] -= cplx{ur, ui};
    }
  }
}

}  // namespace dmace
