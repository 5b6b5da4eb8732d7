#include "dmace/tape.hpp"

#include <cmath>
#include <cstdlib>

#include "dmace/errors.hpp"

namespace dmace {
namespace {

double stable_sigmoid_phase(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  if (a >= 0.0) return two_pi / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return two_pi * e / (1.0 + e);
}

cplx phase_to_weight(double phi) {
  return (cplx{0.0, 1.0} + std::exp(cplx{0.0, phi})) * 0.5;
}

}  // namespace

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::constant(ComplexMatrix value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = false;
  return push(std::move(n));
}

Tape::NodeId Tape::parameter(ComplexMatrix value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = true;
  const NodeId id = push(std::move(n));
  params_.push_back(id);
  return id;
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  const ComplexMatrix& A = nodes_[a].value;
  const ComplexMatrix& B = nodes_[b].value;
  if (A.cols() != B.rows()) throw ShapeError("matmul: inner dimensions differ");
  Node n;
  n.op = Op::kMatmul;
  n.a = a;
  n.b = b;
  n.value = cmatmul(A, B);
  n.requires_grad = needs(a) || needs(b);
  return push(std::move(n));
}

Tape::NodeId Tape::adjoint_of(NodeId a) {
  Node n;
  n.op = Op::kAdjoint;
  n.a = a;
  n.value = adjoint(nodes_[a].value);
  n.requires_grad = needs(a);
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = dmace::add(nodes_[a].value, nodes_[b].value);
  n.requires_grad = needs(a) || needs(b);
  return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.value = dmace::sub(nodes_[a].value, nodes_[b].value);
  n.requires_grad = needs(a) || needs(b);
  return push(std::move(n));
}

Tape::NodeId Tape::scale_const(NodeId a, cplx c) {
  Node n;
  n.op = Op::kScaleConst;
  n.a = a;
  n.payload = c;
  n.value = scale(nodes_[a].value, c);
  n.requires_grad = needs(a);
  return push(std::move(n));
}

Tape::NodeId Tape::scale_by(NodeId scalar, NodeId a) {
  const ComplexMatrix& s = nodes_[scalar].value;
  if (s.rows() != 1 || s.cols() != 1)
    throw ShapeError("scale_by: scalar node must be 1x1");
  Node n;
  n.op = Op::kScaleByScalar;
  n.a = a;
  n.b = scalar;
  n.value = scale(nodes_[a].value, cplx{s[0].real(), 0.0});
  n.requires_grad = needs(a) || needs(scalar);
  return push(std::move(n));
}

Tape::NodeId Tape::diag_scale(NodeId d, NodeId x) {
  const ComplexMatrix& D = nodes_[d].value;
  const ComplexMatrix& X = nodes_[x].value;
  if (!D.same_shape(X)) throw ShapeError("diag_scale: shape mismatch");
  Node n;
  n.op = Op::kDiagScale;
  n.a = d;
  n.b = x;
  ComplexMatrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = D[i] * X[i];
  n.value = std::move(out);
  n.requires_grad = needs(d) || needs(x);
  return push(std::move(n));
}

Tape::NodeId Tape::soft_threshold(NodeId x, NodeId eta) {
  const ComplexMatrix& t = nodes_[eta].value;
  if (t.rows() != 1 || t.cols() != 1)
    throw ShapeError("soft_threshold: threshold node must be 1x1");
  Node n;
  n.op = Op::kSoftThreshold;
  n.a = x;
  n.b = eta;
  n.value = complex_soft_threshold(nodes_[x].value, t[0].real());
  n.requires_grad = needs(x) || needs(eta);
  return push(std::move(n));
}

Tape::NodeId Tape::sigmoid_phase(NodeId x) {
  const ComplexMatrix& X = nodes_[x].value;
  Node n;
  n.op = Op::kSigmoidPhase;
  n.a = x;
  ComplexMatrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.size(); ++i)
    out[i] = cplx{stable_sigmoid_phase(X[i].real()), 0.0};
  n.value = std::move(out);
  n.requires_grad = needs(x);
  return push(std::move(n));
}

Tape::NodeId Tape::phase_weight(NodeId phi) {
  const ComplexMatrix& X = nodes_[phi].value;
  Node n;
  n.op = Op::kPhaseWeight;
  n.a = phi;
  ComplexMatrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.size(); ++i)
    out[i] = phase_to_weight(X[i].real());
  n.value = std::move(out);
  n.requires_grad = needs(phi);
  return push(std::move(n));
}

Tape::NodeId Tape::scatter_strips(NodeId q, std::size_t strips,
                                  std::size_t per_strip) {
  const ComplexMatrix& Q = nodes_[q].value;
  const std::size_t total = strips * per_strip;
  if (Q.cols() != 1 || Q.rows() != total)
    throw ShapeError("scatter_strips: need a (strips*per_strip) x 1 vector");
  Node n;
  n.op = Op::kScatterStrips;
  n.a = q;
  n.strips = strips;
  n.per_strip = per_strip;
  ComplexMatrix out(strips, total);
  for (std::size_t k = 0; k < total; ++k) out(k / per_strip, k) = Q[k];
  n.value = std::move(out);
  n.requires_grad = needs(q);
  return push(std::move(n));
}

Tape::NodeId Tape::norm2(NodeId x) {
  Node n;
  n.op = Op::kNorm2;
  n.a = x;
  n.value = ComplexMatrix(1, 1);
  n.value[0] = cplx{frobenius_norm(nodes_[x].value), 0.0};
  n.requires_grad = needs(x);
  return push(std::move(n));
}

const ComplexMatrix& Tape::grad(NodeId id) const {
  const Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    static const ComplexMatrix kEmpty(0, 0);
    return kEmpty;
  }
  return n.grad;
}

ComplexMatrix& Tape::ensure_grad(NodeId id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0)
    n.grad = ComplexMatrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(NodeId loss) {
  if (loss < 0 || static_cast<std::size_t>(loss) >= nodes_.size())
    throw ContractError("backward: invalid loss node");
  const Node& top = nodes_[loss];
  if (top.value.rows() != 1 || top.value.cols() != 1)
    throw ContractError("backward: loss must be a 1x1 node");
  if (!top.requires_grad) return;

  ensure_grad(loss)[0] = cplx{1.0, 0.0};

  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    const ComplexMatrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul: {
        const ComplexMatrix& A = nodes_[n.a].value;
        const ComplexMatrix& B = nodes_[n.b].value;
        if (needs(n.a)) {
          // dA[i,p] += sum_j g[i,j] * conj(B[p,j])
          ComplexMatrix& da = ensure_grad(n.a);
          for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t p = 0; p < A.cols(); ++p) {
              cplx acc{0.0, 0.0};
              for (std::size_t j = 0; j < B.cols(); ++j)
                acc += g(i, j) * std::conj(B(p, j));
              da(i, p) += acc;
            }
        }
        if (needs(n.b)) {
          // dB[p,j] += sum_i conj(A[i,p]) * g[i,j]
          ComplexMatrix& db = ensure_grad(n.b);
          for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t p = 0; p < A.cols(); ++p) {
              const cplx ap = std::conj(A(i, p));
              if (ap == cplx{0.0, 0.0}) continue;
              for (std::size_t j = 0; j < B.cols(); ++j)
                db(p, j) += ap * g(i, j);
            }
        }
        break;
      }
      case Op::kAdjoint: {
        if (needs(n.a)) {
          ComplexMatrix& da = ensure_grad(n.a);
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c)
              da(c, r) += std::conj(g(r, c));
        }
        break;
      }
      case Op::kAdd: {
        if (needs(n.a)) {
          ComplexMatrix& da = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (needs(n.b)) {
          ComplexMatrix& db = ensure_grad(n.b);
          for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        if (needs(n.a)) {
          ComplexMatrix& da = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (needs(n.b)) {
          ComplexMatrix& db = ensure_grad(n.b);
          for (std::size_t i = 0; i < g.size(); ++i) db[i] -= g[i];
        }
        break;
      }
      case Op::kScaleConst: {
        if (needs(n.a)) {
          ComplexMatrix& da = ensure_grad(n.a);
          const cplx cc = std::conj(n.payload);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += cc * g[i];
        }
        break;
      }
      case Op::kScaleByScalar: {
        const double s = nodes_[n.b].value[0].real();
        const ComplexMatrix& A = nodes_[n.a].value;
        if (needs(n.a)) {
          ComplexMatrix& da = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += s * g[i];
        }
        if (needs(n.b)) {
          double acc = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i)
            acc += (std::conj(A[i]) * g[i]).real();
          ensure_grad(n.b)[0] += cplx{acc, 0.0};
        }
        break;
      }
      case Op::kDiagScale: {
        const ComplexMatrix& D = nodes_[n.a].value;
        const ComplexMatrix& X = nodes_[n.b].value;
        if (needs(n.a)) {
          ComplexMatrix& dd = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i)
            dd[i] += std::conj(X[i]) * g[i];
        }
        if (needs(n.b)) {
          ComplexMatrix& dx = ensure_grad(n.b);
          for (std::size_t i = 0; i < g.size(); ++i)
            dx[i] += std::conj(D[i]) * g[i];
        }
        break;
      }
      case Op::kSoftThreshold: {
        const ComplexMatrix& X = nodes_[n.a].value;
        const double eta = nodes_[n.b].value[0].real();
        const bool wx = needs(n.a);
        const bool we = needs(n.b);
        ComplexMatrix* dx = wx ? &ensure_grad(n.a) : nullptr;
        double deta = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double r = std::abs(X[i]);
          if (r <= eta) continue;  // dead zone: output pinned at zero
          const cplx x = X[i];
          const double a = x.real();
          const double b = x.imag();
          const double r3 = r * r * r;
          if (wx) {
            // Column of the 2x2 real Jacobian wrt Re(x), then wrt Im(x).
            const cplx ya = cplx{1.0 - eta / r, 0.0} + x * (eta * a / r3);
            const cplx yb = cplx{0.0, 1.0 - eta / r} + x * (eta * b / r3);
            const double gr = (std::conj(ya) * g[i]).real();
            const double gi = (std::conj(yb) * g[i]).real();
            (*dx)[i] += cplx{gr, gi};
          }
          if (we) deta += (std::conj(-x / r) * g[i]).real();
        }
        if (we) ensure_grad(n.b)[0] += cplx{deta, 0.0};
        break;
      }
      case Op::kSigmoidPhase: {
        if (needs(n.a)) {
          constexpr double two_pi = 6.283185307179586476925286766559;
          ComplexMatrix& dx = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) {
            const double y = n.value[i].real();
            dx[i] += cplx{g[i].real() * y * (1.0 - y / two_pi), 0.0};
          }
        }
        break;
      }
      case Op::kPhaseWeight: {
        if (needs(n.a)) {
          const ComplexMatrix& X = nodes_[n.a].value;
          ComplexMatrix& dx = ensure_grad(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) {
            const cplx dq =
                cplx{0.0, 0.5} * std::exp(cplx{0.0, X[i].real()});
            dx[i] += cplx{(std::conj(dq) * g[i]).real(), 0.0};
          }
        }
        break;
      }
      case Op::kScatterStrips: {
        if (needs(n.a)) {
          ComplexMatrix& dq = ensure_grad(n.a);
          const std::size_t total = n.strips * n.per_strip;
          for (std::size_t k = 0; k < total; ++k)
            dq[k] += g(k / n.per_strip, k);
        }
        break;
      }
      case Op::kNorm2: {
        if (needs(n.a)) {
          const double nrm = n.value[0].real();
          if (nrm > 0.0) {
            const ComplexMatrix& X = nodes_[n.a].value;
            const double s = g[0].real() / nrm;
            ComplexMatrix& dx = ensure_grad(n.a);
            for (std::size_t i = 0; i < X.size(); ++i) dx[i] += s * X[i];
          }
        }
        break;
      }
    }
  }
}

void Tape::clear() {
  nodes_.clear();
  params_.clear();
}

}  // namespace dmace
