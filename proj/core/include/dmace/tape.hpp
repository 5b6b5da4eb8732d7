#pragma once
#include <cstdint>
#include <vector>

#include "dmace/complex_matrix.hpp"

namespace dmace {

// Reverse-mode differentiation over a fixed primitive set. Values are complex
// matrices; losses are real scalars. Gradients follow the real-composite
// convention: grad(x) = dL/dRe(x) + j * dL/dIm(x) for every entry x.
//
// A tape is single threaded: build one forward pass, call backward() once,
// read parameter gradients, then clear() to reuse the storage.
class Tape {
 public:
  using NodeId = std::int32_t;

  enum class Op : std::uint8_t {
    kLeaf,           // constant or parameter
    kMatmul,         // A * B
    kAdjoint,        // A^H
    kAdd,            // A + B
    kSub,            // A - B
    kScaleConst,     // c * A, complex constant c
    kScaleByScalar,  // s * A, s a real 1x1 node
    kDiagScale,      // d .* x, elementwise, d and x same shape
    kSoftThreshold,  // phase-preserving shrinkage, threshold = real 1x1 node
    kSigmoidPhase,   // 2*pi / (1 + exp(-Re x)), elementwise real
    kPhaseWeight,    // (j + exp(j * Re x)) / 2, elementwise
    kScatterStrips,  // N-vector -> strips x N block-diagonal-by-strip layout
    kNorm2,          // ||x||_2 -> real 1x1
  };

  NodeId constant(ComplexMatrix value);
  NodeId parameter(ComplexMatrix value);

  NodeId matmul(NodeId a, NodeId b);
  NodeId adjoint_of(NodeId a);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId scale_const(NodeId a, cplx c);
  NodeId scale_by(NodeId scalar, NodeId a);
  NodeId diag_scale(NodeId d, NodeId x);
  NodeId soft_threshold(NodeId x, NodeId eta);
  NodeId sigmoid_phase(NodeId x);
  NodeId phase_weight(NodeId phi);
  NodeId scatter_strips(NodeId q, std::size_t strips, std::size_t per_strip);
  NodeId norm2(NodeId x);

  const ComplexMatrix& value(NodeId id) const { return nodes_[id].value; }
  // Valid after backward(); zero matrix for untouched nodes.
  const ComplexMatrix& grad(NodeId id) const;

  // Accumulates dL/d(parameter) for every trainable leaf reachable from the
  // loss node. The loss must be 1x1 with (numerically) real value.
  void backward(NodeId loss);

  const std::vector<NodeId>& parameters() const { return params_; }
  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Op op = Op::kLeaf;
    NodeId a = -1;
    NodeId b = -1;
    cplx payload{0.0, 0.0};
    std::size_t strips = 0;
    std::size_t per_strip = 0;
    bool requires_grad = false;
    ComplexMatrix value;
    ComplexMatrix grad;
  };

  NodeId push(Node n);
  ComplexMatrix& ensure_grad(NodeId id);
  bool needs(NodeId id) const { return id >= 0 && nodes_[id].requires_grad; }

  std::vector<Node> nodes_;
  std::vector<NodeId> params_;
};

}  // namespace dmace
