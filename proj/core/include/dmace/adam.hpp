#pragma once
#include <cstddef>
#include <vector>

#include "dmace/complex_matrix.hpp"

namespace dmace {

// Adam over complex matrices, treating real and imaginary parts as
// independent real channels (separate second moments for each).
class Adam {
 public:
  struct Options {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  explicit Adam(const Options& opt) : opt_(opt) {}

  // Applies one update in place. The parameter list must keep the same
  // order and shapes across calls; state is lazily created on first use.
  void step(const std::vector<ComplexMatrix*>& params,
            const std::vector<const ComplexMatrix*>& grads);

  std::size_t iterations() const { return t_; }
  const Options& options() const { return opt_; }

 private:
  Options opt_{};
  std::size_t t_ = 0;
  std::vector<ComplexMatrix> m_;
  std::vector<ComplexMatrix> v_;
};

}  // namespace dmace
