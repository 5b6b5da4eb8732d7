#include <doctest.h>

#include <cmath>
#include <vector>

#include "dmace/adam.hpp"
#include "dmace/complex_matrix.hpp"
#include "dmace/rng.hpp"

using namespace dmace;

namespace {

// Direct transcription of the update rule, kept per real channel; used as
// the reference trajectory.
struct ScalarAdamRef {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double x, double g, const Adam::Options& o) {
    ++t;
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g * g;
    const double mh = m / (1.0 - std::pow(o.beta1, t));
    const double vh = v / (1.0 - std::pow(o.beta2, t));
    return x - o.lr * mh / (std::sqrt(vh) + o.eps);
  }
};

}  // namespace

TEST_CASE("first update moves by almost exactly the learning rate") {
  Adam::Options opt;
  opt.lr = 0.01;
  Adam adam(opt);
  ComplexMatrix p(1, 1);
  p[0] = cplx(1.0, -2.0);
  ComplexMatrix g(1, 1);
  g[0] = cplx(3.0, -0.5);
  adam.step({&p}, {&g});
  // Bias-corrected first step is lr * g / (|g| + eps) per channel.
  CHECK(p[0].real() == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(p[0].imag() == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
  CHECK(adam.iterations() == 1);
}

TEST_CASE("trajectory matches the reference recursion per channel") {
  Adam::Options opt;
  opt.lr = 0.05;
  Adam adam(opt);
  ComplexMatrix p(2, 1);
  p[0] = cplx(0.3, -0.7);
  p[1] = cplx(-1.1, 0.2);
  std::vector<ScalarAdamRef> ref(4);
  double xs[4] = {0.3, -0.7, -1.1, 0.2};
  Rng rng(33);
  for (int step = 0; step < 25; ++step) {
    ComplexMatrix g(2, 1);
    g[0] = cplx(rng.gaussian(), rng.gaussian());
    g[1] = cplx(rng.gaussian(), rng.gaussian());
    const double gs[4] = {g[0].real(), g[0].imag(), g[1].real(), g[1].imag()};
    for (int k = 0; k < 4; ++k) xs[k] = ref[k].step(xs[k], gs[k], opt);
    adam.step({&p}, {&g});
    CHECK(p[0].real() == doctest::Approx(xs[0]).epsilon(1e-12));
    CHECK(p[0].imag() == doctest::Approx(xs[1]).epsilon(1e-12));
    CHECK(p[1].real() == doctest::Approx(xs[2]).epsilon(1e-12));
    CHECK(p[1].imag() == doctest::Approx(xs[3]).epsilon(1e-12));
  }
}

TEST_CASE("independent second moments per channel") {
  // A gradient with a large real part must not shrink the imaginary step.
  Adam::Options opt;
  opt.lr = 0.1;
  Adam adam(opt);
  ComplexMatrix p(1, 1);
  ComplexMatrix g(1, 1);
  g[0] = cplx(1000.0, 0.001);
  adam.step({&p}, {&g});
  CHECK(p[0].real() == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(p[0].imag() == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("multiple parameters keep separate state") {
  Adam adam;
  ComplexMatrix a(1, 1), b(2, 1);
  ComplexMatrix ga(1, 1), gb(2, 1);
  ga[0] = cplx(1.0, 0.0);
  gb[0] = cplx(0.0, -1.0);
  gb[1] = cplx(2.0, 2.0);
  adam.step({&a, &b}, {&ga, &gb});
  const double lr = adam.options().lr;
  CHECK(a[0].real() == doctest::Approx(-lr).epsilon(1e-6));
  CHECK(b[0].imag() == doctest::Approx(lr).epsilon(1e-6));
  CHECK(b[1].real() == doctest::Approx(-lr).epsilon(1e-6));
  // Zero-gradient channels stay put.
  CHECK(a[0].imag() == 0.0);
  CHECK(b[0].real() == 0.0);
}

TEST_CASE("descends a simple quadratic") {
  // f(x) = |x - c|^2 over one complex entry; gradient 2(x - c).
  Adam::Options opt;
  opt.lr = 0.05;
  Adam adam(opt);
  ComplexMatrix x(1, 1);
  const cplx c(0.5, -0.25);
  for (int i = 0; i < 400; ++i) {
    ComplexMatrix g(1, 1);
    g[0] = 2.0 * (x[0] - c);
    adam.step({&x}, {&g});
  }
  CHECK(std::abs(x[0] - c) < 1e-2);
}
