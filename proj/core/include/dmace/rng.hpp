#pragma once
#include <cstdint>
#include <random>
#include <string_view>

namespace dmace {

// Deterministic stream derivation: hash a parent seed together with a role
// tag (and optional indices) so that every consumer of randomness owns an
// independent stream that is a pure function of (master seed, role).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view role);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view role, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view role, std::uint64_t i,
                          std::uint64_t j);

// mt19937_64 engine with hand-rolled output mappings. The standard pins the
// engine sequence but not the distributions, so uniform/gaussian are mapped
// explicitly here to keep streams byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on {lo, ..., hi} inclusive, via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal (Box-Muller, spare cached).
  double gaussian();

  std::uint64_t seed() const { return seed_; }
  Rng derived(std::string_view role) const { return Rng(derive_seed(seed_, role)); }
  Rng derived(std::string_view role, std::uint64_t index) const {
    return Rng(derive_seed(seed_, role, index));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dmace
