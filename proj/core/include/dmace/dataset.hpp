#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmace/channel.hpp"
#include "dmace/complex_matrix.hpp"
#include "dmace/dictionary.hpp"
#include "dmace/dma.hpp"

namespace dmace {

struct ChannelSample {
  PathSet paths;
  ComplexVector g_star{0, 1};      // clean channel, length N
  ComplexVector y{0, 1};           // noisy element observation, length N
  ComplexVector alpha_star{0, 1};  // nearest-grid sparse label, length D
  double sigma = 0.0;
  double snr_db = 0.0;
};

struct Dataset {
  DmaConfig dma;
  std::size_t dict_size = 0;
  // Dataset-wide amplitude factor applied to g_star, y, alpha_star and
  // sigma so clean channels have unit average element power. Dividing the
  // stored vectors by it recovers raw physical amplitudes.
  double scale = 1.0;
  std::vector<ChannelSample> samples;
  std::size_t count() const { return samples.size(); }
};

struct SnrPolicy {
  bool random = true;
  double lo = 0.0;
  double hi = 21.0;
  double fixed = 12.0;
  static SnrPolicy uniform(double lo, double hi) {
    return SnrPolicy{true, lo, hi, 0.0};
  }
  static SnrPolicy at(double snr) { return SnrPolicy{false, 0.0, 0.0, snr}; }
};

// Sample i is generated from its own rng stream derived from (seed, i), so
// the result is independent of generation order or parallelism.
Dataset generate_dataset(std::size_t count, const SnrPolicy& snr,
                         const DmaConfig& cfg, const GridDictionary& dict,
                         std::uint64_t seed);

void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

// Human-inspectable JSON rendering of the header and first max_samples
// records.
std::string dataset_to_json_string(const Dataset& ds, std::size_t max_samples);

// Standalone matrix container sharing the dataset encoding (used for
// dictionary export and checkpoint tensors).
void write_matrix_file(const std::filesystem::path& path,
                       const ComplexMatrix& m);
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

}  // namespace dmace
