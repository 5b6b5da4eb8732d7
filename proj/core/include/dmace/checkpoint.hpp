#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dmace/complex_matrix.hpp"
#include "dmace/nets.hpp"

namespace dmace {

struct CheckpointMeta {
  std::string arch;  // "lista" | "lista-smo"
  std::size_t layers = 0;
  std::size_t n_d = 0;
  std::size_t n_e = 0;
  std::size_t dict_size = 0;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  std::vector<std::pair<std::string, ComplexMatrix>> tensors;
  const ComplexMatrix& tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const ListaParams& p, CheckpointMeta meta);
Checkpoint make_checkpoint(const ListaSmoParams& p, CheckpointMeta meta);
ListaParams lista_from_checkpoint(const Checkpoint& ck);
ListaSmoParams lista_smo_from_checkpoint(const Checkpoint& ck);

}  // namespace dmace
