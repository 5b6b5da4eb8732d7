#include "dmace/checkpoint.hpp"

#include "binary_io.hpp"
#include "dmace/errors.hpp"

namespace dmace {

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;

void require(bool ok, const char* msg) {
  if (!ok) throw PersistenceError(msg);
}
}  // namespace

const ComplexMatrix& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return m;
  throw PersistenceError("checkpoint: missing tensor " + name);
}

bool Checkpoint::has_tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return true;
  return false;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw PersistenceError("save_checkpoint: cannot open " + path.string());
  os.write("DMAC", 4);
  io::put_u32(os, kCheckpointVersion);
  io::put_string(os, ck.meta.arch);
  io::put_u64(os, ck.meta.layers);
  io::put_u64(os, ck.meta.n_d);
  io::put_u64(os, ck.meta.n_e);
  io::put_u64(os, ck.meta.dict_size);
  io::put_u64(os, ck.meta.seed);
  io::put_u64(os, ck.tensors.size());
  for (const auto& [name, m] : ck.tensors) {
    io::put_string(os, name);
    io::put_cmatrix(os, m);
  }
  if (!os)
    throw PersistenceError("save_checkpoint: write failed for " +
                           path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw PersistenceError("load_checkpoint: cannot open " + path.string());
  io::expect_magic(is, "DMAC", "load_checkpoint");
  const std::uint32_t version = io::get_u32(is);
  if (version != kCheckpointVersion)
    throw PersistenceError("load_checkpoint: unsupported version");
  Checkpoint ck;
  ck.meta.arch = io::get_string(is);
  ck.meta.layers = io::get_u64(is);
  ck.meta.n_d = io::get_u64(is);
  ck.meta.n_e = io::get_u64(is);
  ck.meta.dict_size = io::get_u64(is);
  ck.meta.seed = io::get_u64(is);
  const std::uint64_t count = io::get_u64(is);
  if (count > 64) throw PersistenceError("load_checkpoint: too many tensors");
  ck.tensors.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = io::get_string(is);
    ComplexMatrix m = io::get_cmatrix(is);
    ck.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ck;
}

Checkpoint make_checkpoint(const ListaParams& p, CheckpointMeta meta) {
  meta.arch = "lista";
  meta.layers = p.layers();
  Checkpoint ck;
  ck.meta = std::move(meta);
  ck.tensors.emplace_back("w_a", p.w_a);
  ck.tensors.emplace_back("w_b", p.w_b);
  ck.tensors.emplace_back("eta", p.eta);
  return ck;
}

Checkpoint make_checkpoint(const ListaSmoParams& p, CheckpointMeta meta) {
  meta.arch = "lista-smo";
  meta.layers = p.layers();
  Checkpoint ck;
  ck.meta = std::move(meta);
  ck.tensors.emplace_back("w_phi", p.w_phi);
  ck.tensors.emplace_back("w_a", p.w_a);
  ck.tensors.emplace_back("w_smo", p.w_smo);
  ck.tensors.emplace_back("eta", p.eta);
  ck.tensors.emplace_back("kappa", p.kappa);
  return ck;
}

ListaParams lista_from_checkpoint(const Checkpoint& ck) {
  require(ck.meta.arch == "lista",
          "checkpoint: architecture tag is not lista");
  ListaParams p;
  p.w_a = ck.tensor("w_a");
  p.w_b = ck.tensor("w_b");
  p.eta = ck.tensor("eta");
  require(p.eta.rows() == ck.meta.layers,
          "checkpoint: layer count disagrees with eta length");
  return p;
}

ListaSmoParams lista_smo_from_checkpoint(const Checkpoint& ck) {
  require(ck.meta.arch == "lista-smo",
          "checkpoint: architecture tag is not lista-smo");
  ListaSmoParams p;
  p.w_phi = ck.tensor("w_phi");
  p.w_a = ck.tensor("w_a");
  p.w_smo = ck.tensor("w_smo");
  p.eta = ck.tensor("eta");
  p.kappa = ck.tensor("kappa");
  require(p.eta.rows() == ck.meta.layers,
          "checkpoint: layer count disagrees with eta length");
  require(p.w_phi.rows() == ck.meta.n_d * ck.meta.n_e,
          "checkpoint: pre-phase length disagrees with geometry");
  return p;
}

}  // namespace dmace
