#include "dmace/dataset.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "dmace/errors.hpp"
#include "dmace/rng.hpp"

namespace dmace {

namespace {
constexpr std::uint32_t kDatasetVersion = 1;
constexpr std::uint32_t kMatrixVersion = 1;

void put_cfg(std::ostream& os, const DmaConfig& cfg) {
  io::put_u64(os, cfg.n_d);
  io::put_u64(os, cfg.n_e);
  io::put_f64(os, cfg.wavelength);
  io::put_f64(os, cfg.dx);
  io::put_f64(os, cfg.dy);
  io::put_f64(os, cfg.alpha);
  io::put_f64(os, cfg.beta);
}

DmaConfig get_cfg(std::istream& is) {
  DmaConfig cfg;
  cfg.n_d = io::get_u64(is);
  cfg.n_e = io::get_u64(is);
  cfg.wavelength = io::get_f64(is);
  cfg.dx = io::get_f64(is);
  cfg.dy = io::get_f64(is);
  cfg.alpha = io::get_f64(is);
  cfg.beta = io::get_f64(is);
  return cfg;
}

void put_vector(std::ostream& os, const ComplexVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    io::put_f64(os, v[i].real());
    io::put_f64(os, v[i].imag());
  }
}

ComplexVector get_vector(std::istream& is, std::size_t n) {
  ComplexVector v(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = io::get_f64(is);
    const double im = io::get_f64(is);
    v[i] = cplx{re, im};
  }
  return v;
}
}  // namespace

Dataset generate_dataset(std::size_t count, const SnrPolicy& snr,
                         const DmaConfig& cfg, const GridDictionary& dict,
                         std::uint64_t seed) {
  if (count < 1) throw DomainError("generate_dataset: count must be >= 1");
  cfg.validate();
  if (dict.size() == 0) throw DomainError("generate_dataset: empty grid");
  Dataset ds;
  ds.dma = cfg;
  ds.dict_size = dict.size();
  ds.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, "sample", i));
    ChannelSample& s = ds.samples[i];
    s.paths = sample_paths(cfg, rng);
    s.snr_db = snr.random ? rng.uniform(snr.lo, snr.hi) : snr.fixed;
    s.g_star = synthesize_channel(s.paths, cfg);
    PilotObservation obs = observe_pilot(s.g_star, s.snr_db, cfg, rng);
    s.y = std::move(obs.y);
    s.sigma = obs.sigma;
    s.alpha_star = nearest_grid_label(s.paths, dict);
  }
  // Physical path gains put the channel many decades below unity, while
  // shrinkage thresholds are initialized on an absolute scale. One scalar
  // per dataset brings the clean channels to unit average element power;
  // it multiplies g, y, labels and sigma together, so SNR, NMSE and lasso
  // solutions are unchanged.
  double clean_power = 0.0;
  for (const ChannelSample& s : ds.samples)
    clean_power += l2_norm(s.g_star) * l2_norm(s.g_star);
  if (clean_power <= 0.0)
    throw DomainError("generate_dataset: zero aggregate channel power");
  ds.scale = std::sqrt(static_cast<double>(count) *
                       static_cast<double>(cfg.elements()) / clean_power);
  for (ChannelSample& s : ds.samples) {
    s.g_star = scale(s.g_star, ds.scale);
    s.y = scale(s.y, ds.scale);
    s.alpha_star = scale(s.alpha_star, ds.scale);
    s.sigma *= ds.scale;
  }
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PersistenceError("write_dataset: cannot open " +
                                  path.string());
  os.write("DMAD", 4);
  io::put_u32(os, kDatasetVersion);
  io::put_u64(os, ds.dma.elements());
  io::put_u64(os, ds.dict_size);
  io::put_u64(os, ds.samples.size());
  put_cfg(os, ds.dma);
  io::put_f64(os, ds.scale);
  for (const ChannelSample& s : ds.samples) {
    io::put_f64(os, s.snr_db);
    io::put_f64(os, s.sigma);
    io::put_u64(os, s.paths.count());
    for (const Path& p : s.paths.paths) {
      io::put_f64(os, p.gain.real());
      io::put_f64(os, p.gain.imag());
      io::put_f64(os, p.theta);
      io::put_f64(os, p.phi);
      io::put_f64(os, p.distance);
    }
    put_vector(os, s.g_star);
    put_vector(os, s.y);
    put_vector(os, s.alpha_star);
  }
  if (!os) throw PersistenceError("write_dataset: write failed for " +
                                  path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PersistenceError("read_dataset: cannot open " +
                                  path.string());
  io::expect_magic(is, "DMAD", "read_dataset");
  const std::uint32_t version = io::get_u32(is);
  if (version != kDatasetVersion)
    throw PersistenceError("read_dataset: unsupported version");
  const std::uint64_t n = io::get_u64(is);
  const std::uint64_t d = io::get_u64(is);
  const std::uint64_t count = io::get_u64(is);
  Dataset ds;
  ds.dma = get_cfg(is);
  ds.scale = io::get_f64(is);
  ds.dict_size = d;
  if (ds.dma.elements() != n)
    throw PersistenceError("read_dataset: element count disagrees with cfg");
  if (count > (1ull << 32))
    throw PersistenceError("read_dataset: implausible sample count");
  ds.samples.resize(count);
  for (ChannelSample& s : ds.samples) {
    s.snr_db = io::get_f64(is);
    s.sigma = io::get_f64(is);
    const std::uint64_t lp = io::get_u64(is);
    if (lp > (1ull << 16))
      throw PersistenceError("read_dataset: implausible path count");
    s.paths.paths.resize(lp);
    for (Path& p : s.paths.paths) {
      const double re = io::get_f64(is);
      const double im = io::get_f64(is);
      p.gain = cplx{re, im};
      p.theta = io::get_f64(is);
      p.phi = io::get_f64(is);
      p.distance = io::get_f64(is);
    }
    s.g_star = get_vector(is, n);
    s.y = get_vector(is, n);
    s.alpha_star = get_vector(is, d);
  }
  return ds;
}

std::string dataset_to_json_string(const Dataset& ds,
                                   std::size_t max_samples) {
  nlohmann::json j;
  j["elements"] = ds.dma.elements();
  j["dict_size"] = ds.dict_size;
  j["count"] = ds.samples.size();
  j["scale"] = ds.scale;
  j["dma"] = {{"n_d", ds.dma.n_d},       {"n_e", ds.dma.n_e},
              {"wavelength", ds.dma.wavelength},
              {"dx", ds.dma.dx},         {"dy", ds.dma.dy},
              {"alpha", ds.dma.alpha},   {"beta", ds.dma.beta}};
  nlohmann::json samples = nlohmann::json::array();
  const std::size_t limit = std::min(max_samples, ds.samples.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const ChannelSample& s = ds.samples[i];
    nlohmann::json js;
    js["snr_db"] = s.snr_db;
    js["sigma"] = s.sigma;
    nlohmann::json paths = nlohmann::json::array();
    for (const Path& p : s.paths.paths)
      paths.push_back({{"gain_re", p.gain.real()},
                       {"gain_im", p.gain.imag()},
                       {"theta", p.theta},
                       {"phi", p.phi},
                       {"distance", p.distance}});
    js["paths"] = std::move(paths);
    auto vec_json = [](const ComplexVector& v) {
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t k = 0; k < v.size(); ++k)
        out.push_back({v[k].real(), v[k].imag()});
      return out;
    };
    js["g_star"] = vec_json(s.g_star);
    js["y"] = vec_json(s.y);
    js["alpha_star"] = vec_json(s.alpha_star);
    samples.push_back(std::move(js));
  }
  j["samples"] = std::move(samples);
  return j.dump(2);
}

void write_matrix_file(const std::filesystem::path& path,
                       const ComplexMatrix& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PersistenceError("write_matrix_file: cannot open " +
                                  path.string());
  os.write("DMAM", 4);
  io::put_u32(os, kMatrixVersion);
  io::put_cmatrix(os, m);
  if (!os) throw PersistenceError("write_matrix_file: write failed for " +
                                  path.string());
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PersistenceError("read_matrix_file: cannot open " +
                                  path.string());
  io::expect_magic(is, "DMAM", "read_matrix_file");
  const std::uint32_t version = io::get_u32(is);
  if (version != kMatrixVersion)
    throw PersistenceError("read_matrix_file: unsupported version");
  return io::get_cmatrix(is);
}

}  // namespace dmace
