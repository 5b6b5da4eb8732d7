#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "dmace/dataset.hpp"
#include "dmace/errors.hpp"

using namespace dmace;
namespace fs = std::filesystem;

namespace {

DmaConfig tiny_cfg() {
  DmaConfig cfg;
  cfg.n_d = 2;
  cfg.n_e = 2;
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dmace-test-" +
            std::to_string(std::chrono::steady_clock::now()
                               .time_since_epoch()
                               .count()) +
            "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("generated samples are complete and unit-power on average") {
  const DmaConfig cfg = tiny_cfg();
  const GridDictionary dict = build_grid_dictionary(3, 3, cfg);
  const Dataset ds = generate_dataset(64, SnrPolicy::uniform(0, 18), cfg, dict, 7);
  REQUIRE(ds.count() == 64);
  CHECK(ds.dict_size == 9);
  CHECK(ds.scale > 0.0);
  double power = 0.0;
  for (const ChannelSample& s : ds.samples) {
    REQUIRE(s.g_star.rows() == 4);
    REQUIRE(s.y.rows() == 4);
    REQUIRE(s.alpha_star.rows() == 9);
    CHECK(s.sigma > 0.0);
    CHECK(s.snr_db >= 0.0);
    CHECK(s.snr_db < 18.0);
    CHECK(s.paths.count() >= 2);
    CHECK(s.paths.count() <= 6);
    power += l2_norm(s.g_star) * l2_norm(s.g_star);
    // The rescale keeps the per-sample snr relation intact.
    const double n = 4.0;
    const double expect_sigma2 = l2_norm(s.g_star) * l2_norm(s.g_star) /
                                 (n * std::pow(10.0, s.snr_db / 10.0));
    CHECK(s.sigma * s.sigma == doctest::Approx(expect_sigma2).epsilon(1e-9));
  }
  // Mean per-element power of the clean channels is exactly one.
  CHECK(power / (64.0 * 4.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed-snr policy pins every sample") {
  const DmaConfig cfg = tiny_cfg();
  const GridDictionary dict = build_grid_dictionary(3, 3, cfg);
  const Dataset ds = generate_dataset(16, SnrPolicy::at(6.0), cfg, dict, 8);
  for (const ChannelSample& s : ds.samples) CHECK(s.snr_db == 6.0);
}

TEST_CASE("generation is a pure function of the seed") {
  const DmaConfig cfg = tiny_cfg();
  const GridDictionary dict = build_grid_dictionary(3, 3, cfg);
  const Dataset a = generate_dataset(8, SnrPolicy::uniform(0, 12), cfg, dict, 42);
  const Dataset b = generate_dataset(8, SnrPolicy::uniform(0, 12), cfg, dict, 42);
  const Dataset c = generate_dataset(8, SnrPolicy::uniform(0, 12), cfg, dict, 43);
  CHECK(a.scale == b.scale);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(a.samples[i].y[j] == b.samples[i].y[j]);
      CHECK(a.samples[i].g_star[j] == b.samples[i].g_star[j]);
    }
  bool differs = false;
  for (std::size_t j = 0; j < 4; ++j)
    if (a.samples[0].y[j] != c.samples[0].y[j]) differs = true;
  CHECK(differs);
}

TEST_CASE("file round trip is lossless and byte-stable") {
  const DmaConfig cfg = tiny_cfg();
  const GridDictionary dict = build_grid_dictionary(3, 3, cfg);
  const Dataset ds = generate_dataset(12, SnrPolicy::uniform(0, 18), cfg, dict, 5);
  TempDir tmp;
  const fs::path f1 = tmp.path / "a.bin";
  const fs::path f2 = tmp.path / "b.bin";
  write_dataset(f1, ds);
  const Dataset rt = read_dataset(f1);
  REQUIRE(rt.count() == ds.count());
  CHECK(rt.scale == ds.scale);
  CHECK(rt.dict_size == ds.dict_size);
  CHECK(rt.dma.n_d == ds.dma.n_d);
  for (std::size_t i = 0; i < ds.count(); ++i) {
    const ChannelSample& x = ds.samples[i];
    const ChannelSample& y = rt.samples[i];
    CHECK(x.sigma == y.sigma);
    CHECK(x.snr_db == y.snr_db);
    for (std::size_t j = 0; j < x.g_star.size(); ++j) {
      CHECK(x.g_star[j] == y.g_star[j]);
      CHECK(x.y[j] == y.y[j]);
    }
    for (std::size_t j = 0; j < x.alpha_star.size(); ++j)
      CHECK(x.alpha_star[j] == y.alpha_star[j]);
  }
  // Rewriting the reread dataset reproduces the file byte for byte.
  write_dataset(f2, rt);
  CHECK(slurp(f1) == slurp(f2));
  // Header starts with the format magic.
  const std::string bytes = slurp(f1);
  REQUIRE(bytes.size() > 8);
  CHECK(bytes.substr(0, 4) == "DMAD");
}

TEST_CASE("corrupt files are rejected") {
  TempDir tmp;
  const fs::path f = tmp.path / "bad.bin";
  std::ofstream(f, std::ios::binary) << "XXXX not a dataset";
  CHECK_THROWS_AS(read_dataset(f), PersistenceError);
  CHECK_THROWS_AS(read_dataset(tmp.path / "missing.bin"), PersistenceError);
}

TEST_CASE("json preview carries the header and first records") {
  const DmaConfig cfg = tiny_cfg();
  const GridDictionary dict = build_grid_dictionary(3, 3, cfg);
  const Dataset ds = generate_dataset(6, SnrPolicy::at(12.0), cfg, dict, 9);
  const auto j = nlohmann::json::parse(dataset_to_json_string(ds, 2));
  CHECK(j["count"] == 6);
  CHECK(j["dict_size"] == 9);
  CHECK(j["scale"].get<double>() == ds.scale);
  REQUIRE(j["samples"].size() == 2);
  CHECK(j["samples"][0]["snr_db"] == 12.0);
}

TEST_CASE("matrix files round trip") {
  TempDir tmp;
  ComplexMatrix m(3, 2);
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = cplx(0.5 * double(i), -1.0 / (double(i) + 1.0));
  const fs::path f = tmp.path / "m.bin";
  write_matrix_file(f, m);
  const ComplexMatrix r = read_matrix_file(f);
  REQUIRE(r.rows() == 3);
  REQUIRE(r.cols() == 2);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == r[i]);
}
