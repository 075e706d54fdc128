// End-to-end checks of the command-line driver; the binary path arrives in
// the HARDI_CLI environment variable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hardi/experiment.hpp"
#include "hardi/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("HARDI_CLI");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("gen-phantom writes the four outputs and calibrates the noise") {
  TempDir tmp("hardi_cli_gen");
  const std::string out = (tmp.path / "data").string();
  REQUIRE(run("gen-phantom --name phantom1 --b 3000 --K 16 --snr 18 --seed 1 --out-dir " +
              out) == 0);
  for (const char* f : {"clean.fld", "noisy.fld", "directions.csv", "truth.json"}) {
    CHECK(fs::exists(fs::path(out) / f));
    CHECK(fs::exists(fs::path(out) / (std::string(f) + ".meta.json")));
  }
  const auto clean = hardi::read_field(fs::path(out) / "clean.fld");
  const auto noisy = hardi::read_field(fs::path(out) / "noisy.fld");
  CHECK(clean.dims().nx == 12);
  CHECK(clean.channels() == 16);
  CHECK(std::abs(hardi::measure_snr(clean, noisy) - 18.0) <= 0.5);
}

TEST_CASE("gen-phantom with snr=inf leaves the field clean; phantom2 dims are 16x16") {
  TempDir tmp("hardi_cli_inf");
  const std::string out = (tmp.path / "data").string();
  REQUIRE(run("gen-phantom --name phantom2 --b 1000 --K 12 --snr inf --seed 3 --out-dir " +
              out) == 0);
  const auto clean = hardi::read_field(fs::path(out) / "clean.fld");
  const auto noisy = hardi::read_field(fs::path(out) / "noisy.fld");
  CHECK(clean.dims().nx == 16);
  CHECK(clean.dims().ny == 16);
  CHECK(clean.data() == noisy.data());
}

TEST_CASE("gen-phantom rejects unknown names") {
  TempDir tmp("hardi_cli_bad");
  CHECK(run("gen-phantom --name phantom9 --out-dir " + (tmp.path / "x").string()) != 0);
}

TEST_CASE("build-dict reports the published atom counts") {
  TempDir tmp("hardi_cli_dict");
  const std::string out = (tmp.path / "data").string();
  REQUIRE(run("gen-phantom --name phantom1 --b 3000 --K 16 --snr inf --seed 1 --out-dir " +
              out) == 0);
  const std::string dirs = out + "/directions.csv";
  REQUIRE(run("build-dict --kind rdg --directions " + dirs + " --out " + out +
              "/A_rdg.bin --csv") == 0);
  const auto a = hardi::read_sensing_matrix(fs::path(out) / "A_rdg.bin");
  CHECK(a.rows() == 16);
  CHECK(a.cols() == 234);
  CHECK(a.kind == hardi::DictionaryKind::Ridgelet);
  CHECK(fs::exists(fs::path(out) / "A_rdg.csv"));

  REQUIRE(run("build-dict --kind sh8 --directions " + dirs + " --out " + out +
              "/A_sh8.bin") == 0);
  CHECK(hardi::read_sensing_matrix(fs::path(out) / "A_sh8.bin").cols() == 45);
  REQUIRE(run("build-dict --kind gss --b 3000 --directions " + dirs + " --out " + out +
              "/A_gss.bin") == 0);
  CHECK(hardi::read_sensing_matrix(fs::path(out) / "A_gss.bin").cols() == 253);
}

TEST_CASE("reconstruct + evaluate round trip, cs equals tv with mu=0") {
  TempDir tmp("hardi_cli_recon");
  const std::string out = (tmp.path / "data").string();
  REQUIRE(run("gen-phantom --name phantom1 --b 3000 --K 16 --snr 18 --seed 2 --out-dir " +
              out) == 0);

  const std::string common = " --signal " + out + "/noisy.fld --directions " + out +
                             "/directions.csv --dict rdg --b 3000 ";
  REQUIRE(run("reconstruct" + common + "--mode cs --out-dir " + out + "/cs") == 0);
  REQUIRE(run("reconstruct" + common + "--mode tv --mu 0 --out-dir " + out + "/tv0") == 0);

  for (const char* f : {"coeffs.fld", "recon642.fld", "odf.fld", "modes.json", "trace.csv"}) {
    CHECK(fs::exists(fs::path(out) / "cs" / f));
  }

  const auto r_cs = hardi::read_field(fs::path(out) / "cs" / "recon642.fld");
  const auto r_tv = hardi::read_field(fs::path(out) / "tv0" / "recon642.fld");
  REQUIRE(r_cs.channels() == 642);
  CHECK(hardi::nmse(r_cs, r_tv) <= 1e-3);

  REQUIRE(run("evaluate --truth " + out + "/truth.json --recon-dir " + out +
              "/cs --out " + out + "/metrics_cs") == 0);
  CHECK(fs::exists(fs::path(out) / "metrics_cs.csv"));
  const std::string csv = slurp(fs::path(out) / "metrics_cs.csv");
  CHECK(csv.find("phantom1") != std::string::npos);
  CHECK(csv.find("rdg") != std::string::npos);

  // deterministic reruns produce identical coefficient files
  REQUIRE(run("reconstruct" + common + "--mode cs --out-dir " + out + "/cs2") == 0);
  CHECK(slurp(fs::path(out) / "cs" / "coeffs.fld") ==
        slurp(fs::path(out) / "cs2" / "coeffs.fld"));
}

TEST_CASE("evaluate fails loudly on a missing file") {
  TempDir tmp("hardi_cli_missing");
  CHECK(run("evaluate --truth " + (tmp.path / "nope.json").string() + " --recon-dir " +
            tmp.path.string() + " --out " + (tmp.path / "m").string()) != 0);
}

TEST_CASE("sweep runs the grid, reruns byte-identically across thread counts") {
  TempDir tmp("hardi_cli_sweep");
  const fs::path config_path = tmp.path / "config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({
      "phantoms": ["phantom1"],
      "b_values": [3000],
      "K": [16],
      "snr_db": [18, "inf"],
      "dicts": ["rdg"],
      "modes": ["cs", "tv"],
      "seeds": [1, 2],
      "params": {"max_bregman_iters": 4, "inner_fista_iters": 80}
    })";
  }
  const std::string cfg = config_path.string();
  REQUIRE(run("--threads 2 sweep --config " + cfg + " --out-dir " + (tmp.path / "a").string()) ==
          0);
  REQUIRE(run("--threads 1 sweep --config " + cfg + " --out-dir " + (tmp.path / "b").string()) ==
          0);

  const std::string res_a = slurp(tmp.path / "a" / "results.csv");
  const std::string res_b = slurp(tmp.path / "b" / "results.csv");
  CHECK(res_a == res_b);
  CHECK(slurp(tmp.path / "a" / "results_agg.csv") == slurp(tmp.path / "b" / "results_agg.csv"));

  // 1 phantom x 1 b x 1 K x 2 snr x 1 dict x 2 modes x 2 seeds = 8 rows + header
  int lines = 0;
  for (char ch : res_a) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == 9);
  CHECK(fs::exists(tmp.path / "a" / "config.resolved.json"));
}

TEST_CASE("sweep rejects an empty K axis") {
  TempDir tmp("hardi_cli_sweep_bad");
  const fs::path config_path = tmp.path / "config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({"phantoms":["phantom1"],"b_values":[3000],"K":[],
               "snr_db":[18],"dicts":["rdg"],"modes":["cs"],"seeds":[1]})";
  }
  CHECK(run("sweep --config " + config_path.string() + " --out-dir " +
            (tmp.path / "x").string()) != 0);
}
