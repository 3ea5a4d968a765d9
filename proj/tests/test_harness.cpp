#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mcf/harness.hpp"

using namespace mcf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "harness-scratch" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config("scenario = spectrum\nn = 2\nk = 1\n");
  CHECK(cfg.scenario == "spectrum-validate");
  CHECK(cfg.n == 2);
  CHECK(cfg.k == 1);
  CHECK(cfg.tau0 == 25.0);
  CHECK(cfg.horizon == 200.0);

  const auto full = parse_config(
      "# nondegenerate run\n"
      "scenario = nondegenerate-rmcf\n"
      "n = 3   # ambient\n"
      "k = 1\n"
      "\n"
      "grid-points = 300\n"
      "tau0 = 30\n"
      "horizon = 80\n"
      "dt = 0.005\n"
      "boundary = neumann\n"
      "seed = 99\n"
      "out_dir = somewhere\n");
  CHECK(full.grid_points == 300);
  CHECK(full.tau0 == 30.0);
  CHECK(full.dt == 0.005);
  CHECK(full.boundary == BoundaryMode::Neumann);
  CHECK(full.seed == 99u);
  CHECK(full.out_dir == fs::path("somewhere"));

  // the scenario may come from the command line
  CHECK(parse_config("n = 2\nk = 1\n").scenario.empty());
}

TEST_CASE("config errors name the field or the line") {
  CHECK(error_of("scenario = spectrum\nk = 1\n").find("n:") == 0);
  CHECK(error_of("scenario = spectrum\nn = 3\nk = 5\n").find("k:") == 0);
  CHECK(error_of("scenario = spectrum\nn = 2\nk = 1\ncolour = red\n").find("line 4") == 0);
  CHECK(error_of("scenario = spectrum\nn two\n").find("line 2") == 0);
  CHECK(error_of("scenario = spectrum\nn = 2.5\nk = 1\n").find("line 2") == 0);
  CHECK(error_of("scenario = warp\nn = 2\nk = 1\n").find("scenario:") == 0);
  CHECK(error_of("scenario = spectrum\nn = 2\nk = 1\ntau0 = -1\n").find("tau0:") == 0);
  CHECK(error_of("scenario = spectrum\nn = 2\nk = 1\nboundary = open\n").find("line 4") == 0);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("scenario registry") {
  CHECK(scenario_names().size() == 10);
  CHECK(canonical_scenario("spectrum") == "spectrum-validate");
  CHECK(canonical_scenario("bowl-ode") == "bowl-ode");
}

TEST_CASE("csv format") {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  write_csv(dir / "a.csv", {"x", "y"}, {{0.1, 1.0 / 3.0}, {-2.0, 1e-300}});
  CHECK(slurp(dir / "a.csv") == "x,y\n0.10000000000000001,0.33333333333333331\n-2,1e-300\n");
  CHECK_THROWS_AS(write_csv(dir / "missing" / "b.csv", {"x"}, {}), std::runtime_error);

  FlowTrace t;
  t.samples.push_back(TraceSample{0.5, 1.0, 0.0});
  write_trace(t, dir / "trace.csv");
  CHECK(slurp(dir / "trace.csv").rfind("t_or_tau,min_v,d,H_min,alpha\n0.5,1,nan,nan,nan\n", 0) == 0);

  DecaySeries s{{0.0, 1.0}, {0.2, 0.1}, std::nullopt, {}};
  write_series(s, {}, dir / "series.csv");
  std::istringstream in(slurp(dir / "series.csv"));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "tau,d,N,R,d_R,N_R");
  CHECK(row.rfind("0,0.20000000000000001,0.69314718055994", 0) == 0);

  write_eigen_table(enumerate_spectrum(make_cylinder(2, 1), 0.0), dir / "eig.csv");
  CHECK(slurp(dir / "eig.csv").rfind("i,j,eigenvalue,multiplicity\n0,0,-1,1\n", 0) == 0);
}

TEST_CASE("sha256") {
  const fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::ofstream(dir / "empty", std::ios::binary).close();
  CHECK(sha256_file(dir / "empty") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest lists every written file with its checksum") {
  RunConfig cfg;
  cfg.scenario = "spectrum-validate";
  cfg.n = 2;
  cfg.k = 1;
  cfg.out_dir = scratch("manifest");
  const auto m = run_scenario(cfg);
  CHECK(m.passed());
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(cfg.out_dir)) on_disk += e.path().filename() != "manifest.json";
  CHECK(m.files.size() == on_disk);
  for (const auto& f : m.files) {
    CHECK(f.sha256 == sha256_file(cfg.out_dir / f.path));
    CHECK(f.bytes == fs::file_size(cfg.out_dir / f.path));
  }
  const auto j = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
  CHECK(j["config"]["scenario"] == "spectrum-validate");
  CHECK(j["passed"] == true);
  CHECK(j["files"].size() == m.files.size());
  CHECK(j["checks"][0]["name"] == "spectrum");
  CHECK(j.contains("version"));
  CHECK(j.contains("wall_seconds"));

  // the eigenvalue table carries the three lowest levels
  const std::string table = slurp(cfg.out_dir / "eigen_table.csv");
  CHECK(table.find("\n0,0,-1,1\n") != std::string::npos);
  CHECK(table.find(",-0.5,") != std::string::npos);
  CHECK(table.find(",0,3\n") != std::string::npos);
}

TEST_CASE("surgery table scenario") {
  RunConfig cfg;
  cfg.scenario = "surgery-table";
  cfg.n = 2;
  cfg.k = 1;
  cfg.out_dir = scratch("surgery");
  const auto m = run_scenario(cfg);
  CHECK(m.passed());
  const std::string table = slurp(cfg.out_dir / "surgery.csv");
  CHECK(table.rfind("n,k,delta_chi,oracle\n2,1,2,2\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 21);
}

TEST_CASE("repeated runs give byte-identical CSVs") {
  for (const char* name : {"jacobi-decay", "monotonicity-sweep"}) {
    RunConfig cfg;
    cfg.scenario = name;
    cfg.n = 2;
    cfg.k = 1;
    cfg.out_dir = scratch(std::string(name) + "-a");
    const auto a = run_scenario(cfg);
    cfg.out_dir = scratch(std::string(name) + "-b");
    const auto b = run_scenario(cfg);
    REQUIRE(a.files.size() == b.files.size());
    for (size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].sha256 == b.files[i].sha256);
  }
}

TEST_CASE("run_scenario validates its input") {
  RunConfig cfg;
  cfg.scenario = "noncollapse";
  cfg.n = 3;
  cfg.k = 3;
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}
