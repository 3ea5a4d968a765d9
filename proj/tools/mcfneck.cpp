// mcfneck SCENARIO [--config PATH] [flags]; flags override config-file keys.
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration,
// 3 runtime failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mcf/harness.hpp"

namespace {

std::string registry_list() {
  std::string s;
  for (const auto& name : mcf::scenario_names()) s += (s.empty() ? "" : ", ") + name;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotationally symmetric neckpinch experiments"};
  std::string scenario;
  std::optional<std::string> config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, k, grid_points;
  std::optional<double> tau0, horizon;
  app.add_option("scenario", scenario, "One of: " + registry_list())->required();
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed);
  app.add_option("--n", n);
  app.add_option("--k", k);
  app.add_option("--tau0", tau0);
  app.add_option("--grid-points", grid_points);
  app.add_option("--horizon", horizon);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  mcf::RunConfig cfg;
  try {
    if (config_path) cfg = mcf::load_config(*config_path);
    cfg.scenario = mcf::canonical_scenario(scenario);
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (n) cfg.n = *n;
    if (k) cfg.k = *k;
    if (tau0) cfg.tau0 = *tau0;
    if (grid_points) cfg.grid_points = *grid_points;
    if (horizon) cfg.horizon = *horizon;
    if (cfg.n == 0) throw mcf::ConfigError("n: required (--n or config file)");
    if (cfg.k == 0) throw mcf::ConfigError("k: required (--k or config file)");
    mcf::validate(cfg);
  } catch (const mcf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  try {
    const mcf::RunManifest m = mcf::run_scenario(cfg);
    for (const auto& c : m.checks) {
      std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    std::printf("%s: %zu files, manifest at %s (%.2fs)\n", cfg.scenario.c_str(), m.files.size(),
                (cfg.out_dir / "manifest.json").string().c_str(), m.wall_seconds);
    return m.passed() ? 0 : 1;
  } catch (const mcf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure in " << cfg.scenario << ": " << e.what() << '\n';
    return 3;
  }
}
