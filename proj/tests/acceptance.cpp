// acceptance [ID...] [--scratch DIR]: runs the numbered acceptance criteria
// (all 15 by default) and prints one line per criterion. Exit status 1 when
// any of them fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <vector>

#include "CLI11.hpp"
#include "mcf/criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> ids;
  std::string scratch = (std::filesystem::temp_directory_path() / "mcf-acceptance").string();
  std::uint64_t seed = 20240601;
  app.add_option("ids", ids, "criterion ids")->check(CLI::Range(1, 15));
  app.add_option("--scratch", scratch, "writable directory for the determinism check");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);
  if (ids.empty()) {
    for (int i = 1; i <= 15; ++i) ids.push_back(i);
  }

  bool all = true;
  for (int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    mcf::CheckRecord r;
    try {
      r = mcf::criteria::run_criterion(id, scratch, seed);
    } catch (const std::exception& e) {
      r = {"error", false, e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d (%s): %s [%.2fs]\n", r.pass ? "PASS" : "FAIL", id, r.name.c_str(),
                r.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
