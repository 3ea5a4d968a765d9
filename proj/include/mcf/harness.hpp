#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcf/diagnostics.hpp"
#include "mcf/flow.hpp"
#include "mcf/spectral.hpp"

namespace mcf {

/// Parse or validation failure; exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario;
  int n = 0;  ///< 0 = unset
  int k = 0;
  std::optional<int> grid_points;  ///< scenario default when unset
  double tau0 = 25.0;
  double horizon = 200.0;          ///< final tau of the rescaled runs
  std::optional<double> dt;
  BoundaryMode boundary = BoundaryMode::PinnedHomothetic;
  std::filesystem::path out_dir = "mcfneck-out";
  std::uint64_t seed = 20240601;
};

const std::vector<std::string>& scenario_names();
/// Maps aliases ("spectrum") to registry names; unknown names pass through.
std::string canonical_scenario(const std::string& name);

/// key = value lines, '#' comments. n and k are required. Throws ConfigError
/// naming the line for syntax errors and unknown keys, the field otherwise.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);
/// Everything validate checks except the scenario name.
void validate_fields(const RunConfig& cfg);

struct FileRecord {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct CheckRecord {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunManifest {
  RunConfig config;
  std::string version;
  std::map<std::string, double> metrics;
  std::vector<CheckRecord> checks;
  std::vector<FileRecord> files;
  double wall_seconds = 0.0;

  bool passed() const;
};

/// Runs one scenario into cfg.out_dir and writes manifest.json there.
/// Runtime failures propagate as exceptions (exit status 3).
RunManifest run_scenario(const RunConfig& cfg);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// CSV with a header row, 17 significant digits, '\n' line ends. Throws
/// std::runtime_error naming the path on I/O failure.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Columns t_or_tau,min_v,d,H_min,alpha.
void write_trace(const FlowTrace& trace, const std::filesystem::path& path);
/// Columns tau,d,N,R,d_R,N_R; one row per (tau, R) when restricted series are given.
void write_series(const DecaySeries& full, const std::vector<DecaySeries>& restricted,
                  const std::filesystem::path& path);
/// Columns i,j,eigenvalue,multiplicity.
void write_eigen_table(const std::vector<SpectrumLevel>& levels,
                       const std::filesystem::path& path);

}  // namespace mcf
