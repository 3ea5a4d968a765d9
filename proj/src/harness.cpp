#include "mcf/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "mcf/criteria.hpp"
#include "mcf/experiments.hpp"

namespace mcf {

namespace {

constexpr const char* kVersion = "mcfneck 1.0.0";

const std::vector<std::string> kScenarios = {
    "spectrum-validate",  "jacobi-decay",     "neckpinch-mcf", "nondegenerate-rmcf",
    "cusp-restart",       "monotonicity-sweep", "nonconcentration", "noncollapse",
    "bowl-ode",           "surgery-table"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value, int line) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" +
                      value + "'");
  }
  return out;
}

std::string format17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* boundary_name(BoundaryMode b) {
  return b == BoundaryMode::Neumann ? "neumann" : "pinned";
}

// N(tau) per sample; NaN where the next unit step is missing.
std::vector<double> orders(const DecaySeries& s, bool restricted) {
  std::vector<double> N(s.tau.size(), NAN);
  for (size_t i = 0; i + 1 < s.tau.size(); ++i) {
    try {
      N[i] = decay_order(s, s.tau[i], restricted);
    } catch (const std::domain_error&) {
    }
  }
  return N;
}

struct Context {
  const RunConfig& cfg;
  CylinderParams params;
  RunManifest& manifest;

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(cfg.out_dir / name, header, rows);
    manifest.files.push_back({name, "", 0});
  }
  void trace(const std::string& name, const FlowTrace& t) {
    write_trace(t, cfg.out_dir / name);
    manifest.files.push_back({name, "", 0});
  }
  void check(CheckRecord c) { manifest.checks.push_back(std::move(c)); }
  void metric(const std::string& key, double value) { manifest.metrics[key] = value; }
};

void spectrum_validate(Context& cx) {
  std::vector<int> points = {250, 500, 1000, 2000};
  if (cx.cfg.grid_points) points = {*cx.cfg.grid_points / 4, *cx.cfg.grid_points / 2, *cx.cfg.grid_points};
  const auto run = exp::spectrum_run(cx.params, points);
  write_eigen_table(enumerate_spectrum(cx.params, 2.0), cx.cfg.out_dir / "eigen_table.csv");
  cx.manifest.files.push_back({"eigen_table.csv", "", 0});
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < run.points.size(); ++i) {
    rows.push_back({double(run.points[i]), run.lowest[i][0], run.lowest[i][1], run.lowest[i][2],
                    run.max_error[i]});
  }
  cx.csv("spectrum_convergence.csv", {"points", "lambda0", "lambda1", "lambda2", "max_error"}, rows);
  cx.metric("max_error", run.max_error.back());
  cx.metric("order", run.order);
  cx.check(criteria::spectrum(run));
}

void jacobi_decay(Context& cx) {
  const auto lin = exp::linear_decay_run(cx.cfg.seed);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < lin.sample_tau.size(); ++i) rows.push_back({lin.sample_tau[i], lin.sample_N[i]});
  cx.csv("linear_decay.csv", {"tau", "N"}, rows);
  const auto jac = exp::jacobi_run(cx.params, cx.cfg.seed);
  rows.clear();
  for (size_t i = 0; i < jac.h.size(); ++i) rows.push_back({jac.h[i], jac.error[i]});
  cx.csv("jacobi_convergence.csv", {"h", "error"}, rows);
  cx.metric("linear_floor", lin.floor);
  cx.metric("linear_worst_increase", lin.worst_increase);
  cx.metric("h2_drift", jac.h2_drift);
  cx.metric("spatial_order", jac.spatial_order);
  cx.check(criteria::linear_decay(lin));
  cx.check(criteria::jacobi_grid(jac));
}

void neckpinch_mcf(Context& cx) {
  const auto run = exp::exact_run(cx.params, cx.cfg.grid_points.value_or(1000));
  cx.trace("cylinder_trace.csv", run.cylinder_trace);
  cx.metric("cylinder_T", run.cylinder_T);
  cx.metric("sphere_T", run.sphere_T);
  cx.metric("dumbbell_neck_T", run.dumbbell_neck_T);
  cx.check(criteria::exact_solutions(run));
  cx.check(criteria::dumbbell(run, cx.params));
}

void nondegenerate_rmcf(Context& cx) {
  exp::NondegenerateOptions o;
  o.params = cx.params;
  o.tau0 = cx.cfg.tau0;
  o.horizon = cx.cfg.horizon;
  o.boundary = cx.cfg.boundary;
  if (cx.cfg.grid_points) o.points = *cx.cfg.grid_points;
  if (cx.cfg.dt) o.dt = *cx.cfg.dt;
  const auto run = exp::nondegenerate_run(o);
  cx.trace("trace.csv", run.trace);
  write_series(run.series, run.restricted, cx.cfg.out_dir / "series.csv");
  cx.manifest.files.push_back({"series.csv", "", 0});
  cx.metric("final_tau", run.series.tau.empty() ? o.tau0 : run.series.tau.back());
  cx.metric("final_d", run.series.d.empty() ? NAN : run.series.d.back());
  double cmin = INFINITY, cmax = 0.0;
  for (size_t i = 0; i < run.snapshots.size(); ++i) {
    const double ratio = linearized_norm(run.snapshots[i]) / run.series.d[i];
    cmin = std::min(cmin, ratio);
    cmax = std::max(cmax, ratio);
  }
  cx.metric("jacobi_ratio_min", cmin);
  cx.metric("jacobi_ratio_max", cmax);
  if (run.status != StepStatus::Ok) {
    cx.check({"run-completed", false, run.message});
    return;
  }
  cx.check(criteria::fixed_point(exp::fixed_point_run(cx.params)));
  if (o.horizon >= 60.0) {
    const auto fit = exp::normal_form_fit(run, 50.0, std::min(200.0, o.horizon));
    cx.metric("normal_form_slope", fit.slope);
    cx.check(criteria::normal_form(fit));
    cx.check(criteria::decay_order_limit(run));
  }
  if (o.horizon >= o.tau0 + 3.0) {
    const auto fit = exp::restricted_fit(run, {1.0, 2.0});
    cx.metric("restricted_exponent", fit.exponent);
    cx.check(criteria::restricted(fit));
  }
  if (o.horizon >= o.tau0 + 6.0) cx.check(criteria::mean_convex(run));
  const auto nc = nonconcentration_check(run.snapshots);
  cx.metric("nonconcentration_C", nc.C);
  cx.metric("nonconcentration_K", nc.K);
  cx.check(criteria::nonconcentration({nc}));
}

void cusp_restart(Context& cx) {
  const auto cusp = exp::cusp_run(cx.params);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < cusp.y.size(); ++i) rows.push_back({cusp.y[i], cusp.ratio[i]});
  cx.csv("cusp_ratio.csv", {"y", "ratio"}, rows);
  cx.trace("cusp_trace.csv", cusp.trace);
  const auto rs = exp::restart_run(cx.params);
  rows.clear();
  for (size_t j = 0; j < rs.samples.size(); ++j) {
    const auto& p = rs.samples[j];
    for (int i = 0; i < p.grid.points; ++i) rows.push_back({rs.sample_t[j], p.grid.coord(i), p.w[i]});
  }
  cx.csv("restart_profiles.csv", {"t", "s", "w"}, rows);
  cx.metric("T", cusp.T);
  cx.metric("ratio_min", cusp.min_ratio);
  cx.metric("ratio_max", cusp.max_ratio);
  cx.metric("monotone_failures", rs.monotone_failures);
  cx.check(criteria::cusp(cusp));
  cx.check(criteria::restart(rs));
}

void monotonicity_sweep(Context& cx) {
  const auto run = exp::sweep_run(cx.params, cx.cfg.seed);
  std::vector<std::vector<double>> rows;
  for (size_t r = 0; r < run.reports.size(); ++r) {
    for (const auto& v : run.reports[r].verdicts) {
      rows.push_back({double(r), v.tau, v.N0, v.N1, double(static_cast<int>(v.kind)), v.gamma});
    }
  }
  cx.csv("verdicts.csv", {"run", "tau", "N0", "N1", "verdict", "gamma"}, rows);
  cx.metric("violations", run.violations);
  cx.metric("worst_floor", run.worst_floor);
  cx.check(criteria::sweep(run));
}

void nonconcentration(Context& cx) {
  auto reports = exp::sweep_run(cx.params, cx.cfg.seed).nonconcentration;
  exp::NondegenerateOptions o;
  o.params = cx.params;
  o.tau0 = cx.cfg.tau0;
  o.horizon = cx.cfg.horizon;
  o.boundary = cx.cfg.boundary;
  if (cx.cfg.grid_points) o.points = *cx.cfg.grid_points;
  if (cx.cfg.dt) o.dt = *cx.cfg.dt;
  reports.push_back(nonconcentration_check(exp::nondegenerate_run(o).snapshots));
  std::vector<std::vector<double>> rows, fits;
  for (size_t r = 0; r < reports.size(); ++r) {
    const auto& rep = reports[r];
    for (size_t i = 0; i < rep.tau.size(); ++i) rows.push_back({double(r), rep.tau[i], rep.lhs[i], rep.ratio[i]});
    fits.push_back({double(r), rep.C, rep.K, double(rep.holds)});
  }
  cx.csv("nonconcentration.csv", {"run", "tau", "lhs", "ratio"}, rows);
  cx.csv("nonconcentration_fits.csv", {"run", "C", "K", "holds"}, fits);
  cx.check(criteria::nonconcentration(reports));
}

void noncollapse(Context& cx) {
  const auto run = exp::noncollapse_run(cx.params);
  cx.csv("noncollapse.csv", {"case", "alpha"},
         {{0, run.sphere_alpha},
          {1, run.cylinder_alpha},
          {2, run.ellipsoid_alpha_coarse},
          {3, run.ellipsoid_alpha_fine}});
  cx.metric("sphere_alpha", run.sphere_alpha);
  cx.metric("cylinder_alpha", run.cylinder_alpha);
  cx.metric("ellipsoid_alpha", run.ellipsoid_alpha_fine);
  cx.check(criteria::noncollapse(run, cx.params));
}

void bowl_ode(Context& cx) {
  std::vector<exp::BowlRun> runs;
  std::vector<std::vector<double>> rows;
  for (int m : {2, 3, 6}) {
    runs.push_back(exp::bowl_run(m));
    const auto& b = runs.back();
    for (size_t i = 0; i < b.s.size(); ++i) rows.push_back({double(m), b.s[i], b.gap[i], b.increment[i]});
    cx.metric("exponent_m" + std::to_string(m), b.exponent);
  }
  cx.csv("bowl_tail.csv", {"m", "s", "gap", "increment"}, rows);
  cx.check(criteria::bowl(runs));
}

void surgery_table(Context& cx) {
  const auto rows = exp::surgery_table(7);
  std::vector<std::vector<double>> out;
  for (const auto& r : rows) out.push_back({double(r.n), double(r.k), double(r.delta), double(r.oracle)});
  cx.csv("surgery.csv", {"n", "k", "delta_chi", "oracle"}, out);
  cx.metric("delta_chi_2_1", surgery_euler_delta(2, 1));
  cx.check(criteria::surgery(rows));
}

const std::map<std::string, std::function<void(Context&)>> kRegistry = {
    {"spectrum-validate", spectrum_validate}, {"jacobi-decay", jacobi_decay},
    {"neckpinch-mcf", neckpinch_mcf},         {"nondegenerate-rmcf", nondegenerate_rmcf},
    {"cusp-restart", cusp_restart},           {"monotonicity-sweep", monotonicity_sweep},
    {"nonconcentration", nonconcentration},   {"noncollapse", noncollapse},
    {"bowl-ode", bowl_ode},                   {"surgery-table", surgery_table}};

nlohmann::ordered_json to_json(const RunManifest& m) {
  const RunConfig& c = m.config;
  nlohmann::ordered_json cfg = {{"scenario", c.scenario}, {"n", c.n}, {"k", c.k}};
  cfg["grid_points"] = c.grid_points ? nlohmann::ordered_json(*c.grid_points) : nullptr;
  cfg["tau0"] = c.tau0;
  cfg["horizon"] = c.horizon;
  cfg["dt"] = c.dt ? nlohmann::ordered_json(*c.dt) : nullptr;
  cfg["boundary"] = boundary_name(c.boundary);
  cfg["out_dir"] = c.out_dir.string();
  cfg["seed"] = c.seed;

  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [key, v] : m.metrics) {
    metrics[key] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format17(v));
  }
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& ch : m.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"version", m.version}, {"config", cfg},     {"passed", m.passed()}, {"metrics", metrics},
          {"checks", checks},     {"files", files},   {"wall_seconds", m.wall_seconds}};
}

}  // namespace

const std::vector<std::string>& scenario_names() { return kScenarios; }

std::string canonical_scenario(const std::string& name) {
  if (name == "spectrum") return "spectrum-validate";
  return name;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool have_n = false, have_k = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    std::replace(key.begin(), key.end(), '-', '_');
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": '" + key + "' has no value");
    if (key == "scenario") {
      cfg.scenario = canonical_scenario(value);
    } else if (key == "n") {
      cfg.n = parse_number<int>(key, value, line);
      have_n = true;
    } else if (key == "k") {
      cfg.k = parse_number<int>(key, value, line);
      have_k = true;
    } else if (key == "grid_points") {
      cfg.grid_points = parse_number<int>(key, value, line);
    } else if (key == "tau0") {
      cfg.tau0 = parse_number<double>(key, value, line);
    } else if (key == "horizon") {
      cfg.horizon = parse_number<double>(key, value, line);
    } else if (key == "dt") {
      cfg.dt = parse_number<double>(key, value, line);
    } else if (key == "boundary") {
      if (value == "pinned") cfg.boundary = BoundaryMode::PinnedHomothetic;
      else if (value == "neumann") cfg.boundary = BoundaryMode::Neumann;
      else throw ConfigError("line " + std::to_string(line) + ": boundary must be 'pinned' or 'neumann'");
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value, line);
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (!have_n) throw ConfigError("n: required");
  if (!have_k) throw ConfigError("k: required");
  // The scenario may come from the command line instead.
  if (cfg.scenario.empty()) {
    validate_fields(cfg);
  } else {
    validate(cfg);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.scenario.empty()) throw ConfigError("scenario: required");
  if (std::find(kScenarios.begin(), kScenarios.end(), cfg.scenario) == kScenarios.end()) {
    throw ConfigError("scenario: unknown '" + cfg.scenario + "'");
  }
  validate_fields(cfg);
}

void validate_fields(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n: must be at least 2");
  if (cfg.k < 1 || cfg.k > cfg.n - 1) {
    throw ConfigError("k: must lie in [1, n-1] = [1, " + std::to_string(cfg.n - 1) + "]");
  }
  if (cfg.grid_points && *cfg.grid_points < 16) throw ConfigError("grid_points: must be at least 16");
  if (!(cfg.tau0 > 0.0)) throw ConfigError("tau0: must be positive");
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon: must be positive");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir: required");
  if (cfg.scenario == "nondegenerate-rmcf" || cfg.scenario == "nonconcentration") {
    if (cfg.tau0 < 10.0) throw ConfigError("tau0: nondegenerate data needs tau0 >= 10");
    if (cfg.horizon <= cfg.tau0) throw ConfigError("horizon: must exceed tau0");
  }
}

bool RunManifest::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

RunManifest run_scenario(const RunConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  RunManifest m;
  m.config = cfg;
  m.version = kVersion;
  Context cx{cfg, make_cylinder(cfg.n, cfg.k), m};
  kRegistry.at(cfg.scenario)(cx);
  for (auto& f : m.files) {
    const auto p = cfg.out_dir / f.path;
    f.sha256 = sha256_file(p);
    f.bytes = std::filesystem::file_size(p);
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto mpath = cfg.out_dir / "manifest.json";
  std::ofstream out(mpath, std::ios::binary);
  out << to_json(m).dump(2) << '\n';
  if (!out) throw std::runtime_error(mpath.string() + ": write failed");
  return m;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest init failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format17(row[i]);
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_trace(const FlowTrace& trace, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.samples.size());
  for (const auto& s : trace.samples) rows.push_back({s.time, s.min_v, s.d, s.h_min, s.alpha});
  write_csv(path, {"t_or_tau", "min_v", "d", "H_min", "alpha"}, rows);
}

void write_series(const DecaySeries& full, const std::vector<DecaySeries>& restricted,
                  const std::filesystem::path& path) {
  const auto N = orders(full, false);
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<double>> NR;
  for (const auto& r : restricted) NR.push_back(orders(r, true));
  for (size_t i = 0; i < full.tau.size(); ++i) {
    if (restricted.empty()) {
      rows.push_back({full.tau[i], full.d[i], N[i], NAN, NAN, NAN});
      continue;
    }
    for (size_t j = 0; j < restricted.size(); ++j) {
      const auto& r = restricted[j];
      const bool have = i < r.d_R.size();
      rows.push_back({full.tau[i], full.d[i], N[i], r.R.value_or(NAN), have ? r.d_R[i] : NAN,
                      have ? NR[j][i] : NAN});
    }
  }
  write_csv(path, {"tau", "d", "N", "R", "d_R", "N_R"}, rows);
}

void write_eigen_table(const std::vector<SpectrumLevel>& levels,
                       const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  for (const auto& level : levels) {
    for (const auto& m : level.modes) {
      rows.push_back({double(m.i), double(m.j), m.eigenvalue, double(level.multiplicity)});
    }
  }
  write_csv(path, {"i", "j", "eigenvalue", "multiplicity"}, rows);
}

}  // namespace mcf
