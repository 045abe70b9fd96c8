#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dft/grid.hpp"

namespace dft {

// INI-style configuration, see README for the grammar.
struct ExperimentConfig {
  std::string suite;

  // [grid]
  double L = 20.0;
  std::size_t N = 1024;
  std::size_t refine = 2;
  std::size_t substeps = 4;

  // [potential]
  std::string family = "sech2";
  double c = 2.0;
  double w = 1.0;
  double gamma = 2.6;
  std::string file;
  std::vector<std::string> families;  // suites that sweep several potentials

  // [run]
  std::uint64_t seed = 1;
  std::size_t samples = 0;  // 0 selects the suite default
  int jobs = 1;
  std::string plan_cache;
  std::string out;
  bool refinement = true;  // repeat on the doubled grid

  // [probe]
  std::vector<std::string> symbols;
  std::vector<double> exponents{4.0, 4.0, 2.0};
  double epsilon = 0.1;
  double band = kInf;
  int s = 2;
  std::vector<std::pair<double, double>> pairs{{6.0, 6.0}, {4.0, kInf}};
  std::vector<double> times{0.1, 1.0, 5.0};
  double horizon = 2.0;
  double dt = 0.05;
  std::string t_path = "auto";

  // [expansion]
  std::size_t n_max = 8;
  double K = 8.0;
  std::string mode = "tight";
  std::string bump = "polynomial";

  // [nls]
  double nls_epsilon = 0.05;
  double nls_dt = 0.05;
  double nls_horizon = 20.0;
  double nls_a = -1.0;
  double nls_sigma = 1.5;
  double nls_band = 2.5;
  std::string scheme = "strang";
  std::string nls_symbol = "one";
  bool double_domain = true;
  std::size_t store_every = 10;
  bool trajectory = false;

  std::map<std::string, std::string> echo;  // section.key -> raw value
};

const std::vector<std::string>& known_suites();

// Throws ConfigError on syntax errors, unknown keys or invalid values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<", "<=", ">", ">="
  bool pass = false;
  std::string kind;  // oracle, property, refinement, budget
  bool gating = true;
};

struct Curve {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  std::string suite;
  std::map<std::string, std::string> config;
  std::vector<CheckRecord> records;
  std::vector<Curve> curves;
  std::map<std::string, std::string> info;
  std::map<std::string, std::string> environment;
  double wall_seconds = 0.0;

  bool all_pass() const;
};

RunReport run_experiment(const ExperimentConfig& cfg);

// Keys sorted, numbers at 12 significant digits. Wall-clock time is kept out
// of both so identical runs serialize to identical bytes.
std::string report_json(const RunReport& report);
std::string records_csv(const RunReport& report);
std::string curve_csv(const Curve& curve);
// report.json, records.csv, curves_<name>.csv and timing.txt under dir.
void emit_report(const RunReport& report, const std::string& dir);

}  // namespace dft
