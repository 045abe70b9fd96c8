#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dft/errors.hpp"
#include "dft/experiment.hpp"

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* config;
  double budget_seconds;
};

const std::vector<Criterion> kCriteria{
    {1, "Plancherel and inversion", "plancherel.ini", 120},
    {2, "diagonalization", "diagonalization.ini", 60},
    {3, "flat reduction", "flat.ini", 120},
    {4, "intertwining", "intertwine.ini", 60},
    {5, "Littlewood-Paley calculus", "lp.ini", 120},
    {6, "T-path agreement", "t-paths.ini", 300},
    {7, "Coifman-Meyer probe", "cm-probe.ini", 600},
    {8, "symbol expansion decay", "symbol-decay.ini", 120},
    {9, "Green identity", "green.ini", 180},
    {10, "Leibniz probe", "leibniz.ini", 300},
    {11, "Strichartz probe", "strichartz.ini", 300},
    {12, "NLS small-data scattering", "nls-scatter.ini", 600},
};

bool run(const Criterion& c, const std::string& config_dir, int jobs, const std::string& out) {
  std::string detail;
  bool pass = false;
  double seconds = 0.0;
  try {
    dft::ExperimentConfig cfg = dft::load_config(config_dir + "/" + c.config);
    cfg.jobs = jobs;
    if (!out.empty()) cfg.out = out + "/criterion" + std::to_string(c.id);
    const dft::RunReport r = dft::run_experiment(cfg);
    if (!cfg.out.empty()) dft::emit_report(r, cfg.out);
    seconds = r.wall_seconds;
    std::size_t gating = 0, passed = 0;
    for (const auto& rec : r.records) {
      if (!rec.gating) continue;
      ++gating;
      if (rec.pass) {
        ++passed;
      } else {
        char buf[160];
        std::snprintf(buf, sizeof(buf), " %s=%.4g%s%.4g", rec.name.c_str(), rec.value, rec.relation.c_str(),
                      rec.tolerance);
        detail += buf;
      }
    }
    const bool in_budget = seconds < c.budget_seconds;
    if (!in_budget) detail += " over runtime budget";
    pass = r.all_pass() && in_budget;
    detail = std::to_string(passed) + "/" + std::to_string(gating) + " checks" +
             (detail.empty() ? "" : ", failed:" + detail);
  } catch (const std::exception& e) {
    detail = std::string("error: ") + e.what();
  }
  std::printf("%s criterion %2d %-28s %7.1f s (budget %4.0f s) %s\n", pass ? "PASS" : "FAIL", c.id, c.title, seconds,
              c.budget_seconds, detail.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> ids;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string config_dir = DFT_CONFIG_DIR;
  std::string out;
  app.add_option("--criterion", ids, "Criterion numbers (default all)")->check(CLI::Range(1, 12));
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config-dir", config_dir, "Directory with the criterion configs");
  app.add_option("--out", out, "Write per-criterion reports under this directory");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const Criterion& c : kCriteria) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    all = run(c, config_dir, jobs, out) && all;
  }
  return all ? 0 : 1;
}
