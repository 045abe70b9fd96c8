#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dft/errors.hpp"
#include "dft/experiment.hpp"
#include "dft/nls.hpp"
#include "dft/probes.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

void print_summary(const dft::RunReport& r) {
  for (const auto& c : r.records)
    std::printf("%-4s %-52s %.6g %s %.6g%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                c.tolerance, c.gating ? "" : " (informational)");
  for (const auto& [k, v] : r.info) std::printf("info %s = %s\n", k.c_str(), v.c_str());
  std::printf("%s: %s in %.1f s\n", r.suite.c_str(), r.all_pass() ? "PASS" : "FAIL", r.wall_seconds);
}

int run(dft::ExperimentConfig cfg, const std::string& out) {
  if (!out.empty()) cfg.out = out;
  const dft::RunReport r = dft::run_experiment(cfg);
  print_summary(r);
  if (!cfg.out.empty()) dft::emit_report(r, cfg.out);
  return r.all_pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distorted Fourier transform toolkit"};
  app.require_subcommand(1);

  std::string config, out, cache;
  int jobs = 0;

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  verify->add_option("suite", suite, "Suite name")->required();
  verify->add_option("--config", config, "Config file")->required();
  verify->add_option("--jobs", jobs, "Worker threads");
  verify->add_option("--plan-cache", cache, "Plan cache directory");
  verify->add_option("--out", out, "Output directory");

  auto* nls = app.add_subcommand("nls", "Nonlinear Schroedinger runs");
  nls->require_subcommand(1);
  auto* nls_run = nls->add_subcommand("run", "Run the scattering experiment");
  nls_run->add_option("--config", config, "Config file")->required();
  nls_run->add_option("--jobs", jobs, "Worker threads");
  nls_run->add_option("--plan-cache", cache, "Plan cache directory");
  nls_run->add_option("--out", out, "Output directory");

  auto* plan = app.add_subcommand("plan", "Plane-wave plans");
  plan->require_subcommand(1);
  auto* plan_build = plan->add_subcommand("build", "Build and cache the plan of a config");
  plan_build->add_option("--config", config, "Config file")->required();
  plan_build->add_option("--plan-cache", cache, "Plan cache directory");
  plan_build->add_option("--jobs", jobs, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    dft::ExperimentConfig cfg = dft::load_config(config);
    if (jobs > 0) cfg.jobs = jobs;
    if (!cache.empty()) cfg.plan_cache = cache;

    if (*verify) {
      if (!cfg.suite.empty() && cfg.suite != suite)
        std::fprintf(stderr, "note: config suite '%s' overridden by '%s'\n", cfg.suite.c_str(), suite.c_str());
      cfg.suite = suite;
      return run(cfg, out);
    }
    if (*nls_run) {
      cfg.suite = "nls-scatter";
      return run(cfg, out);
    }
    if (*plan_build) {
      if (cfg.suite.empty()) cfg.suite = "plancherel";
      dft::validate_config(cfg);
      if (cfg.plan_cache.empty()) throw dft::ConfigError("plan build needs --plan-cache or run.plan_cache");
      const dft::Grid g = dft::make_grid(cfg.L, cfg.N);
      const dft::Potential V = cfg.family == "custom" ? dft::load_potential(cfg.file, g, cfg.gamma)
                                                      : dft::make_potential(cfg.family, g, cfg.c, cfg.w, cfg.gamma);
      dft::PlanOptions o;
      o.jost.substeps = cfg.substeps;
      o.xi_refine = cfg.refine;
      o.jobs = cfg.jobs;
      std::filesystem::create_directories(cfg.plan_cache);
      const dft::PlaneWaveTable t = dft::cached_plane_wave_table(V, o, cfg.plan_cache);
      std::printf("%s\n", dft::plan_cache_path(cfg.plan_cache, V, cfg.refine, cfg.substeps).c_str());
      std::printf("masked columns: %zu of %zu\n", t.masked_count(), t.axis.size());
      return kExitPass;
    }
  } catch (const dft::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const dft::PreconditionError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
  return kExitPass;
}
