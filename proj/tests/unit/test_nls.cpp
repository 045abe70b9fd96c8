#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dft/errors.hpp"
#include "dft/nls.hpp"
#include "dft/probes.hpp"
#include "helpers.hpp"

using namespace dft;
using testing::gauss;
using testing::plan;
using testing::rel;

namespace {

GridFunction small_data(const DistortedPlan& p, double eps) {
  const GridFunction g = gauss(p.grid(), 1.5);
  return band_limit(p, GridFunction(p.grid(), eps * g.values()), 2.5);
}

// Periodic Strang split-step for i u_t - u_xx = a (2 pi)^{5/2} |u|^4 u.
CVec split_step(const GridFunction& u0, double a, double dt, double T) {
  const double c = std::pow(2.0 * kPi, 2.5);
  GridFunction u = u0;
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t n = 0; n < steps; ++n) {
    u = flat_propagator(u, 0.5 * dt, 1);
    CVec v = u.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -a * c * std::pow(std::norm(v[i]), 2) * dt);
    u = flat_propagator(GridFunction(u.grid(), v), 0.5 * dt, 1);
  }
  return u.values();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dft_unit_" + name)).string();
}

}  // namespace

TEST_CASE("linear control") {
  const DistortedPlan& p = plan("sech2", 2.0, 64, 512);
  NLSConfig cfg;
  cfg.a = 0.0;
  cfg.horizon = 1.0;
  cfg.store_every = 5;
  const GridFunction u0 = small_data(p, 0.05);
  const Trajectory tr = nls_solve(p, cfg, u0);
  CHECK_FALSE(tr.aborted);
  CHECK(rel(tr.states.back().values(), propagator(p, 1.0, u0).values()) < 1e-6);

  const std::vector<GridFunction> v = interaction_profile(p, tr);
  CHECK(v.front().values() == u0.values());
  for (const GridFunction& x : v) CHECK(rel(x.values(), u0.values()) < 1e-6);
  const ScatteringReport rep = scattering_extract(p, tr);
  CHECK(rep.verdict == Verdict::ScatteringConsistent);
  CHECK(rep.final_residual < 1e-6 * rep.u0_norm);
}

TEST_CASE("free quintic against a flat split-step") {
  const DistortedPlan& p = plan("zero", 0.0, 64, 512);
  NLSConfig cfg;
  cfg.a = -1.0;
  cfg.horizon = 10.0;
  cfg.store_every = 50;
  const GridFunction u0 = small_data(p, 0.05);
  const Trajectory tr = nls_solve(p, cfg, u0);
  CHECK(tr.mass_drift() < 1e-6);
  const CVec ref = split_step(u0, -1.0, 0.5 * cfg.dt, cfg.horizon);
  CHECK(rel(tr.states.back().values(), ref) < 1e-4);
}

TEST_CASE("second-order self-convergence") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  const GridFunction u0 = small_data(p, 0.3);
  CVec end[3];
  double dt = 0.1;
  for (int i = 0; i < 3; ++i, dt *= 0.5) {
    NLSConfig cfg;
    cfg.dt = dt;
    cfg.horizon = 2.0;
    end[i] = nls_solve(p, cfg, u0).states.back().values();
  }
  const double ratio = (end[0] - end[1]).norm() / (end[1] - end[2]).norm();
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  NLSConfig rk;
  rk.scheme = Scheme::DuhamelRK2;
  rk.horizon = 2.0;
  rk.dt = 0.025;
  CHECK(rel(nls_solve(p, rk, u0).states.back().values(), end[2]) < 1e-4);
}

TEST_CASE("small data tail contracts") {
  const DistortedPlan& p = plan("sech2", 2.0, 64, 512);
  NLSConfig cfg;
  cfg.horizon = 8.0;
  cfg.store_every = 10;
  const Trajectory tr = nls_solve(p, cfg, small_data(p, 0.05));
  const ScatteringReport rep = scattering_extract(p, tr);
  REQUIRE(rep.window_residuals.size() == 3);
  CHECK(rep.window_residuals[2] < rep.window_residuals[1]);
  CHECK(rep.u_plus_flat.size() == static_cast<Eigen::Index>(extended_grid(p).N));
}

TEST_CASE("large focusing data trips the detector") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  NLSConfig cfg;
  cfg.horizon = 5.0;
  const Trajectory tr = nls_solve(p, cfg, small_data(p, 5.0));
  if (tr.aborted) {
    CHECK_FALSE(tr.abort_reason.empty());
    CHECK_THROWS_AS(scattering_extract(p, tr), BlowUpError);
  } else {
    CHECK(scattering_extract(p, tr).verdict == Verdict::Inconclusive);
  }
}

TEST_CASE("configuration checks") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  NLSConfig cfg;
  cfg.symbol = make_symbol("one", 3);
  CHECK_THROWS_AS(validate(cfg, p), PreconditionError);
  cfg = NLSConfig{};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(validate(cfg, p), PreconditionError);
  CHECK(parse_scheme("duhamel-rk2") == Scheme::DuhamelRK2);
  CHECK(to_string(Scheme::Strang) == "strang");
}

TEST_CASE("trajectory files round trip") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  NLSConfig cfg;
  cfg.horizon = 0.5;
  cfg.store_every = 2;
  const Trajectory tr = nls_solve(p, cfg, small_data(p, 0.05));
  const std::string path = temp_path("traj.bin");
  write_trajectory(tr, path);
  const Trajectory back = read_trajectory(path);
  REQUIRE(back.states.size() == tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    CHECK(back.times[i] == tr.times[i]);
    CHECK(back.states[i].values() == tr.states[i].values());
  }
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "DFTTRAJ1");
  std::filesystem::remove(path);

  const std::string csv = temp_path("diag.csv");
  write_diagnostics_csv(tr, csv);
  std::ifstream c(csv);
  std::string header;
  std::getline(c, header);
  CHECK(header == "step,t,mass,sup,l6_accum");
  std::size_t rows = 0;
  for (std::string line; std::getline(c, line);) ++rows;
  CHECK(rows == tr.steps.size());
  std::filesystem::remove(csv);

  std::ofstream bad(path, std::ios::binary);
  bad << "NOTATRAJ";
  bad.close();
  CHECK_THROWS(read_trajectory(path));
  std::filesystem::remove(path);
}
