#include <doctest.h>

#include <filesystem>
#include <vector>

#include "dft/errors.hpp"
#include "dft/probes.hpp"
#include "helpers.hpp"

using namespace dft;
using testing::gauss;
using testing::plan;
using testing::rel;

namespace {

std::size_t nearest_column(const DistortedPlan& p, double xi) {
  std::size_t best = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (std::abs(p.xi(j) - xi) < std::abs(p.xi(best) - xi)) best = j;
  return best;
}

double born_distance(const DistortedPlan& p, double xi) {
  const std::size_t j = nearest_column(p, xi);
  double d = 0.0;
  for (std::size_t i = 0; i < p.grid().N; ++i)
    d = std::max(d, std::abs(p.table().E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                             std::polar(1.0, p.xi(j) * p.grid().x(i))));
  return d;
}

}  // namespace

TEST_CASE("free plane waves are exponentials") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  double err = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i = 0; i < p.grid().N; ++i)
      err = std::max(err, std::abs(p.table().E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                   std::polar(1.0, p.grid().x(i) * p.xi(j))));
  CHECK(err < 1e-12);
}

TEST_CASE("distorted plane waves") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 1024);
  const EigenResidualReport er = eigen_residual(p.table());
  const std::size_t j = nearest_column(p, 1.0);
  REQUIRE(er.resolved[j]);
  CHECK(er.per_column[static_cast<Eigen::Index>(j)] < 1e-6);

  const double d5 = born_distance(p, 5.0), d10 = born_distance(p, 10.0), d30 = born_distance(p, 30.0);
  CHECK(d5 > d10);
  CHECK(d10 > d30);
  const DistortedPlan& fine = plan("sech2", 2.0, 20, 2048);
  for (double xi : {5.0, 10.0, 30.0})
    CHECK(std::abs(born_distance(fine, xi) / born_distance(p, xi) - 1.0) < 1e-3);
}

TEST_CASE("free distorted transform is the flat transform") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  const GridFunction f = probe_sample(p.grid(), 3, 0);
  CHECK(rel(dft_forward(p, f).values(), flat_dft(f, 2).values()) < 1e-10);
  CHECK(rel(dft_inverse(p, dft_forward(p, f)).values(), f.values()) < 1e-10);
}

TEST_CASE("diagonalization") {
  CHECK(verify_diagonalization(plan("zero", 0.0, 20, 1024), gauss(make_grid(20, 1024), 1.0), 4) < 1e-6);
  CHECK(verify_diagonalization(plan("sech2", 2.0, 20, 1024), gauss(make_grid(20, 1024), 1.0), 4) < 1e-4);

  // Second-order stencil: the residual falls by 4 per halving of h.
  const double coarse = verify_diagonalization(plan("sech2", 2.0, 20, 512), gauss(make_grid(20, 512), 1.0), 2);
  const double fine = verify_diagonalization(plan("sech2", 2.0, 20, 1024), gauss(make_grid(20, 1024), 1.0), 2);
  CHECK(std::log2(coarse / fine) == doctest::Approx(2.0).epsilon(0.05));

  const double edge = verify_diagonalization(plan("sech2", 2.0, 20, 1024), gauss(make_grid(20, 1024), 0.3, 19.8), 4);
  CHECK(edge > 1e-2);
}

TEST_CASE("multipliers") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  const GridFunction f = probe_sample(p.grid(), 5, 1);
  const GridFunction same = apply_multiplier(p, [](double) { return cd(1.0); }, f);
  CHECK(rel(same.values(), f.values()) < 1e-6);

  const DistortedPlan& p0 = plan("zero", 0.0, 20, 256);
  auto heat = [](double xi) { return cd(std::exp(-xi * xi)); };
  CHECK(rel(apply_multiplier(p0, heat, f).values(), flat_multiplier(f, heat, 2).values()) < 1e-10);
}

TEST_CASE("Littlewood-Paley shells") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 512);
  const BumpPair& b = p.bumps();
  const double N = 4.0;
  const Spectrum s = dft_forward(p, gauss(p.grid(), 0.3));
  const GridFunction f = dft_inverse(p, multiply(p, [&](double xi) { return cd(b.phi(xi / N)); }, s));
  const double nf = f.values().norm();
  const CVec three =
      lp_project(p, f, N / 2).values() + lp_project(p, f, N).values() + lp_project(p, f, 2 * N).values();
  // Tolerance at the spectral round-trip floor of the 512-node plan.
  CHECK((three - f.values()).norm() / nf < 1e-5);
  CHECK(lp_project(p, f, N / 4).values().norm() / nf < 1e-5);
  CHECK(lp_project(p, f, 4 * N).values().norm() / nf < 1e-5);

  CVec sum = lp_low(p, f).values();
  for (double M : p.dyadic().levels()) sum += lp_project(p, f, M).values();
  CHECK(rel(sum, f.values()) < 1e-8);
  CHECK_THROWS_AS(lp_project(p, f, 1e6), PreconditionError);
}

TEST_CASE("wave operators") {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 256);
  const GridFunction f = probe_sample(p0.grid(), 2, 0);
  CHECK(rel(wave_operator(p0, f, Direction::Forward).values(), f.values()) < 1e-10);
  const GridFunction a = wave_operator(p0, f, Direction::Adjoint);
  REQUIRE(a.grid() == extended_grid(p0));
  // Zero outside [-L, L), f inside.
  const std::size_t off = p0.grid().N / 2;
  CHECK(rel(a.values().segment(static_cast<Eigen::Index>(off), 256), f.values()) < 1e-10);

  const DistortedPlan& p = plan("sech2", 2.0, 20, 512);
  const GridFunction g = probe_sample(p.grid(), 2, 1);
  const GridFunction flat = flat_propagator(wave_operator(p, g, Direction::Adjoint), 1.0, 1);
  CHECK(rel(wave_operator(p, flat, Direction::Forward).values(), propagator(p, 1.0, g).values()) < 1e-10);
}

TEST_CASE("Riesz transform") {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 256);
  const GridFunction f = gauss(p0.grid(), 0.7, 0.5, 2.0);
  auto sign = [](double xi) { return cd(0.0, xi > 0.0 ? 1.0 : -1.0); };
  CHECK(rel(riesz_transform(p0, f).values(), flat_multiplier(f, sign, 2).values()) < 1e-8);
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  CHECK_THROWS_AS(riesz_transform(p, gauss(p.grid(), 8.0)), PreconditionError);
}

TEST_CASE("propagator group") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 512);
  const GridFunction f = probe_sample(p.grid(), 4, 2);
  CHECK(rel(propagator(p, 0.0, f).values(), f.values()) < 1e-6);
  CHECK(std::abs(propagator(p, 1.0, f).values().norm() / f.values().norm() - 1.0) < 1e-4);
  const GridFunction two = propagator(p, 0.7, propagator(p, 0.3, f));
  CHECK(rel(two.values(), propagator(p, 1.0, f).values()) < 1e-6);
}

TEST_CASE("Sobolev norms") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  const GridFunction f = probe_sample(p.grid(), 6, 0);
  CHECK(sobolev_sharp_norm(p, f, 0.0, 3.0) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-6));
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 256);
  const double flat = lp_norm(flat_multiplier(f, [](double xi) { return cd(std::abs(xi)); }, 2), 2.0);
  CHECK(std::abs(sobolev_sharp_norm(p0, f, 1.0, 2.0) - flat) < 1e-8 * flat);
}

TEST_CASE("plan cache round trip") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 128);
  const auto dir = std::filesystem::temp_directory_path() / "dft_unit_plans";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const Potential& V = p.potential();
  const std::string path = plan_cache_path(dir.string(), V, 2, 4);
  save_plan(p.table(), path);
  const auto back = load_plan(path, V, 2, 4);
  REQUIRE(back.has_value());
  CHECK(back->E == p.table().E);
  CHECK(back->active == p.table().active);
  CHECK_FALSE(load_plan(path, make_potential("sech2", p.grid(), 3.0, 1.0), 2, 4).has_value());
  CHECK(plan_key(V, 2, 4) != plan_key(V, 2, 8));
  std::filesystem::remove_all(dir);
}
