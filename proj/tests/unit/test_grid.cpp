#include <doctest.h>

#include <vector>

#include "dft/errors.hpp"
#include "helpers.hpp"

using namespace dft;
using testing::gauss;

TEST_CASE("grid spacing and nodes") {
  CHECK(make_grid(20, 1024).h() == doctest::Approx(0.0390625).epsilon(1e-15));
  const Grid g = make_grid(1, 16);
  const RVec x = g.nodes();
  REQUIRE(x.size() == 16);
  CHECK(x[0] == -1.0);
  CHECK(x[15] == doctest::Approx(1.0 - g.h()).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(20, 1000), PreconditionError);
  CHECK_THROWS_AS(make_grid(-1, 1024), PreconditionError);
}

TEST_CASE("lp norms") {
  const Grid g = make_grid(1, 16);
  const GridFunction one = GridFunction::sample(g, [](double) { return cd(1.0); });
  CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_norm(GridFunction::zero(g), 3.0) == 0.0);
  CHECK(lp_norm(GridFunction::zero(g), kInf) == 0.0);

  // int exp(-2 x^2) dx = sqrt(pi / 2)
  const Grid w = make_grid(20, 1024);
  const GridFunction f = GridFunction::sample(w, [](double x) { return cd(std::exp(-x * x)); });
  CHECK(std::abs(lp_norm(f, 2.0) - std::pow(kPi / 2.0, 0.25)) < 1e-10);
}

TEST_CASE("spacetime norms of simple trajectories") {
  const Grid g = make_grid(20, 256);
  const GridFunction f = gauss(g, 1.0);
  const double dt = 0.05;
  std::vector<GridFunction> one{f};
  CHECK(spacetime_norm(one, dt, 6.0, 6.0) == doctest::Approx(std::pow(dt, 1.0 / 6.0) * lp_norm(f, 6.0)));
  std::vector<GridFunction> flat(40, f);
  CHECK(spacetime_norm(flat, dt, 4.0, kInf) == doctest::Approx(std::pow(2.0, 0.25) * lp_norm(f, kInf)));
  CHECK(admissible_pair(6.0, 6.0));
  CHECK(admissible_pair(4.0, kInf));
  CHECK_FALSE(admissible_pair(2.0, 2.0));
}

TEST_CASE("free flow norm ratio is stable under refinement") {
  double ratio[2];
  for (int r = 0; r < 2; ++r) {
    const Grid g = make_grid(20, r == 0 ? 256 : 512);
    const GridFunction u0 = gauss(g, 1.0, 0.0, 1.0);
    std::vector<GridFunction> traj;
    for (int i = 0; i < 40; ++i) traj.push_back(flat_propagator(u0, 0.05 * i, 2));
    ratio[r] = spacetime_norm(traj, 0.05, 6.0, 6.0) / lp_norm(u0, 2.0);
  }
  CHECK(std::isfinite(ratio[0]));
  CHECK(std::abs(ratio[1] / ratio[0] - 1.0) < 1e-6);
}

TEST_CASE("flat transform pairs") {
  const Grid g = make_grid(20, 1024);
  CVec impulse = CVec::Zero(1024);
  impulse[512] = 1.0 / g.h();
  const Spectrum d = flat_dft(GridFunction(g, impulse));
  double dev = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) dev = std::max(dev, std::abs(d[j] - DistortedPlan::normalization()));
  CHECK(dev < 1e-12);

  const Spectrum s = flat_dft(gauss(g, 1.0));
  double err = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double xi = s.axis().xi(j);
    err = std::max(err, std::abs(s[j] - std::exp(-0.5 * xi * xi)));
  }
  CHECK(err < 1e-8);

  for (std::size_t r : {1, 2}) {
    const GridFunction f = gauss(g, 1.3, 1.0, 2.0);
    CHECK(testing::rel(flat_idft(flat_dft(f, r)).values(), f.values()) < 1e-12);
  }
}
