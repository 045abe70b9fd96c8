#include <doctest.h>

#include "dft/errors.hpp"
#include "dft/probes.hpp"
#include "helpers.hpp"

using namespace dft;
using testing::plan;

TEST_CASE("probe samples depend only on seed and index") {
  const GridFunction a = probe_sample(make_grid(20, 256), 7, 4);
  const GridFunction b = probe_sample(make_grid(20, 512), 7, 4);
  for (std::size_t i = 0; i < 256; ++i) CHECK(std::abs(a[i] - b[2 * i]) < 1e-14);
  CHECK(probe_sample(make_grid(20, 256), 8, 4).values() != a.values());
}

TEST_CASE("Hoelder exponents") {
  CHECK_NOTHROW(validate_hoelder({4.0, 4.0, 2.0}));
  CHECK_NOTHROW(validate_hoelder({6.0, 6.0, 6.0, 2.0}));
  CHECK_THROWS_AS(validate_hoelder({4.0, 4.0, 4.0}), PreconditionError);
  CHECK_THROWS_AS(validate_hoelder({1.0, kInf, 1.0}), PreconditionError);
}

TEST_CASE("free product probe obeys Hoelder") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  ProbeOptions o;
  o.samples = 20;
  o.t.band = 8.0;
  const ProbeReport r = cm_bound_probe(p, make_symbol("one", 2), {4.0, 4.0, 2.0}, o);
  CHECK(r.all_finite);
  CHECK(r.max <= 2.0 * kPi + 1e-6);
}

TEST_CASE("Coifman-Meyer probe with the epsilon variant") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 256);
  ProbeOptions o;
  o.samples = 9;
  o.epsilon = 0.1;
  o.t.band = 8.0;
  o.jobs = 4;
  const ProbeReport r = cm_bound_probe(p, make_symbol("cm-angular", 2), {4.0, 4.0, 2.0}, o);
  CHECK(r.all_finite);
  CHECK(r.ratios.size() == 9);
  CHECK(r.eps_ratios.size() == 9);
  CHECK(r.eps_max < r.max);
}

TEST_CASE("Leibniz probe reduces to the flat oracle") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  ProbeOptions o;
  o.samples = 6;
  o.t.band = 8.0;
  const ProbeReport d = leibniz_probe(p, make_symbol("one", 2), 1, {4.0, 4.0, 2.0}, o);
  const ProbeReport f = leibniz_probe_flat(p.grid(), 1, {4.0, 4.0, 2.0}, o);
  REQUIRE(d.ratios.size() == f.ratios.size());
  for (std::size_t i = 0; i < d.ratios.size(); ++i) CHECK(std::abs(d.ratios[i] - f.ratios[i]) < 1e-6 * f.ratios[i]);
}

TEST_CASE("Strichartz probe") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  StrichartzOptions o;
  o.samples = 6;
  const ProbeReport d = strichartz_probe(p, 6.0, 6.0, o);
  const ProbeReport f = strichartz_probe_flat(p.grid(), 6.0, 6.0, o);
  CHECK(d.all_finite);
  REQUIRE(d.ratios.size() == f.ratios.size());
  for (std::size_t i = 0; i < d.ratios.size(); ++i) CHECK(std::abs(d.ratios[i] - f.ratios[i]) < 1e-6 * f.ratios[i]);
  CHECK_THROWS_AS(strichartz_probe(p, 2.0, 2.0, o), PreconditionError);

  const ProbeReport coarse = strichartz_probe(plan("sech2", 2.0, 20, 256), 4.0, kInf, o);
  const ProbeReport fine = strichartz_probe(plan("sech2", 2.0, 20, 512), 4.0, kInf, o);
  CHECK(refinement_change(coarse, fine) < 0.25);
}
