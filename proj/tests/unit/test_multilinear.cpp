#include <doctest.h>

#include <array>
#include <vector>

#include "dft/errors.hpp"
#include "dft/expansion.hpp"
#include "dft/multilinear.hpp"
#include "dft/probes.hpp"
#include "helpers.hpp"

using namespace dft;
using testing::gauss;
using testing::plan;
using testing::rel;

TEST_CASE("Coifman-Meyer seminorms") {
  const Symbol one = make_symbol("one", 2);
  for (int order : {0, 1, 2}) {
    const SeminormReport r = cm_seminorm(one, order);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.growth);
  }
  const SeminormReport ratio = cm_seminorm(make_symbol("cm-ratio", 2), 1);
  CHECK(std::isfinite(ratio.value));
  CHECK_FALSE(ratio.growth);

  Symbol sq;
  sq.name = "square";
  sq.arity = 2;
  sq.eval = [](std::span<const double> xi) { return cd(xi[0] * xi[0]); };
  CHECK(cm_seminorm(sq, 0).growth);

  CHECK(separable_defect(make_symbol("separable-gauss-rank2", 3)) < 1e-14);
  CHECK_THROWS_AS(make_symbol("nope", 2), ConfigError);
}

TEST_CASE("free product law and flat oracle") {
  const DistortedPlan& p = plan("zero", 0.0, 20, 256);
  const Grid& g = p.grid();
  const std::array<GridFunction, 2> fs{gauss(g, 1.0, 0.5, 1.0), gauss(g, 1.2, -0.3, -0.5)};
  const double band = 8.0;
  const GridFunction T = apply_T_dense(p, make_symbol("one", 2), fs, band);
  const CVec product = 2.0 * kPi * fs[0].values().cwiseProduct(fs[1].values());
  CHECK(rel(T.values(), product) < 1e-8);

  const Symbol cm = make_symbol("cm-angular", 2);
  CHECK(rel(apply_T_dense(p, cm, fs, band).values(), apply_T_flat(cm, fs, band).values()) < 1e-8);
}

TEST_CASE("multilinearity") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 128);
  const Grid& g = p.grid();
  const Symbol cm = make_symbol("cm-angular", 2);
  const GridFunction f1 = gauss(g, 1.0), g1 = gauss(g, 0.8, 1.0, 1.0), f2 = gauss(g, 1.1, -0.5);
  const GridFunction sum(g, f1.values() + g1.values());
  const std::array<GridFunction, 2> a{sum, f2}, b{f1, f2}, c{g1, f2};
  const CVec lhs = apply_T_dense(p, cm, a).values();
  const CVec rhs = apply_T_dense(p, cm, b).values() + apply_T_dense(p, cm, c).values();
  CHECK(rel(lhs, rhs) < 1e-10);
}

TEST_CASE("separable path against dense") {
  const DistortedPlan& p = plan("sech2", 2.0, 20, 128);
  const Grid& g = p.grid();
  const std::array<GridFunction, 2> fs{gauss(g, 1.0, 0.5), gauss(g, 1.2, -0.3, 1.0)};
  Symbol rank1;
  rank1.name = "rank1";
  rank1.arity = 2;
  rank1.eval = [](std::span<const double> xi) { return cd(std::exp(-xi[0] * xi[0] / 4.0) / (1.0 + xi[1] * xi[1])); };
  rank1.separable = {SeparableTerm{1.0,
                                   {[](double x) { return cd(std::exp(-x * x / 4.0)); },
                                    [](double x) { return cd(1.0 / (1.0 + x * x)); }}}};
  CHECK(rel(apply_T_separable(p, rank1, fs).values(), apply_T_dense(p, rank1, fs).values()) < 1e-8);
  const Symbol one = make_symbol("one", 2);
  CHECK(rel(apply_T_separable(p, one, fs).values(), apply_T_dense(p, one, fs).values()) < 1e-8);

  // 64 frequencies, k = 3.
  const DistortedPlan& tiny = plan("sech2", 2.0, 14, 32);
  const Grid& t = tiny.grid();
  const std::array<GridFunction, 3> hs{gauss(t, 1.0), gauss(t, 0.9, 0.4, 0.5), gauss(t, 1.1, -0.4)};
  const Symbol r2 = make_symbol("separable-gauss-rank2", 3);
  CHECK(rel(apply_T_separable(tiny, r2, hs).values(), apply_T_dense(tiny, r2, hs).values()) < 1e-7);
}

TEST_CASE("expansion coefficients of the constant symbol") {
  const CoefficientTable t = expand_symbol(make_symbol("one", 2), BumpPair{}, 1.0);
  REQUIRE_FALSE(t.terms.empty());
  const std::size_t w = 2 * t.n_max + 1;
  for (const ExpansionTerm& term : t.terms) {
    const std::size_t centre = t.n_max * w + t.n_max;
    double rest = 0.0;
    for (std::size_t i = 0; i < term.coeffs.size(); ++i)
      if (i != centre) rest = std::max(rest, std::abs(term.coeffs[i]));
    CHECK(std::abs(term.coeffs[centre]) > rest);
  }
}

TEST_CASE("expansion error decreases in n_max") {
  const Symbol m = make_symbol("cm-ratio", 2);
  double prev = kInf;
  for (std::size_t n : {2, 4, 8}) {
    ExpansionOptions o;
    o.n_max = n;
    const double e = expand_symbol(m, BumpPair{}, 1.0, o).reconstruction_error;
    CHECK(e < prev);
    prev = e;
  }
}

// Reconstruction at n_max = 8 stays near 5e-2 for this symbol; see README, known red.
TEST_CASE("expansion reconstructs the ratio symbol to 1e-3" * doctest::should_fail()) {
  const CoefficientTable t = expand_symbol(make_symbol("cm-ratio", 2), BumpPair{}, 1.0);
  CHECK(t.reconstruction_error < 1e-3);
}

TEST_CASE("expansion path") {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 64);
  const Grid& g = p0.grid();
  const std::array<GridFunction, 2> fs{gauss(g, 1.0, 0.5, 0.5), gauss(g, 1.2, -0.3, -0.5)};
  ExpansionOptions o;
  const CVec product = 2.0 * kPi * fs[0].values().cwiseProduct(fs[1].values());
  const double recon = expand_symbol(make_symbol("one", 2), p0.bumps(), 1.0, o).reconstruction_error;
  CHECK(rel(apply_T_expansion(p0, make_symbol("one", 2), fs, o).values(), product) < recon);

  for (const DistortedPlan* p : {&p0, &plan("sech2", 2.0, 20, 32)}) {
    const Grid& h = p->grid();
    const std::array<GridFunction, 2> gs{gauss(h, 1.0, 0.5, 0.5), gauss(h, 1.2, -0.3, -0.5)};
    const Symbol cm = make_symbol("cm-angular", 2);
    const CVec dense = apply_T_dense(*p, cm, gs).values();
    double prev = kInf;
    for (std::size_t n : {2, 4, 8}) {
      o.n_max = n;
      const double e = rel(apply_T_expansion(*p, cm, gs, o).values(), dense);
      CHECK(e < prev);
      prev = e;
    }
    CHECK(prev < 1e-3);
  }
}

// Bounded by the cutoff reconstruction error above, not by 1e-6; see README, known red.
TEST_CASE("expansion path reproduces the product law to 1e-6" * doctest::should_fail()) {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 64);
  const Grid& g = p0.grid();
  const std::array<GridFunction, 2> fs{gauss(g, 1.0, 0.5, 0.5), gauss(g, 1.2, -0.3, -0.5)};
  const CVec product = 2.0 * kPi * fs[0].values().cwiseProduct(fs[1].values());
  CHECK(rel(apply_T_expansion(p0, make_symbol("one", 2), fs).values(), product) < 1e-6);
}

TEST_CASE("Lambda form") {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 128);
  const Grid& g = p0.grid();
  const std::array<GridFunction, 2> fs{gauss(g, 1.0, 0.5, 0.5), gauss(g, 1.2, -0.3, -0.5)};
  const GridFunction w = gauss(g, 1.5, 0.2);
  const Symbol one = make_symbol("one", 2);
  CHECK(std::abs(lambda_form(p0, one, fs, GridFunction::zero(g)).value) == 0.0);
  const cd direct = 2.0 * kPi * g.h() * (fs[0].values().cwiseProduct(fs[1].values()).cwiseProduct(w.values())).sum();
  CHECK(std::abs(lambda_form(p0, one, fs, w).value - direct) < 1e-8 * std::abs(direct));

  const DistortedPlan& p = plan("sech2", 2.0, 20, 128);
  const Symbol cm = make_symbol("cm-angular", 2);
  const std::array<GridFunction, 2> swapped{fs[1], fs[0]};
  TOptions dense;
  dense.path = TPath::Dense;
  const cd a = lambda_form(p, cm, fs, w, dense).value, b = lambda_form(p, cm, swapped, w, dense).value;
  CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}

TEST_CASE("Green identity") {
  const DistortedPlan& p0 = plan("zero", 0.0, 20, 64);
  auto tuple = [](const Grid& g) {
    return std::vector<GridFunction>{gauss(g, 2.6, 0.5, 0.2), gauss(g, 2.8, -0.4, -0.1), gauss(g, 2.7, 1.0)};
  };
  CHECK(green_identity_residual(p0, tuple(p0.grid())).residual < 1e-6);

  const double coarse = green_identity_residual(plan("sech2", 2.0, 20, 64), tuple(make_grid(20, 64))).residual;
  const double fine = green_identity_residual(plan("sech2", 2.0, 20, 128), tuple(make_grid(20, 128))).residual;
  CHECK(coarse < 1e-3);
  CHECK(fine < 0.5 * coarse);

  const Grid& g = p0.grid();
  const std::vector<GridFunction> edge{gauss(g, 0.3, 19.5), gauss(g, 0.3, 19.5), gauss(g, 0.3, 19.5)};
  CHECK(green_identity_residual(plan("sech2", 2.0, 20, 64), edge).residual > 1e-2);
}
