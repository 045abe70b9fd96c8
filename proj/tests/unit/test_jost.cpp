#include <doctest.h>

#include <array>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "dft/errors.hpp"
#include "dft/jost.hpp"
#include "helpers.hpp"

using namespace dft;
namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 4>;  // Re y, Im y, Re y', Im y'

// y'' = (V - k^2) y from x_start with data (y0, dy0), dense-output Dormand-Prince
// at 1e-12, sampled at every grid node on the far side of x_start.
CVec ode_solution(const Potential& V, double k, double x_start, cd y0, cd dy0) {
  const Grid& g = V.grid;
  auto rhs = [&](const State& s, State& d, double x) {
    const double q = V.eval(x) - k * k;
    d = {s[2], s[3], q * s[0], q * s[1]};
  };
  State s{y0.real(), y0.imag(), dy0.real(), dy0.imag()};
  std::vector<double> xs;
  const bool leftward = x_start > 0.0;
  if (leftward) {
    xs.push_back(x_start);
    for (std::size_t i = g.N; i-- > 0;) xs.push_back(g.x(i));
  } else {
    for (std::size_t i = 0; i < g.N; ++i) xs.push_back(g.x(i));
  }
  CVec out(static_cast<Eigen::Index>(g.N));
  auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, s, xs.begin(), xs.end(), leftward ? -1e-3 : 1e-3,
                          [&](const State& st, double x) {
                            const double idx = (x + g.L) / g.h();
                            if (idx < -0.5 || idx > static_cast<double>(g.N) - 0.5) return;
                            out[static_cast<Eigen::Index>(std::lround(idx))] = cd(st[0], st[1]);
                          });
  return out;
}

}  // namespace

TEST_CASE("free Jost solutions") {
  const Grid g = make_grid(20, 512);
  const Potential V = make_potential("zero", g);
  const JostPair jp = solve_jost(V, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.N; ++i) {
    err = std::max(err, std::abs(jp.f1[i] - std::polar(1.0, g.x(i))));
    err = std::max(err, std::abs(jp.f2[i] - std::polar(1.0, -g.x(i))));
  }
  CHECK(err < 1e-12);
  CHECK(std::abs(jp.wronskian - cd(0.0, -2.0)) < 1e-12);
  const ScatteringData sd = scattering_coefficients(V, 1.0);
  CHECK(std::abs(sd.t - 1.0) < 1e-12);
  CHECK(std::abs(sd.r1) < 1e-12);
  CHECK(std::abs(sd.r2) < 1e-12);
}

TEST_CASE("Jost solutions match an adaptive ODE integrator") {
  const Grid g = make_grid(20, 1024);
  const Potential V = make_potential("sech2", g, 2.0, 1.0);
  const double k = 1.0;
  const JostPair jp = solve_jost(V, k);
  const cd edge = std::polar(1.0, k * g.L);
  const CVec f1 = ode_solution(V, k, g.L, edge, cd(0.0, k) * edge);
  const CVec f2 = ode_solution(V, k, -g.L, edge, cd(0.0, -k) * edge);
  CHECK((jp.f1.values() - f1).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((jp.f2.values() - f2).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(jp.wronskian_deviation < 1e-8);

  const ScatteringData sd = scattering_coefficients(V, k);
  CHECK(std::abs(std::norm(sd.t) + std::norm(sd.r1) - 1.0) < 1e-8);
  CHECK(std::abs(std::norm(sd.t) + std::norm(sd.r2) - 1.0) < 1e-8);
}

TEST_CASE("Wronskian is constant at small k") {
  const Grid g = make_grid(20, 1024);
  const Potential V = make_potential("gaussian", g, 1.0, 1.0);
  CHECK(solve_jost(V, 0.001).wronskian_deviation < 1e-8);
  CHECK_THROWS_AS(solve_jost(V, 1e-4), PreconditionError);
}

TEST_CASE("resonance threshold") {
  CHECK(resonant(cd(0.0, 1e-13), 0.5));
  CHECK_FALSE(resonant(cd(0.0, 1e-6), 0.5));
}

TEST_CASE("zero-energy classification") {
  const Grid g = make_grid(20, 1024);
  const Classification free = classify_potential(make_potential("zero", g));
  CHECK(free.kind == Kind::Exceptional);
  CHECK(std::abs(free.wronskian_at_zero) == 0.0);

  const Potential V = make_potential("sech2", g, 2.0, 1.0);
  const Classification c = classify_potential(V);
  CHECK(c.kind == Kind::Generic);
  // f1(x, 0) -> 1 at +L, f2(x, 0) -> 1 at -L.
  const CVec f1 = ode_solution(V, 0.0, g.L, 1.0, 0.0);
  const CVec f2 = ode_solution(V, 0.0, -g.L, 1.0, 0.0);
  const Eigen::Index m = 512;
  const double h = g.h();
  const cd d1 = (f1[m + 1] - f1[m - 1]) / (2.0 * h), d2 = (f2[m + 1] - f2[m - 1]) / (2.0 * h);
  const cd W0 = f1[m] * d2 - d1 * f2[m];
  CHECK(std::abs(c.wronskian_at_zero - W0) < 1e-3 * std::abs(W0));

  for (double eps : {1e-3}) {
    const Kind a = classify_potential(make_potential("gaussian", make_grid(20, 512), eps)).kind;
    const Kind b = classify_potential(make_potential("gaussian", make_grid(20, 1024), eps)).kind;
    CHECK(a == b);
  }
}

TEST_CASE("resolvent kernel") {
  const Grid g = make_grid(20, 256);
  const ResolventKernel R0 = resolvent_kernel(make_potential("zero", g), 1.0);
  double err = 0.0;
  // Kernel of (H - k^2)^{-1} with the outgoing condition: -e^{ik|x-y|} / (2ik).
  for (std::size_t i = 0; i < g.N; i += 7)
    for (std::size_t j = 0; j < g.N; j += 5)
      err = std::max(err, std::abs(R0.G(i, j) - std::polar(1.0, std::abs(g.x(i) - g.x(j))) / cd(0.0, -2.0)));
  CHECK(err < 1e-8);

  const Grid w = make_grid(20, 1024);
  const Potential V = make_potential("sech2", w, 2.0, 1.0);
  const double k = 2.0;
  const ResolventKernel R = resolvent_kernel(V, k);
  const GridFunction src = testing::gauss(w, 1.0, 0.5, 1.0);
  const CVec u = apply_resolvent(R, src.values());
  // int u (H - k^2) phi = int g phi for smooth phi, with phi'' in closed form.
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double x0 = -3.0 + 0.6 * t, s = 0.8 + 0.1 * t;
    CVec Hphi(static_cast<Eigen::Index>(w.N)), phi(static_cast<Eigen::Index>(w.N));
    for (std::size_t i = 0; i < w.N; ++i) {
      const double y = (w.x(i) - x0) / s, p = std::exp(-0.5 * y * y);
      phi[static_cast<Eigen::Index>(i)] = p;
      Hphi[static_cast<Eigen::Index>(i)] = -(y * y - 1.0) / (s * s) * p + (V.eval(w.x(i)) - k * k) * p;
    }
    const cd lhs = u.transpose() * Hphi;
    const cd rhs = src.values().transpose() * phi;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("hypothesis checks") {
  const Grid g = make_grid(20, 1024);
  const HypothesisReport free = check_hypotheses(make_potential("zero", g));
  CHECK(free.all_pass());
  CHECK(std::abs(free.min_eigenvalue) < 1e-2);

  const HypothesisReport rep = check_hypotheses(make_potential("sech2", g, 2.0, 1.0));
  CHECK(rep.all_pass());
  CHECK(rep.min_eigenvalue > 0.0);

  // -l(l+1) sech^2 with l(l+1) = 5 binds a ground state at -l^2.
  const HypothesisReport well = check_hypotheses(make_potential("sech2", g, -5.0, 1.0));
  CHECK_FALSE(well.h2_pass);
  const double l = 0.5 * (std::sqrt(21.0) - 1.0);
  CHECK(std::abs(well.min_eigenvalue + l * l) < 1e-2);
}
