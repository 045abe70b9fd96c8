#include "dft/jost.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dft/errors.hpp"

namespace dft {

namespace {

constexpr double kGauss1 = 0.5 - 0.28867513459481288225;  // 1/2 - sqrt(3)/6
constexpr double kGauss2 = 0.5 + 0.28867513459481288225;
constexpr double kSqrt3Over12 = 0.14433756729740644113;

void require_wavenumber(double k, const JostOptions& opt) {
  if (!std::isfinite(k) || std::abs(k) < opt.k_min)
    throw PreconditionError("wavenumber below k_min");
}

void require_decay(const Potential& V) {
  if (!V.decayed_at_edges()) throw PreconditionError("potential not decayed at the grid edges");
}

double component_median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// One Magnus-4 step with signed length d, Gauss-point values q1, q2 of V - k^2
// ordered along the direction of travel.
inline void magnus_step(double d, double q1, double q2, cd& y, cd& dy) {
  const double alpha = kSqrt3Over12 * d * d * (q1 - q2);
  const double qbar = 0.5 * (q1 + q2);
  const double mu2 = alpha * alpha + d * d * qbar;
  double C, S;
  if (mu2 >= 0.0) {
    const double mu = std::sqrt(mu2);
    C = std::cosh(mu);
    S = mu < 1e-8 ? 1.0 + mu2 / 6.0 : std::sinh(mu) / mu;
  } else {
    const double nu = std::sqrt(-mu2);
    C = std::cos(nu);
    S = nu < 1e-8 ? 1.0 + mu2 / 6.0 : std::sin(nu) / nu;
  }
  const cd y_new = (C + S * alpha) * y + (S * d) * dy;
  const cd dy_new = (S * d * qbar) * y + (C - S * alpha) * dy;
  y = y_new;
  dy = dy_new;
}

}  // namespace

bool resonant(cd W, double k) { return std::abs(W) < 1e-12 * (1.0 + std::abs(k)); }

MagnusMarcher::MagnusMarcher(const Potential& V, std::size_t substeps)
    : grid_(V.grid), s_(substeps) {
  if (s_ == 0) throw PreconditionError("substeps must be positive");
  delta_ = grid_.h() / static_cast<double>(s_);
  const std::size_t M = grid_.N * s_;
  g1_.resize(M);
  g2_.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double a = -grid_.L + static_cast<double>(m) * delta_;
    g1_[m] = V.eval(a + kGauss1 * delta_);
    g2_[m] = V.eval(a + kGauss2 * delta_);
  }
}

void MagnusMarcher::march_left(double k2, cd y, cd dy, CVec& out, CVec& dout) const {
  const std::size_t N = grid_.N;
  out.resize(static_cast<Eigen::Index>(N));
  dout.resize(static_cast<Eigen::Index>(N));
  for (std::size_t m = N * s_; m-- > 0;) {
    magnus_step(-delta_, g2_[m] - k2, g1_[m] - k2, y, dy);
    if (m % s_ == 0) {
      out[static_cast<Eigen::Index>(m / s_)] = y;
      dout[static_cast<Eigen::Index>(m / s_)] = dy;
    }
  }
}

void MagnusMarcher::march_right(double k2, cd y, cd dy, CVec& out, CVec& dout) const {
  const std::size_t N = grid_.N;
  out.resize(static_cast<Eigen::Index>(N));
  dout.resize(static_cast<Eigen::Index>(N));
  out[0] = y;
  dout[0] = dy;
  const std::size_t last = (N - 1) * s_;
  for (std::size_t m = 0; m < last; ++m) {
    magnus_step(delta_, g1_[m] - k2, g2_[m] - k2, y, dy);
    if ((m + 1) % s_ == 0) {
      out[static_cast<Eigen::Index>((m + 1) / s_)] = y;
      dout[static_cast<Eigen::Index>((m + 1) / s_)] = dy;
    }
  }
}

JostPair solve_jost(const Potential& V, double k, const JostOptions& opt) {
  require_wavenumber(k, opt);
  require_decay(V);
  const Grid& g = V.grid;
  const auto n = static_cast<Eigen::Index>(g.N);
  const cd ik(0.0, k);
  CVec f1(n), f2(n), d1(n), d2(n);
  if (V.is_zero()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = g.x(static_cast<std::size_t>(i));
      f1[i] = std::polar(1.0, k * x);
      f2[i] = std::polar(1.0, -k * x);
      d1[i] = ik * f1[i];
      d2[i] = -ik * f2[i];
    }
  } else {
    MagnusMarcher marcher(V, opt.substeps);
    const cd edge = std::polar(1.0, k * g.L);
    marcher.march_left(k * k, edge, ik * edge, f1, d1);
    marcher.march_right(k * k, edge, -ik * edge, f2, d2);
  }
  std::vector<double> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
  CVec W = f1.cwiseProduct(d2) - d1.cwiseProduct(f2);
  for (Eigen::Index i = 0; i < n; ++i) {
    re[static_cast<std::size_t>(i)] = W[i].real();
    im[static_cast<std::size_t>(i)] = W[i].imag();
  }
  const cd med(component_median(re), component_median(im));
  double dev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) dev = std::max(dev, std::abs(W[i] - med));
  if (!f1.allFinite() || !f2.allFinite()) throw Error("solve_jost: integrator diverged");
  JostPair jp{k,
              GridFunction(g, std::move(f1)),
              GridFunction(g, std::move(f2)),
              GridFunction(g, std::move(d1)),
              GridFunction(g, std::move(d2)),
              med,
              dev / std::abs(med)};
  return jp;
}

ScatteringData scattering_coefficients(const Potential& V, double k, const JostOptions& opt) {
  const JostPair jp = solve_jost(V, k, opt);
  if (resonant(jp.wronskian, k)) throw ResonanceError("scattering_coefficients: |W(k)| below threshold");
  const Grid& g = V.grid;
  const cd ik(0.0, k);
  const double x0 = g.x(0), xl = g.x(g.N - 1);
  // f1 = A e^{ikx} + B e^{-ikx} on the left edge.
  const cd A = 0.5 * (jp.f1[0] + jp.f1_deriv[0] / ik) * std::polar(1.0, -k * x0);
  const cd B = 0.5 * (jp.f1[0] - jp.f1_deriv[0] / ik) * std::polar(1.0, k * x0);
  // f2 = C e^{-ikx} + D e^{ikx} on the right edge.
  const std::size_t r = g.N - 1;
  const cd C = 0.5 * (jp.f2[r] - jp.f2_deriv[r] / ik) * std::polar(1.0, k * xl);
  const cd D = 0.5 * (jp.f2[r] + jp.f2_deriv[r] / ik) * std::polar(1.0, -k * xl);
  ScatteringData sd;
  sd.k = k;
  sd.wronskian = jp.wronskian;
  sd.t = -2.0 * ik / jp.wronskian;
  sd.r1 = B / A;
  sd.r2 = D / C;
  return sd;
}

Classification classify_potential(const Potential& V, const JostOptions& opt) {
  require_decay(V);
  Classification c;
  const double l1 = weighted_l1(V, 0.0);
  c.threshold = 1e-6 * l1;
  if (V.is_zero()) {
    c.wronskian_at_zero = 0.0;
    c.a_limit = 1.0;
  } else {
    MagnusMarcher marcher(V, opt.substeps);
    CVec f, df;
    marcher.march_left(0.0, 1.0, 0.0, f, df);
    // f2 = 1, f2' = 0 on the left edge.
    c.wronskian_at_zero = -df[0];
    c.a_limit = f[0].real();
  }
  const double w = std::abs(c.wronskian_at_zero);
  c.kind = w > c.threshold ? Kind::Generic : Kind::Exceptional;
  c.flagged = c.kind == Kind::Exceptional && (w > 0.0 || w == c.threshold);
  return c;
}

ResolventKernel resolvent_kernel(const Potential& V, double k, const JostOptions& opt) {
  const JostPair jp = solve_jost(V, k, opt);
  if (resonant(jp.wronskian, k)) throw ResonanceError("resolvent_kernel: |W(k)| below threshold");
  const auto n = static_cast<Eigen::Index>(V.grid.N);
  ResolventKernel R{V.grid, k, jp.wronskian, Eigen::MatrixXcd(n, n)};
  const CVec& f1 = jp.f1.values();
  const CVec& f2 = jp.f2.values();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      R.G(i, j) = (i >= j ? f1[i] * f2[j] : f1[j] * f2[i]) / jp.wronskian;
  return R;
}

namespace {

// Trapezoid weights with 4th-order end corrections on [a, b] (inclusive node range).
double piece_weight(Eigen::Index j, Eigen::Index a, Eigen::Index b) {
  static constexpr double c[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
  const Eigen::Index n = b - a + 1;
  if (n < 2) return 0.0;
  if (n < 8) return (j == a || j == b) ? 0.5 : 1.0;
  const Eigen::Index from_a = j - a, from_b = b - j;
  if (from_a < 4) return c[from_a];
  if (from_b < 4) return c[from_b];
  return 1.0;
}

}  // namespace

CVec apply_resolvent(const ResolventKernel& R, const CVec& g) {
  const Eigen::Index n = R.G.rows();
  if (g.size() != n) throw PreconditionError("apply_resolvent: size mismatch");
  const double h = R.grid.h();
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cd acc = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) acc += piece_weight(j, 0, i) * R.G(i, j) * g[j];
    for (Eigen::Index j = i; j < n; ++j) acc += piece_weight(j, i, n - 1) * R.G(i, j) * g[j];
    out[i] = h * acc;
  }
  return out;
}

HypothesisReport check_hypotheses(const Potential& V, const JostOptions& opt) {
  HypothesisReport rep;
  rep.gamma = V.gamma;
  rep.weighted_l1 = weighted_l1(V, V.gamma);
  rep.l1_pass = std::isfinite(rep.weighted_l1);
  rep.edge_decay_pass = V.decayed_at_edges();

  const auto n = static_cast<Eigen::Index>(V.grid.N);
  const double h2 = V.grid.h() * V.grid.h();
  Eigen::VectorXd diag = V.samples.array() + 2.0 / h2;
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -1.0 / h2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.h2_pass = rep.min_eigenvalue >= -1e-8;
  if (rep.edge_decay_pass) rep.classification = classify_potential(V, opt);
  return rep;
}

}  // namespace dft
