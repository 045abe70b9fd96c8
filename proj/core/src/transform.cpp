#include "dft/transform.hpp"

#include <algorithm>
#include <cmath>

#include "dft/errors.hpp"

namespace dft {

std::size_t PlaneWaveTable::masked_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 0));
}

PlaneWaveTable build_plane_wave_table(const Potential& V, const PlanOptions& opt) {
  if (opt.require_hypotheses) {
    const HypothesisReport rep = check_hypotheses(V, opt.jost);
    if (!rep.edge_decay_pass) throw PreconditionError("plane waves: potential not decayed at edges");
    if (!rep.h2_pass) throw PreconditionError("plane waves: negative eigenvalue detected (H2 fails)");
  }
  if (opt.xi_refine == 0) throw PreconditionError("plane waves: xi_refine must be positive");
  const Grid& g = V.grid;
  const auto n = static_cast<Eigen::Index>(g.N);
  PlaneWaveTable T;
  T.grid = g;
  T.axis = g.axis(opt.xi_refine);
  T.potential = V;
  T.substeps = opt.jost.substeps;
  T.xi = T.axis.nodes();
  const auto M = static_cast<Eigen::Index>(T.axis.size());
  T.active.assign(T.axis.size(), 1);
  T.E.resize(n, M);
  T.E_deriv.resize(n, M);
  T.transmission.assign(T.axis.size(), cd(1.0));
  T.wronskian.assign(T.axis.size(), cd(0.0));

  if (V.is_zero()) {
    for (Eigen::Index j = 0; j < M; ++j) {
      const double xi = T.xi[j];
      T.wronskian[static_cast<std::size_t>(j)] = cd(0.0, -2.0 * std::abs(xi));
      if (std::abs(xi) < opt.xi_min) T.active[static_cast<std::size_t>(j)] = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const cd e = std::polar(1.0, xi * g.x(static_cast<std::size_t>(i)));
        T.E(i, j) = e;
        T.E_deriv(i, j) = cd(0.0, xi) * e;
      }
    }
    return T;
  }

  const MagnusMarcher marcher(V, opt.jost.substeps);
  const double x0 = g.x(0), xl = g.x(g.N - 1);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (Eigen::Index j = 0; j < M; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double xi = T.xi[j];
    const double k = std::abs(xi);
    const cd ik(0.0, k);
    CVec f, df;
    cd W;
    const cd edge = std::polar(1.0, k * g.L);
    if (xi > 0.0) {
      marcher.march_left(k * k, edge, ik * edge, f, df);
      const cd f2 = std::polar(1.0, -k * x0);
      W = f[0] * (-ik) * f2 - df[0] * f2;
    } else {
      marcher.march_right(k * k, edge, -ik * edge, f, df);
      const cd f1 = std::polar(1.0, k * xl);
      W = f1 * df[n - 1] - ik * f1 * f[n - 1];
    }
    T.wronskian[ju] = W;
    if (k < opt.xi_min || resonant(W, k)) {
      T.active[ju] = 0;
      T.transmission[ju] = 0.0;
      T.E.col(j).setZero();
      T.E_deriv.col(j).setZero();
      continue;
    }
    const cd t = -2.0 * ik / W;
    T.transmission[ju] = t;
    T.E.col(j) = t * f;
    T.E_deriv.col(j) = t * df;
  }
  return T;
}

namespace {

constexpr double kStencil10[6] = {-5269.0 / 1800.0, 5.0 / 3.0,    -5.0 / 21.0,
                                  5.0 / 126.0,      -5.0 / 1008.0, 1.0 / 3150.0};

double stencil10_floor(double xi, double h) {
  const double th = xi * h;
  double sym = kStencil10[0];
  for (int m = 1; m <= 5; ++m) sym += 2.0 * kStencil10[m] * std::cos(m * th);
  return std::abs(-sym - th * th) / (h * h);
}

}  // namespace

EigenResidualReport eigen_residual(const PlaneWaveTable& table) {
  const Grid& g = table.grid;
  const auto n = static_cast<Eigen::Index>(g.N);
  const double h = g.h();
  const auto M = static_cast<Eigen::Index>(table.axis.size());
  EigenResidualReport rep;
  rep.per_column = RVec::Constant(M, std::nan(""));
  rep.resolved.assign(table.axis.size(), 0);
  for (Eigen::Index j = 0; j < M; ++j) {
    if (!table.active[static_cast<std::size_t>(j)]) continue;
    const double xi = table.xi[j];
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 5; i < n - 5; ++i) {
      cd d2 = kStencil10[0] * table.E(i, j);
      for (int m = 1; m <= 5; ++m) d2 += kStencil10[m] * (table.E(i + m, j) + table.E(i - m, j));
      d2 /= h * h;
      const cd r = -d2 + (table.potential.samples[i] - xi * xi) * table.E(i, j);
      num += std::norm(r);
      den += std::norm(table.E(i, j));
    }
    const double res = std::sqrt(num / den);
    rep.per_column[j] = res;
    if (stencil10_floor(xi, h) < 1e-7) {
      rep.resolved[static_cast<std::size_t>(j)] = 1;
      ++rep.resolved_count;
      rep.max_resolved = std::max(rep.max_resolved, res);
    }
  }
  return rep;
}

double asymptotic_defect(const PlaneWaveTable& table, std::size_t j) {
  const Grid& g = table.grid;
  const auto n = static_cast<Eigen::Index>(g.N);
  const auto je = static_cast<Eigen::Index>(j);
  const double xi = table.xi[je];
  const double k = std::abs(xi);
  const cd ik(0.0, k);
  const Eigen::Index band = std::max<Eigen::Index>(1, n / 20);
  double scatter = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    scatter = std::max(scatter, std::abs(table.E(i, je) - std::polar(1.0, xi * g.x(static_cast<std::size_t>(i)))));
  // Free solution through the data at one node: A e^{ikx} + B e^{-ikx}.
  auto defect_from = [&](Eigen::Index anchor, Eigen::Index lo, Eigen::Index hi) {
    const double xa = g.x(static_cast<std::size_t>(anchor));
    const cd y = table.E(anchor, je), dy = table.E_deriv(anchor, je);
    const cd A = 0.5 * (y + dy / ik) * std::polar(1.0, -k * xa);
    const cd B = 0.5 * (y - dy / ik) * std::polar(1.0, k * xa);
    double d = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      const double x = g.x(static_cast<std::size_t>(i));
      d = std::max(d, std::abs(table.E(i, je) - A * std::polar(1.0, k * x) - B * std::polar(1.0, -k * x)));
    }
    return d;
  };
  const double d = std::max(defect_from(0, 0, band), defect_from(n - 1, n - band, n));
  return scatter > 1e-12 ? d / scatter : d;
}

DistortedPlan::DistortedPlan(PlaneWaveTable table)
    : table_(std::move(table)), dyadic_(default_dyadic_range(table_.grid.xi_max())) {}

namespace {

void require_grid(const DistortedPlan& plan, const Grid& g) {
  if (!(plan.grid() == g)) throw PreconditionError("function grid does not match plan grid");
}

void require_axis(const DistortedPlan& plan, const FrequencyAxis& a) {
  if (!(plan.axis() == a)) throw PreconditionError("spectrum axis does not match plan axis");
}

CVec masked(const DistortedPlan& plan, CVec v) {
  for (std::size_t j = 0; j < plan.size(); ++j)
    if (!plan.active(j)) v[static_cast<Eigen::Index>(j)] = 0.0;
  return v;
}

}  // namespace

Spectrum dft_forward(const DistortedPlan& plan, const GridFunction& f) {
  require_grid(plan, f.grid());
  CVec g = plan.table().E.adjoint() * f.values();
  g *= DistortedPlan::normalization() * plan.grid().h();
  return Spectrum(plan.axis(), masked(plan, std::move(g)));
}

GridFunction dft_inverse(const DistortedPlan& plan, const Spectrum& g) {
  require_axis(plan, g.axis());
  CVec f = plan.table().E * masked(plan, g.values());
  f *= DistortedPlan::normalization() * plan.axis().dxi();
  return GridFunction(plan.grid(), std::move(f));
}

GridFunction dft_inverse_deriv(const DistortedPlan& plan, const Spectrum& g) {
  require_axis(plan, g.axis());
  CVec f = plan.table().E_deriv * masked(plan, g.values());
  f *= DistortedPlan::normalization() * plan.axis().dxi();
  return GridFunction(plan.grid(), std::move(f));
}

GridFunction apply_H_fd(const Potential& V, const GridFunction& f, int order) {
  static const std::vector<double> c2 = {-2.0, 1.0};
  static const std::vector<double> c4 = {-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
  static const std::vector<double> c6 = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  const std::vector<double>* c = nullptr;
  switch (order) {
    case 2: c = &c2; break;
    case 4: c = &c4; break;
    case 6: c = &c6; break;
    default: throw PreconditionError("apply_H_fd: order must be 2, 4 or 6");
  }
  const auto n = static_cast<Eigen::Index>(f.size());
  const double h2 = f.grid().h() * f.grid().h();
  const CVec& u = f.values();
  CVec out(n);
  const auto w = static_cast<Eigen::Index>(c->size());
  for (Eigen::Index i = 0; i < n; ++i) {
    cd d2 = (*c)[0] * u[i];
    for (Eigen::Index m = 1; m < w; ++m) {
      const cd right = i + m < n ? u[i + m] : cd(0.0);
      const cd left = i - m >= 0 ? u[i - m] : cd(0.0);
      d2 += (*c)[static_cast<std::size_t>(m)] * (right + left);
    }
    out[i] = -d2 / h2 + V.samples[i] * u[i];
  }
  return GridFunction(f.grid(), std::move(out));
}

double verify_diagonalization(const DistortedPlan& plan, const GridFunction& f, int order) {
  const Spectrum lhs = dft_forward(plan, apply_H_fd(plan.potential(), f, order));
  const Spectrum rhs = multiply(plan, [](double xi) { return cd(xi * xi); }, dft_forward(plan, f));
  return (lhs.values() - rhs.values()).norm() / rhs.values().norm();
}

Spectrum multiply(const DistortedPlan& plan, const Multiplier& m, const Spectrum& g) {
  require_axis(plan, g.axis());
  CVec out(static_cast<Eigen::Index>(plan.size()));
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const auto je = static_cast<Eigen::Index>(j);
    if (!plan.active(j)) {
      out[je] = 0.0;
      continue;
    }
    const cd v = m(plan.xi(j));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw PreconditionError("multiplier is not finite at a frequency node");
    out[je] = v * g[j];
  }
  return Spectrum(plan.axis(), std::move(out));
}

GridFunction apply_multiplier(const DistortedPlan& plan, const Multiplier& m, const GridFunction& f) {
  return dft_inverse(plan, multiply(plan, m, dft_forward(plan, f)));
}

namespace {

void require_level(const DistortedPlan& plan, double N) {
  if (!plan.dyadic().contains(N)) throw PreconditionError("dyadic level outside the covered range");
}

}  // namespace

GridFunction lp_project(const DistortedPlan& plan, const GridFunction& f, double N) {
  require_level(plan, N);
  const BumpPair& b = plan.bumps();
  return apply_multiplier(plan, [&](double xi) { return cd(b.phi(xi / N)); }, f);
}

GridFunction lp_project_leq(const DistortedPlan& plan, const GridFunction& f, double N) {
  require_level(plan, N);
  const BumpPair& b = plan.bumps();
  return apply_multiplier(plan, [&](double xi) { return cd(b.psi(xi / N)); }, f);
}

GridFunction lp_low(const DistortedPlan& plan, const GridFunction& f) {
  const BumpPair& b = plan.bumps();
  const double n0 = plan.dyadic().n_min;
  return apply_multiplier(plan, [&](double xi) { return cd(b.psi(2.0 * xi / n0)); }, f);
}

double square_function_norm(const DistortedPlan& plan, const GridFunction& f, double s, double p) {
  const Spectrum g = dft_forward(plan, f);
  const BumpPair& b = plan.bumps();
  const double n0 = plan.dyadic().n_min;
  RVec acc = RVec::Zero(static_cast<Eigen::Index>(plan.grid().N));
  auto add = [&](const Multiplier& m, double weight) {
    const GridFunction piece = dft_inverse(plan, multiply(plan, m, g));
    acc += weight * piece.values().cwiseAbs2();
  };
  for (double N : plan.dyadic().levels())
    add([&](double xi) { return cd(b.phi(xi / N)); }, std::pow(N, 2.0 * s));
  add([&](double xi) { return cd(b.psi(2.0 * xi / n0)); }, std::pow(0.5 * n0, 2.0 * s));
  return lp_norm(GridFunction(plan.grid(), acc.cwiseSqrt().cast<cd>()), p);
}

Grid extended_grid(const DistortedPlan& plan) {
  const FrequencyAxis& a = plan.axis();
  return Grid{static_cast<double>(a.refine) * a.L, a.size()};
}

GridFunction wave_operator(const DistortedPlan& plan, const GridFunction& f, Direction dir) {
  const Grid ext = extended_grid(plan);
  if (dir == Direction::Forward) {
    if (f.grid() == ext) return dft_inverse(plan, Spectrum(plan.axis(), flat_dft(f, 1).values()));
    require_grid(plan, f.grid());
    return dft_inverse(plan, flat_dft(f, plan.axis().refine));
  }
  require_grid(plan, f.grid());
  return flat_idft(Spectrum(ext.axis(1), dft_forward(plan, f).values()));
}

double low_frequency_fraction(const Spectrum& g) {
  const double total = g.values().squaredNorm();
  if (total == 0.0) return 0.0;
  const double cut = 2.0 * kPi / g.axis().L;
  double low = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.axis().xi(j)) < cut) low += std::norm(g[j]);
  return low / total;
}

GridFunction riesz_transform(const DistortedPlan& plan, const GridFunction& f) {
  const Spectrum g = dft_forward(plan, f);
  if (low_frequency_fraction(g) > 0.5)
    throw PreconditionError("riesz_transform: spectral mass concentrated at the excluded frequencies");
  return dft_inverse_deriv(plan, multiply(plan, [](double xi) { return cd(1.0 / std::abs(xi)); }, g));
}

GridFunction b_operator(const DistortedPlan& plan, const GridFunction& f) {
  const Spectrum g = dft_forward(plan, f);
  return dft_inverse_deriv(
      plan, multiply(plan, [](double xi) { return cd(1.0 / std::sqrt(1.0 + xi * xi)); }, g));
}

GridFunction propagator(const DistortedPlan& plan, double t, const GridFunction& f) {
  return apply_multiplier(plan, [t](double xi) { return std::polar(1.0, t * xi * xi); }, f);
}

std::vector<GridFunction> propagate_many(const DistortedPlan& plan, const GridFunction& f,
                                         const std::vector<double>& times) {
  const Spectrum g = dft_forward(plan, f);
  const auto n = static_cast<Eigen::Index>(plan.size());
  const auto nt = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXcd G(n, nt);
  for (Eigen::Index c = 0; c < nt; ++c)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xi = plan.xi(static_cast<std::size_t>(j));
      G(j, c) = g[static_cast<std::size_t>(j)] * std::polar(1.0, times[static_cast<std::size_t>(c)] * xi * xi);
    }
  Eigen::MatrixXcd U = plan.table().E * G;
  U *= DistortedPlan::normalization() * plan.axis().dxi();
  std::vector<GridFunction> out;
  out.reserve(times.size());
  for (Eigen::Index c = 0; c < nt; ++c) out.emplace_back(plan.grid(), U.col(c));
  return out;
}

double sobolev_sharp_norm(const DistortedPlan& plan, const GridFunction& f, double s, double p,
                          bool homogeneous) {
  if (!(p > 1.0)) throw PreconditionError("sobolev_sharp_norm: p must exceed 1");
  const Spectrum g = dft_forward(plan, f);
  if (s < 0.0 && low_frequency_fraction(g) > 0.5)
    throw PreconditionError("sobolev_sharp_norm: negative order with mass near excluded frequencies");
  const GridFunction d =
      dft_inverse(plan, multiply(plan, [s](double xi) { return cd(std::pow(std::abs(xi), s)); }, g));
  const double hom = lp_norm(d, p);
  return homogeneous ? hom : hom + lp_norm(f, p);
}

}  // namespace dft
