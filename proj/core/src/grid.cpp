#include "dft/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "dft/errors.hpp"

namespace dft {

RVec Grid::nodes() const {
  RVec x(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) x[static_cast<Eigen::Index>(i)] = this->x(i);
  return x;
}

RVec FrequencyAxis::nodes() const {
  RVec k(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) k[static_cast<Eigen::Index>(j)] = xi(j);
  return k;
}

RVec Grid::frequencies() const {
  RVec k(static_cast<Eigen::Index>(N));
  for (std::size_t j = 0; j < N; ++j) k[static_cast<Eigen::Index>(j)] = xi(j);
  return k;
}

Grid make_grid(double L, std::size_t N) {
  if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("make_grid: L must be positive");
  if (N < 16) throw PreconditionError("make_grid: N must be at least 16");
  if (!std::has_single_bit(N)) throw PreconditionError("make_grid: N is not a power of two");
  return Grid{L, N};
}

namespace {

void require_finite(const CVec& v, const char* what) {
  if (!v.allFinite()) throw PreconditionError(std::string(what) + ": non-finite values");
}

}  // namespace

GridFunction::GridFunction(const Grid& grid, CVec values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.N)
    throw PreconditionError("GridFunction: length does not match grid");
  require_finite(values_, "GridFunction");
}

GridFunction GridFunction::zero(const Grid& grid) {
  return GridFunction(grid, CVec::Zero(static_cast<Eigen::Index>(grid.N)));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<cd(double)>& f) {
  CVec v(static_cast<Eigen::Index>(grid.N));
  for (std::size_t i = 0; i < grid.N; ++i) v[static_cast<Eigen::Index>(i)] = f(grid.x(i));
  return GridFunction(grid, std::move(v));
}

Spectrum::Spectrum(const FrequencyAxis& axis, CVec values) : axis_(axis), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != axis_.size())
    throw PreconditionError("Spectrum: length does not match grid");
  require_finite(values_, "Spectrum");
}

bool admissible_pair(double p_time, double q_space) {
  if (!(p_time >= 4.0) || !(q_space >= 2.0)) return false;
  const double lhs = 2.0 / p_time;
  const double rhs = 0.5 - (std::isinf(q_space) ? 0.0 : 1.0 / q_space);
  return std::abs(lhs - rhs) < 1e-12;
}

double lp_norm(const CVec& values, double weight, double p) {
  if (!(p > 0.0)) throw PreconditionError("lp_norm: p must be positive");
  if (values.size() == 0) return 0.0;
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) acc += std::pow(std::abs(values[i]) / scale, p);
  return scale * std::pow(weight * acc, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f.values(), f.grid().h(), p); }

double lp_norm(const Spectrum& g, double p) { return lp_norm(g.values(), g.axis().dxi(), p); }

double spacetime_norm(std::span<const GridFunction> traj, double dt, double p_time,
                      double q_space) {
  if (traj.empty()) throw PreconditionError("spacetime_norm: empty trajectory");
  if (!(dt > 0.0)) throw PreconditionError("spacetime_norm: dt must be positive");
  if (!(p_time > 0.0)) throw PreconditionError("spacetime_norm: p must be positive");
  if (std::isinf(p_time)) {
    double m = 0.0;
    for (const auto& u : traj) m = std::max(m, lp_norm(u, q_space));
    return m;
  }
  double acc = 0.0;
  for (const auto& u : traj) acc += std::pow(lp_norm(u, q_space), p_time);
  return std::pow(dt * acc, 1.0 / p_time);
}

Spectrum flat_dft(const GridFunction& f, std::size_t refine) {
  const Grid& g = f.grid();
  const FrequencyAxis ax = g.axis(refine);
  const std::size_t M = ax.size();
  if (refine == 0) throw PreconditionError("flat_dft: refine must be positive");
  std::vector<cd> in(M, cd(0.0)), out(M);
  // x_i xi_j = -L xi_j + 2 pi i (j - M/2 + 1/2) / M
  for (std::size_t i = 0; i < g.N; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    in[i] = f[i] * sign * std::polar(1.0, -kPi * static_cast<double>(i) / static_cast<double>(M));
  }
  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.fwd(out, in);
  const double c = g.h() / std::sqrt(2.0 * kPi);
  CVec v(static_cast<Eigen::Index>(M));
  for (std::size_t j = 0; j < M; ++j)
    v[static_cast<Eigen::Index>(j)] = c * std::polar(1.0, g.L * ax.xi(j)) * out[j];
  return Spectrum(ax, std::move(v));
}

GridFunction flat_idft(const Spectrum& s) {
  const FrequencyAxis& ax = s.axis();
  const Grid g{ax.L, ax.N};
  const std::size_t M = ax.size();
  std::vector<cd> in(M), out(M);
  for (std::size_t j = 0; j < M; ++j) in[j] = s[j] * std::polar(1.0, -g.L * ax.xi(j));
  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.inv(out, in);
  const double c = ax.dxi() / std::sqrt(2.0 * kPi);
  CVec v(static_cast<Eigen::Index>(g.N));
  for (std::size_t i = 0; i < g.N; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    v[static_cast<Eigen::Index>(i)] =
        c * sign * std::polar(1.0, kPi * static_cast<double>(i) / static_cast<double>(M)) * out[i];
  }
  return GridFunction(g, std::move(v));
}

GridFunction flat_multiplier(const GridFunction& f, const std::function<cd(double)>& m,
                             std::size_t refine) {
  const Spectrum s = flat_dft(f, refine);
  CVec v = s.values();
  for (std::size_t j = 0; j < s.size(); ++j) v[static_cast<Eigen::Index>(j)] *= m(s.axis().xi(j));
  return flat_idft(Spectrum(s.axis(), std::move(v)));
}

GridFunction flat_propagator(const GridFunction& f, double t, std::size_t refine) {
  return flat_multiplier(f, [t](double xi) { return std::polar(1.0, t * xi * xi); }, refine);
}

}  // namespace dft
