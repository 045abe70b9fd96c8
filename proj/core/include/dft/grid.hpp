#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dft {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Cell-centered frequency nodes xi_j = (j - M/2 + 1/2) * dxi, dxi = pi / (refine * L),
// M = refine * N. refine = 1 is the plain dual grid of the spatial grid.
struct FrequencyAxis {
  double L = 0.0;
  std::size_t N = 0;
  std::size_t refine = 1;

  std::size_t size() const { return N * refine; }
  double dxi() const { return kPi / (static_cast<double>(refine) * L); }
  double xi(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(size() / 2) + 0.5) * dxi();
  }
  RVec nodes() const;

  bool operator==(const FrequencyAxis& o) const {
    return L == o.L && N == o.N && refine == o.refine;
  }
};

// Uniform grid on [-L, L) with N nodes.
struct Grid {
  double L = 0.0;
  std::size_t N = 0;

  double h() const { return 2.0 * L / static_cast<double>(N); }
  double dxi() const { return kPi / L; }
  double x(std::size_t i) const { return -L + static_cast<double>(i) * h(); }
  double xi(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(N / 2) + 0.5) * dxi();
  }
  double xi_max() const { return xi(N - 1); }
  RVec nodes() const;
  RVec frequencies() const;
  FrequencyAxis axis(std::size_t refine = 1) const { return FrequencyAxis{L, N, refine}; }

  bool operator==(const Grid& o) const { return L == o.L && N == o.N; }
};

Grid make_grid(double L, std::size_t N);

class GridFunction {
 public:
  GridFunction(const Grid& grid, CVec values);
  static GridFunction zero(const Grid& grid);
  static GridFunction sample(const Grid& grid, const std::function<cd(double)>& f);

  const Grid& grid() const { return grid_; }
  const CVec& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  cd operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  Grid grid_;
  CVec values_;
};

// Samples on frequency nodes. Masked nodes carry zeros.
class Spectrum {
 public:
  Spectrum(const FrequencyAxis& axis, CVec values);

  const FrequencyAxis& axis() const { return axis_; }
  const CVec& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  cd operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }

 private:
  FrequencyAxis axis_;
  CVec values_;
};

struct NormSpec {
  double p = 2.0;
  double q = 0.0;  // time exponent, 0 when absent
  double s = 0.0;
  bool homogeneous = true;
};

// Admissible Strichartz pair in d=1: 2/p = 1/2 - 1/q with p >= 4.
bool admissible_pair(double p_time, double q_space);

double lp_norm(const GridFunction& f, double p);
double lp_norm(const Spectrum& g, double p);
double lp_norm(const CVec& values, double weight, double p);

// (dt * sum_t ||u(t)||_q^p)^{1/p}, left-endpoint weights.
double spacetime_norm(std::span<const GridFunction> traj, double dt, double p_time,
                      double q_space);

// Flat transform with the (2 pi)^{-1/2} convention evaluated on grid.axis(refine)
// (zero-padded FFT for refine > 1); flat_idft inverts it onto the spatial grid.
Spectrum flat_dft(const GridFunction& f, std::size_t refine = 1);
GridFunction flat_idft(const Spectrum& g);

// m(D) f and e^{-it d^2} f through the flat transform.
GridFunction flat_multiplier(const GridFunction& f, const std::function<cd(double)>& m,
                             std::size_t refine = 1);
GridFunction flat_propagator(const GridFunction& f, double t, std::size_t refine = 1);

}  // namespace dft
