#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dft/bumps.hpp"
#include "dft/grid.hpp"
#include "dft/jost.hpp"
#include "dft/potential.hpp"

namespace dft {

struct PlaneWaveTable {
  Grid grid;
  FrequencyAxis axis;
  Potential potential;
  RVec xi;                           // all nodes of axis
  std::vector<unsigned char> active;  // 0 for masked columns
  Eigen::MatrixXcd E;                // E(i, j) = e(x_i; xi_j)
  Eigen::MatrixXcd E_deriv;          // d/dx e(x_i; xi_j)
  std::vector<cd> transmission;      // t(|xi_j|)
  std::vector<cd> wronskian;         // W(|xi_j|)
  std::size_t substeps = 4;

  std::size_t masked_count() const;
};

struct PlanOptions {
  JostOptions jost;
  double xi_min = 1e-3;
  std::size_t xi_refine = 2;  // frequency spacing pi / (xi_refine * L)
  int jobs = 1;
  bool require_hypotheses = true;
};

PlaneWaveTable build_plane_wave_table(const Potential& V, const PlanOptions& opt = {});

struct EigenResidualReport {
  RVec per_column;          // NaN for masked columns
  std::vector<unsigned char> resolved;
  std::size_t resolved_count = 0;
  double max_resolved = 0.0;
};

// ||(-d^2 + V - xi^2) e||_2 / ||e||_2 on interior nodes with a 10th-order stencil.
// A column counts as resolved when the stencil's own error on e^{ix xi} is below 1e-7.
EigenResidualReport eigen_residual(const PlaneWaveTable& table);

// Sup over the outer 5% of nodes of the distance between e(.; xi_j) and its free
// asymptotic form, relative to sup |e - e^{ix xi}|.
double asymptotic_defect(const PlaneWaveTable& table, std::size_t j);

class DistortedPlan {
 public:
  explicit DistortedPlan(PlaneWaveTable table);

  const PlaneWaveTable& table() const { return table_; }
  const Grid& grid() const { return table_.grid; }
  const FrequencyAxis& axis() const { return table_.axis; }
  const Potential& potential() const { return table_.potential; }
  bool active(std::size_t j) const { return table_.active[j] != 0; }
  double xi(std::size_t j) const { return table_.xi[static_cast<Eigen::Index>(j)]; }
  std::size_t size() const { return table_.axis.size(); }
  const DyadicRange& dyadic() const { return dyadic_; }
  void set_dyadic(const DyadicRange& r) { dyadic_ = r; }
  const BumpPair& bumps() const { return bumps_; }
  void set_bumps(const BumpPair& b) { bumps_ = b; }

  static double normalization() { return 0.39894228040143267794; }  // (2 pi)^{-1/2}

 private:
  PlaneWaveTable table_;
  DyadicRange dyadic_;
  BumpPair bumps_;
};

using Multiplier = std::function<cd(double)>;

Spectrum dft_forward(const DistortedPlan& plan, const GridFunction& f);
GridFunction dft_inverse(const DistortedPlan& plan, const Spectrum& g);
// d/dx of the inverse transform through E_deriv.
GridFunction dft_inverse_deriv(const DistortedPlan& plan, const Spectrum& g);

// -f'' + V f with a centered finite-difference stencil of the given even order
// (2, 4 or 6), zero extension outside the grid.
GridFunction apply_H_fd(const Potential& V, const GridFunction& f, int order = 4);

double verify_diagonalization(const DistortedPlan& plan, const GridFunction& f, int order = 4);

Spectrum multiply(const DistortedPlan& plan, const Multiplier& m, const Spectrum& g);
GridFunction apply_multiplier(const DistortedPlan& plan, const Multiplier& m, const GridFunction& f);

GridFunction lp_project(const DistortedPlan& plan, const GridFunction& f, double N);
GridFunction lp_project_leq(const DistortedPlan& plan, const GridFunction& f, double N);
// Low shell psi(2 xi / n_min).
GridFunction lp_low(const DistortedPlan& plan, const GridFunction& f);

// ||(sum_N N^{2s} |P_N f|^2 + (n_min/2)^{2s} |P_low f|^2)^{1/2}||_p
double square_function_norm(const DistortedPlan& plan, const GridFunction& f, double s, double p);

// Grid [-rL, rL) with the plan spacing; its flat transform lives on the plan's
// frequency nodes and is exactly invertible there.
Grid extended_grid(const DistortedPlan& plan);

// Forward: Omega = distorted inverse o flat transform, input on the plan grid or the
// extended grid, output on the plan grid. Adjoint: Omega^* = flat inverse o distorted
// transform, output on the extended grid (it decays only like 1/x^2 when t(0) = 0).
enum class Direction { Forward, Adjoint };
GridFunction wave_operator(const DistortedPlan& plan, const GridFunction& f, Direction dir);

// d/dx |D|^{-1} f via E_deriv.
GridFunction riesz_transform(const DistortedPlan& plan, const GridFunction& f);
// d/dx <D>^{-1} f via E_deriv.
GridFunction b_operator(const DistortedPlan& plan, const GridFunction& f);

GridFunction propagator(const DistortedPlan& plan, double t, const GridFunction& f);
// e^{i t H} f for every t in times, one matrix product.
std::vector<GridFunction> propagate_many(const DistortedPlan& plan, const GridFunction& f,
                                         const std::vector<double>& times);

double sobolev_sharp_norm(const DistortedPlan& plan, const GridFunction& f, double s, double p,
                          bool homogeneous = true);

// Fraction of ||g||_2^2 carried by nodes with |xi| < 2 pi / L.
double low_frequency_fraction(const Spectrum& g);

// Binary plan cache keyed by a hash of (L, N, refine, substeps, V samples).
std::uint64_t plan_key(const Potential& V, std::size_t refine, std::size_t substeps);
std::string plan_cache_path(const std::string& dir, const Potential& V, std::size_t refine,
                            std::size_t substeps);
void save_plan(const PlaneWaveTable& table, const std::string& path);
std::optional<PlaneWaveTable> load_plan(const std::string& path, const Potential& V,
                                        std::size_t refine, std::size_t substeps);
// Load from dir when present, otherwise build and store.
PlaneWaveTable cached_plane_wave_table(const Potential& V, const PlanOptions& opt,
                                       const std::string& cache_dir);

}  // namespace dft
