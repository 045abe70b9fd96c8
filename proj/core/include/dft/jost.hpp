#pragma once

#include <Eigen/Dense>

#include "dft/grid.hpp"
#include "dft/potential.hpp"

namespace dft {

// Wronskian convention used everywhere: W = f1 f2' - f1' f2, so W = -2ik for V = 0
// and t(k) = -2ik / W(k).

struct JostOptions {
  std::size_t substeps = 4;  // Magnus steps per grid cell
  double k_min = 1e-3;
};

struct JostPair {
  double k = 0.0;
  GridFunction f1, f2, f1_deriv, f2_deriv;
  cd wronskian;
  double wronskian_deviation = 0.0;  // max_x |W(x) - median| / |median|
};

struct ScatteringData {
  double k = 0.0;
  cd t, r1, r2, wronskian;
};

enum class Kind { Generic, Exceptional };

struct Classification {
  Kind kind = Kind::Exceptional;
  cd wronskian_at_zero;
  double threshold = 0.0;
  bool flagged = false;
  double a_limit = 0.0;  // f1(-L, 0), meaningful in the exceptional case
};

struct HypothesisReport {
  double gamma = 0.0;
  double weighted_l1 = 0.0;
  bool l1_pass = false;
  bool edge_decay_pass = false;
  double min_eigenvalue = 0.0;
  bool h2_pass = false;
  Classification classification;
  bool all_pass() const { return l1_pass && edge_decay_pass && h2_pass; }
};

struct ResolventKernel {
  Grid grid;
  double k = 0.0;
  cd wronskian;
  Eigen::MatrixXcd G;  // G(x_i, y_j)
};

// Magnus-4 marcher with V pre-sampled at the Gauss points of every substep.
class MagnusMarcher {
 public:
  MagnusMarcher(const Potential& V, std::size_t substeps);

  // From x = L with data (y, y') down to x_0; values and derivatives at the nodes.
  void march_left(double k2, cd y, cd dy, CVec& out, CVec& dout) const;
  // From x_0 with data (y, y') up to x_{N-1}.
  void march_right(double k2, cd y, cd dy, CVec& out, CVec& dout) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::size_t s_;
  double delta_;
  std::vector<double> g1_, g2_;
};

JostPair solve_jost(const Potential& V, double k, const JostOptions& opt = {});
ScatteringData scattering_coefficients(const Potential& V, double k, const JostOptions& opt = {});
Classification classify_potential(const Potential& V, const JostOptions& opt = {});
ResolventKernel resolvent_kernel(const Potential& V, double k, const JostOptions& opt = {});
HypothesisReport check_hypotheses(const Potential& V, const JostOptions& opt = {});

// int G(x_i, y) g(y) dy with the kink at y = x_i handled by end-corrected
// trapezoid pieces on each side.
CVec apply_resolvent(const ResolventKernel& R, const CVec& g);

bool resonant(cd W, double k);

}  // namespace dft
