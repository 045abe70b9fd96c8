#pragma once

#include <functional>
#include <string>

#include "dft/grid.hpp"

namespace dft {

// Real potential sampled on a grid together with a continuous evaluator.
// Shipped families: "zero", "sech2" (c sech^2(x/w)), "gaussian" (c exp(-(x/w)^2)),
// and "custom" (two-column file, linear interpolation).
struct Potential {
  std::string family;
  double c = 0.0;
  double w = 1.0;
  double gamma = 2.6;
  std::string decay = "exponential";
  Grid grid;
  RVec samples;
  std::function<double(double)> eval;

  bool is_zero() const { return family == "zero"; }
  double max_abs() const;
  // |V(+-L)| < 1e-10 max|V|.
  bool decayed_at_edges() const;
  GridFunction as_grid_function() const;
};

Potential make_potential(const std::string& family, const Grid& grid, double c = 0.0,
                         double w = 1.0, double gamma = 2.6);
Potential load_potential(const std::string& path, const Grid& grid, double gamma = 2.6);
// Same family and parameters sampled on another grid.
Potential resample(const Potential& V, const Grid& grid);

// int |V| (1+|x|)^gamma dx by the trapezoid rule.
double weighted_l1(const Potential& V, double gamma);

}  // namespace dft
