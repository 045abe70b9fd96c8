#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dft/grid.hpp"

namespace dft {

// One rank-one term weight * prod_j factors[j](xi_j).
struct SeparableTerm {
  cd weight = 1.0;
  std::vector<std::function<cd(double)>> factors;
};

struct Symbol {
  using Eval = std::function<cd(std::span<const double>)>;

  std::string name;
  std::size_t arity = 2;
  Eval eval;
  std::vector<SeparableTerm> separable;  // empty when no factorization is known
  bool homogeneous = false;              // m(lambda xi) = m(xi) for lambda > 0

  cd operator()(std::span<const double> xi) const { return eval(xi); }
  bool has_separable() const { return !separable.empty(); }
  // Value rebuilt from the separable factors.
  cd from_factors(std::span<const double> xi) const;
};

// Catalog: "one", "cm-ratio", "cm-angular", "separable-gauss-rank2".
Symbol make_symbol(const std::string& name, std::size_t arity);

// Symbol equal to 1 with a rank-one factorization.
Symbol unit_symbol(std::size_t arity);

// Sup of |m - from_factors| on a deterministic probe lattice.
double separable_defect(const Symbol& m);

struct SeminormReport {
  double value = 0.0;  // sup |d^alpha m| (sum |xi_j|)^{|alpha|}, |alpha| <= order
  std::vector<double> shell_sup;  // per radial shell R = 2^-4 .. 2^8
  bool growth = false;  // outer or inner shells exceed the unit shells by > 10x
  std::size_t points = 0;
};

// Mixed derivatives by tensor products of 6th-order central differences, step
// 1e-2 * sum |xi_j|, each variable differentiated at most twice.
SeminormReport cm_seminorm(const Symbol& m, int order);

}  // namespace dft
