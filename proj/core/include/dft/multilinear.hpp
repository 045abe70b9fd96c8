#pragma once

#include <span>
#include <string>
#include <vector>

#include "dft/expansion.hpp"
#include "dft/symbol.hpp"
#include "dft/transform.hpp"

namespace dft {

// T(f_1..f_k)(x) = int m(xi_1..xi_k) prod_j f_j^#(xi_j) e(x; xi_j) dxi.
// With the (2 pi)^{-1/2} transform, T(m = 1) = (2 pi)^{k/2} prod_j f_j.

inline constexpr std::size_t kDenseBudgetK2 = 256;
inline constexpr std::size_t kDenseBudgetK3 = 64;

// Active nodes with |xi| <= band.
std::vector<std::size_t> band_indices(const DistortedPlan& plan, double band);

// Direct tensor quadrature over the band. Inputs with relative spectral mass above
// 1e-8 outside the band are rejected.
GridFunction apply_T_dense(const DistortedPlan& plan, const Symbol& m,
                           std::span<const GridFunction> fs, double band = kInf);

GridFunction apply_T_separable(const DistortedPlan& plan, const Symbol& m,
                               std::span<const GridFunction> fs);

// Sum over the dyadic levels of the plan and the low piece of
// sum_n a(n) prod_j [modulated box-restricted inverse transform of f_j].
GridFunction apply_T_expansion(const DistortedPlan& plan, const Symbol& m,
                               std::span<const GridFunction> fs, const ExpansionOptions& opt = {});

// Flat oracle: direct k-fold sum over the flat spectra (refined frequency axis)
// of inputs band-limited to |xi| <= band, O(N * B^k).
GridFunction apply_T_flat(const Symbol& m, std::span<const GridFunction> fs, double band,
                          std::size_t refine = 2);

enum class TPath { Auto, Dense, Separable, Expansion };
TPath parse_t_path(const std::string& name);
std::string to_string(TPath p);

struct TOptions {
  TPath path = TPath::Auto;  // Auto: separable, then dense within budget, then expansion
  double band = kInf;
  ExpansionOptions expansion;
};

struct TResult {
  GridFunction value;
  TPath path;
};

TResult apply_T(const DistortedPlan& plan, const Symbol& m, std::span<const GridFunction> fs,
                const TOptions& opt = {});

struct LambdaResult {
  cd value;
  TPath path;
};

// h sum_i T(fs)(x_i) g(x_i).
LambdaResult lambda_form(const DistortedPlan& plan, const Symbol& m, std::span<const GridFunction> fs,
                         const GridFunction& g, const TOptions& opt = {});

struct GreenReport {
  cd lhs;
  cd rhs;
  double residual = 0.0;
};

// Weak form of |xi_1|^2 e_1 = H e_1 against k + 1 band-limited functions:
// Lambda(|xi_1|^2) = sum_{j>=2} Lambda(|xi_j|^2) - (k-1) int V prod - 2 sum_{2<=j<l} int (e_j' e_l' pair).
GreenReport green_identity_residual(const DistortedPlan& plan, std::span<const GridFunction> fs,
                                    double band = kInf);

}  // namespace dft
