#pragma once

#include <vector>

#include "dft/bumps.hpp"
#include "dft/symbol.hpp"

namespace dft {

// Tight: each piece of the max-shell decomposition on its own support box.
// Centered: the whole localized symbol on [-K/2, K/2]^k.
enum class ExpansionMode { Tight, Centered };

// One localized piece p(eta) = sum_n a(n) exp(2 pi i sum_j n_j (eta_j - lo_j) / width_j)
// on the box prod_j [lo_j, lo_j + width_j), eta = xi / N1.
struct ExpansionTerm {
  std::vector<double> lo;
  std::vector<double> width;
  std::vector<cd> coeffs;  // (2 n_max + 1)^k, index n_j + n_max, first variable slowest
};

struct CoefficientTable {
  double N1 = 1.0;
  double K = 8.0;
  std::size_t n_max = 8;
  std::size_t arity = 2;
  std::size_t lattice = 0;
  ExpansionMode mode = ExpansionMode::Tight;
  bool low = false;  // low piece prod_j psi(2 xi_j / N1)
  std::vector<ExpansionTerm> terms;

  std::vector<double> shell_max;  // max |a(n)| over sum |n_j| = s, all terms
  double decay_fit = 0.0;         // slope of log shell_max vs log(1 + s)
  bool shell_monotone = false;
  double reconstruction_error = 0.0;  // sup over a resampling lattice

  // Localized symbol in eta = xi / N1 units.
  cd localized(const Symbol& m, const BumpPair& b, std::span<const double> eta) const;
  // Partial sum of every term at eta.
  cd reconstruct(std::span<const double> eta) const;
};

struct ExpansionOptions {
  std::size_t n_max = 8;
  double K = 8.0;
  ExpansionMode mode = ExpansionMode::Tight;
  std::size_t lattice = 0;  // samples per axis, 0 picks max(4 n_max, min(128, 2^21^(1/k)))
  bool verify = true;       // fill reconstruction_error
};

ExpansionMode parse_expansion_mode(const std::string& name);

// Tensor DFT of the localized symbol m(N1 eta) (prod psi(eta_j) - prod psi(2 eta_j)),
// or m(N1 eta) prod psi(2 eta_j) when low is set.
CoefficientTable expand_symbol(const Symbol& m, const BumpPair& b, double N1,
                               const ExpansionOptions& opt = {}, bool low = false);

}  // namespace dft
