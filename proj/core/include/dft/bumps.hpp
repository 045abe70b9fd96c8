#pragma once

#include <string>
#include <vector>

namespace dft {

// psi = 1 on |t| <= 1, 0 on |t| >= 2, phi(t) = psi(t) - psi(2t).
struct BumpPair {
  enum class Shape { Smooth, Cosine, Polynomial };
  Shape shape = Shape::Polynomial;

  double step(double u) const;  // 0 for u <= 0, 1 for u >= 1
  double psi(double t) const;
  double phi(double t) const { return psi(t) - psi(2.0 * t); }
};

BumpPair::Shape parse_bump_shape(const std::string& name);

// Dyadic levels n_min, 2 n_min, ..., n_max with the low shell psi(2 xi / n_min).
struct DyadicRange {
  double n_min = 1.0 / 64.0;
  double n_max = 64.0;

  std::vector<double> levels() const;
  bool contains(double N) const;
};

// Default range [2^-6, 2^6] widened so that psi(xi / n_max) = 1 on the band.
DyadicRange default_dyadic_range(double xi_max);

}  // namespace dft
