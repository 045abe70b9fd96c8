#include "dft/bumps.hpp"

#include <cmath>

#include "dft/errors.hpp"
#include "dft/grid.hpp"

namespace dft {

double BumpPair::step(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  switch (shape) {
    case Shape::Smooth: {
      const double a = std::exp(-1.0 / u);
      const double b = std::exp(-1.0 / (1.0 - u));
      return a / (a + b);
    }
    case Shape::Cosine:
      return 0.5 * (1.0 - std::cos(kPi * u));
    case Shape::Polynomial:
      return u * u * u * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
  }
  return 0.0;
}

double BumpPair::psi(double t) const { return step(2.0 - std::abs(t)); }

BumpPair::Shape parse_bump_shape(const std::string& name) {
  if (name == "smooth") return BumpPair::Shape::Smooth;
  if (name == "cosine") return BumpPair::Shape::Cosine;
  if (name == "polynomial") return BumpPair::Shape::Polynomial;
  throw PreconditionError("unknown bump shape: " + name);
}

std::vector<double> DyadicRange::levels() const {
  std::vector<double> out;
  for (double N = n_min; N <= n_max * (1.0 + 1e-12); N *= 2.0) out.push_back(N);
  return out;
}

bool DyadicRange::contains(double N) const {
  if (!(N >= n_min * (1.0 - 1e-12) && N <= n_max * (1.0 + 1e-12))) return false;
  const double e = std::log2(N);
  return std::abs(e - std::round(e)) < 1e-12;
}

DyadicRange default_dyadic_range(double xi_max) {
  DyadicRange r;
  while (r.n_max < xi_max) r.n_max *= 2.0;
  return r;
}

}  // namespace dft
