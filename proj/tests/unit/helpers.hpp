#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <tuple>

#include "dft/transform.hpp"

namespace testing {

using namespace dft;

inline double rel(const CVec& a, const CVec& b) { return (a - b).norm() / b.norm(); }

inline GridFunction gauss(const Grid& g, double sigma, double x0 = 0.0, double k0 = 0.0) {
  return GridFunction::sample(g, [=](double x) {
    const double u = (x - x0) / sigma;
    return std::exp(-0.5 * u * u) * std::polar(1.0, k0 * x);
  });
}

// Plans are expensive; share them across test cases.
inline const DistortedPlan& plan(const std::string& family, double c, double L, std::size_t N) {
  static std::map<std::tuple<std::string, double, double, std::size_t>, std::unique_ptr<DistortedPlan>> cache;
  auto& slot = cache[{family, c, L, N}];
  if (!slot) {
    const Grid g = make_grid(L, N);
    PlanOptions o;
    o.jobs = 4;
    slot = std::make_unique<DistortedPlan>(build_plane_wave_table(make_potential(family, g, c, 1.0), o));
  }
  return *slot;
}

}  // namespace testing
