#include "dft/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "dft/errors.hpp"

namespace dft {

double Potential::max_abs() const { return samples.size() ? samples.cwiseAbs().maxCoeff() : 0.0; }

bool Potential::decayed_at_edges() const {
  const double m = max_abs();
  if (m == 0.0) return true;
  return std::abs(eval(-grid.L)) < 1e-10 * m && std::abs(eval(grid.L)) < 1e-10 * m;
}

GridFunction Potential::as_grid_function() const {
  return GridFunction(grid, samples.cast<cd>());
}

namespace {

void fill_samples(Potential& V) {
  V.samples.resize(static_cast<Eigen::Index>(V.grid.N));
  for (std::size_t i = 0; i < V.grid.N; ++i)
    V.samples[static_cast<Eigen::Index>(i)] = V.eval(V.grid.x(i));
  if (!V.samples.allFinite()) throw PreconditionError("potential: non-finite samples");
}

}  // namespace

Potential make_potential(const std::string& family, const Grid& grid, double c, double w,
                         double gamma) {
  Potential V;
  V.family = family;
  V.c = c;
  V.w = w;
  V.gamma = gamma;
  V.grid = grid;
  if (family == "zero") {
    V.c = 0.0;
    V.eval = [](double) { return 0.0; };
  } else if (family == "sech2") {
    if (!(w > 0.0)) throw PreconditionError("sech2: width must be positive");
    V.eval = [c, w](double x) {
      const double s = 1.0 / std::cosh(x / w);
      return c * s * s;
    };
  } else if (family == "gaussian") {
    if (!(w > 0.0)) throw PreconditionError("gaussian: width must be positive");
    V.eval = [c, w](double x) { return c * std::exp(-(x / w) * (x / w)); };
  } else {
    throw PreconditionError("unknown potential family: " + family);
  }
  fill_samples(V);
  return V;
}

Potential load_potential(const std::string& path, const Grid& grid, double gamma) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open potential file: " + path);
  auto xs = std::make_shared<std::vector<double>>();
  auto vs = std::make_shared<std::vector<double>>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0, v = 0.0;
    if (!(ls >> x >> v)) throw PreconditionError("malformed potential line: " + line);
    xs->push_back(x);
    vs->push_back(v);
  }
  if (xs->size() < 2) throw PreconditionError("potential file needs at least two rows");
  for (std::size_t i = 1; i < xs->size(); ++i)
    if (!((*xs)[i] > (*xs)[i - 1])) throw PreconditionError("potential abscissae must increase");

  Potential V;
  V.family = "custom";
  V.gamma = gamma;
  V.decay = "unknown";
  V.grid = grid;
  V.eval = [xs, vs](double x) {
    if (x <= xs->front() || x >= xs->back()) return 0.0;
    const auto it = std::upper_bound(xs->begin(), xs->end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs->begin());
    const double t = (x - (*xs)[j - 1]) / ((*xs)[j] - (*xs)[j - 1]);
    return (1.0 - t) * (*vs)[j - 1] + t * (*vs)[j];
  };
  fill_samples(V);
  return V;
}

Potential resample(const Potential& V, const Grid& grid) {
  Potential out = V;
  out.grid = grid;
  fill_samples(out);
  return out;
}

double weighted_l1(const Potential& V, double gamma) {
  double acc = 0.0;
  for (std::size_t i = 0; i < V.grid.N; ++i) {
    const double x = V.grid.x(i);
    acc += std::abs(V.samples[static_cast<Eigen::Index>(i)]) * std::pow(1.0 + std::abs(x), gamma);
  }
  return acc * V.grid.h();
}

}  // namespace dft
