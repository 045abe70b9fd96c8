#include "dft/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dft/errors.hpp"

namespace dft {

cd Symbol::from_factors(std::span<const double> xi) const {
  cd sum = 0.0;
  for (const SeparableTerm& t : separable) {
    cd prod = t.weight;
    for (std::size_t j = 0; j < t.factors.size(); ++j) prod *= t.factors[j](xi[j]);
    sum += prod;
  }
  return sum;
}

Symbol unit_symbol(std::size_t arity) {
  Symbol m;
  m.name = "one";
  m.arity = arity;
  m.eval = [](std::span<const double>) { return cd(1.0); };
  SeparableTerm t;
  t.factors.assign(arity, [](double) { return cd(1.0); });
  m.separable.push_back(std::move(t));
  m.homogeneous = true;
  return m;
}

Symbol make_symbol(const std::string& name, std::size_t arity) {
  if (arity < 2) throw PreconditionError("symbol arity must be at least 2");
  if (name == "one") return unit_symbol(arity);
  Symbol m;
  m.name = name;
  m.arity = arity;
  if (name == "cm-ratio") {
    m.eval = [](std::span<const double> xi) {
      double s = 0.0;
      for (double v : xi) s += std::abs(v);
      return s > 0.0 ? cd(xi[0] / s) : cd(0.0);
    };
    m.homogeneous = true;
  } else if (name == "cm-angular") {
    m.eval = [](std::span<const double> xi) {
      double s = 0.0;
      for (double v : xi) s += v * v;
      return s > 0.0 ? cd(1.0 + xi[0] * xi[1] / s) : cd(1.0);
    };
    m.homogeneous = true;
  } else if (name == "separable-gauss-rank2") {
    m.eval = [](std::span<const double> xi) {
      double a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < xi.size(); ++j) {
        const double shift = (j + 1) % 2 == 0 ? 1.0 : -1.0;
        a += xi[j] * xi[j] / 8.0;
        b += (xi[j] - shift) * (xi[j] - shift) / 2.0;
      }
      return cd(std::exp(-a) + 0.5 * std::exp(-b));
    };
    SeparableTerm t1, t2;
    t2.weight = 0.5;
    for (std::size_t j = 0; j < arity; ++j) {
      const double shift = (j + 1) % 2 == 0 ? 1.0 : -1.0;
      t1.factors.emplace_back([](double x) { return cd(std::exp(-x * x / 8.0)); });
      t2.factors.emplace_back(
          [shift](double x) { return cd(std::exp(-(x - shift) * (x - shift) / 2.0)); });
    }
    m.separable = {std::move(t1), std::move(t2)};
  } else {
    throw ConfigError("unknown symbol '" + name + "'");
  }
  return m;
}

double separable_defect(const Symbol& m) {
  if (!m.has_separable()) throw PreconditionError("symbol has no separable factors");
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(-8.0, 8.0);
  std::vector<double> xi(m.arity);
  double worst = 0.0;
  for (int s = 0; s < 512; ++s) {
    for (double& v : xi) v = U(rng);
    worst = std::max(worst, std::abs(m(xi) - m.from_factors(xi)));
  }
  return worst;
}

namespace {

constexpr double kD1[7] = {-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
constexpr double kD2[7] = {1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0,
                           3.0 / 2.0,  -3.0 / 20.0, 1.0 / 90.0};

// d^alpha m at xi by a tensor-product stencil.
cd mixed_derivative(const Symbol& m, const std::vector<double>& xi, const std::vector<int>& alpha,
                    double step) {
  std::vector<std::size_t> vars;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (alpha[j] > 0) vars.push_back(j);
  if (vars.empty()) return m(xi);
  std::vector<int> off(vars.size(), 0);
  std::vector<double> p = xi;
  cd sum = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      const double* c = alpha[vars[v]] == 1 ? kD1 : kD2;
      w *= c[off[v]];
      p[vars[v]] = xi[vars[v]] + (off[v] - 3) * step;
    }
    if (w != 0.0) sum += w * m(p);
    std::size_t v = 0;
    while (v < vars.size() && ++off[v] == 7) off[v++] = 0;
    if (v == vars.size()) break;
  }
  int total = 0;
  for (int a : alpha) total += a;
  return sum / std::pow(step, total);
}

std::vector<std::vector<int>> multi_indices(std::size_t k, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(k, 0);
  for (;;) {
    int total = 0;
    for (int v : a) total += v;
    if (total <= order) out.push_back(a);
    std::size_t j = 0;
    while (j < k && ++a[j] == 3) a[j++] = 0;
    if (j == k) break;
  }
  return out;
}

}  // namespace

SeminormReport cm_seminorm(const Symbol& m, int order) {
  if (order < 0) throw PreconditionError("cm_seminorm: order must be nonnegative");
  if (!m.eval) throw PreconditionError("cm_seminorm: symbol has no evaluator");
  const std::size_t k = m.arity;
  const auto alphas = multi_indices(k, order);

  // Directions on the unit l1 sphere, kept away from the coordinate hyperplanes.
  std::mt19937_64 rng(0xc0ffee);
  std::normal_distribution<double> G;
  std::vector<std::vector<double>> dirs;
  while (dirs.size() < 48) {
    std::vector<double> u(k);
    double s = 0.0;
    for (double& v : u) {
      v = G(rng);
      s += std::abs(v);
    }
    bool ok = true;
    for (double& v : u) {
      v /= s;
      if (std::abs(v) < 0.05) ok = false;
    }
    if (ok) dirs.push_back(std::move(u));
  }

  SeminormReport rep;
  for (int r = -4; r <= 8; ++r) {
    const double R = std::ldexp(1.0, r);
    double sup = 0.0;
    for (const auto& u : dirs) {
      std::vector<double> xi(k);
      for (std::size_t j = 0; j < k; ++j) xi[j] = R * u[j];
      for (const auto& a : alphas) {
        int total = 0;
        for (int v : a) total += v;
        const cd d = mixed_derivative(m, xi, a, 1e-2 * R);
        if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
          throw PreconditionError("cm_seminorm: derivative evaluation failed");
        sup = std::max(sup, std::abs(d) * std::pow(R, total));
      }
      ++rep.points;
    }
    rep.shell_sup.push_back(sup);
    rep.value = std::max(rep.value, sup);
  }
  const auto& s = rep.shell_sup;
  const double inner = std::max({s[0], s[1], s[2]});
  const double mid = std::max({s[3], s[4], s[5]});
  const double outer = std::max({s[s.size() - 1], s[s.size() - 2], s[s.size() - 3]});
  rep.growth = outer > 10.0 * mid || inner > 10.0 * mid;
  return rep;
}

}  // namespace dft
