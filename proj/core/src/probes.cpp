#include "dft/probes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dft/errors.hpp"

namespace dft {

GridFunction probe_sample(const Grid& g, std::uint64_t seed, std::size_t index,
                          const SampleOptions& opt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  const double W = opt.max_modulation;
  const double C = opt.center_range;
  const double wmin = opt.min_width;
  switch (index % 3) {
    case 0: {
      const double x0 = U(-C, C), sig = U(std::max(0.7, wmin), 2.0 + wmin), w = U(-W, W);
      const cd amp = std::polar(1.0, U(0.0, 2.0 * kPi));
      return GridFunction::sample(g, [=](double x) {
        return amp * std::exp(-(x - x0) * (x - x0) / (2.0 * sig * sig)) * std::polar(1.0, w * x);
      });
    }
    case 1: {
      // Packets at frequencies W, W/2, W/4 with widths 2/N, unit l2 coefficients.
      std::normal_distribution<double> G;
      struct Packet { double x0, freq, sig; cd c; };
      std::vector<Packet> ps;
      double norm = 0.0;
      for (int n = 0; n < 3; ++n) {
        const double N = std::max(W, 0.25) * std::ldexp(1.0, -n);
        const double sgn = U(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
        const cd c(G(rng), G(rng));
        norm += std::norm(c);
        ps.push_back({U(-C, C), sgn * N, std::max(2.0 / N, wmin), c});
      }
      for (auto& p : ps) p.c /= std::sqrt(norm);
      return GridFunction::sample(g, [ps](double x) {
        cd v = 0.0;
        for (const auto& p : ps)
          v += p.c * std::exp(-(x - p.x0) * (x - p.x0) / (2.0 * p.sig * p.sig)) * std::polar(1.0, p.freq * x);
        return v;
      });
    }
    default: {
      const int count = 3 + static_cast<int>(U(0.0, 4.0));
      const double spacing = U(1.5, 2.5), sig = U(wmin, wmin + 0.3), w = U(-W / 3.0, W / 3.0);
      const double start = -0.5 * spacing * (count - 1) + U(-1.0, 1.0);
      std::vector<double> amp(static_cast<std::size_t>(count));
      for (double& a : amp) a = (U(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * U(0.5, 1.0);
      return GridFunction::sample(g, [=](double x) {
        double v = 0.0;
        for (int m = 0; m < count; ++m) {
          const double c = start + m * spacing;
          v += amp[static_cast<std::size_t>(m)] * std::exp(-(x - c) * (x - c) / (2.0 * sig * sig));
        }
        return v * std::polar(1.0, w * x);
      });
    }
  }
}

GridFunction band_limit(const DistortedPlan& plan, const GridFunction& f, double band) {
  const BumpPair& b = plan.bumps();
  return apply_multiplier(plan, [&](double xi) { return cd(b.psi(2.0 * xi / band)); }, f);
}

void validate_hoelder(const std::vector<double>& exponents) {
  if (exponents.size() < 3) throw PreconditionError("exponents must list p_1..p_k and r'");
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < exponents.size(); ++j) {
    if (!(exponents[j] > 1.0)) throw PreconditionError("exponents p_j must exceed 1");
    sum += 1.0 / exponents[j];
  }
  const double r = exponents.back();
  if (!(r > 0.0)) throw PreconditionError("exponent r' must be positive");
  if (std::abs(sum - 1.0 / r) > 1e-12) throw PreconditionError("Hoelder relation sum 1/p_j = 1/r' fails");
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void summarize(ProbeReport& r) {
  r.samples = r.ratios.size();
  for (double v : r.ratios)
    if (!std::isfinite(v)) r.all_finite = false;
  for (double v : r.eps_ratios)
    if (!std::isfinite(v)) r.all_finite = false;
  r.max = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  r.median = median_of(r.ratios);
  if (!r.eps_ratios.empty()) {
    r.eps_max = *std::max_element(r.eps_ratios.begin(), r.eps_ratios.end());
    r.eps_median = median_of(r.eps_ratios);
  }
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return num / den;
}

std::vector<GridFunction> sample_tuple(const DistortedPlan& plan, std::size_t k, std::size_t index,
                                       const ProbeOptions& opt) {
  std::vector<GridFunction> fs;
  for (std::size_t l = 0; l < k; ++l) {
    GridFunction f = probe_sample(plan.grid(), opt.seed, k * index + l, opt.sample);
    fs.push_back(std::isfinite(opt.t.band) ? band_limit(plan, f, opt.t.band) : std::move(f));
  }
  return fs;
}

}  // namespace

ProbeReport cm_bound_probe(const DistortedPlan& plan, const Symbol& m,
                           const std::vector<double>& exponents, const ProbeOptions& opt) {
  validate_hoelder(exponents);
  const std::size_t k = exponents.size() - 1;
  if (k != m.arity) throw PreconditionError("cm_bound_probe: exponent count does not match arity");
  ProbeReport rep;
  rep.exponents = exponents;
  if (opt.epsilon > 0.0)
    for (std::size_t j = 0; j < k; ++j)
      rep.tilde_exponents.push_back(1.0 / (1.0 / exponents[j] + opt.epsilon / static_cast<double>(k)));
  rep.ratios.assign(opt.samples, 0.0);
  if (opt.epsilon > 0.0) rep.eps_ratios.assign(opt.samples, 0.0);
  std::vector<TPath> paths(opt.samples, TPath::Auto);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const std::vector<GridFunction> fs = sample_tuple(plan, k, i, opt);
    const TResult T = apply_T(plan, m, fs, opt.t);
    paths[i] = T.path;
    const double lhs = lp_norm(T.value, exponents.back());
    double prod = 1.0, tprod = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      prod *= lp_norm(fs[j], exponents[j]);
      if (opt.epsilon > 0.0) tprod *= lp_norm(fs[j], rep.tilde_exponents[j]);
    }
    rep.ratios[i] = safe_ratio(lhs, prod);
    if (opt.epsilon > 0.0) rep.eps_ratios[i] = safe_ratio(lhs, prod + tprod);
  }
  if (!paths.empty()) rep.path = paths.front();
  summarize(rep);
  return rep;
}

namespace {

double leibniz_rhs(const std::vector<double>& exponents, const std::vector<double>& lp,
                   const std::vector<double>& sob) {
  const std::size_t k = exponents.size() - 1;
  double prod = 1.0;
  for (std::size_t j = 0; j < k; ++j) prod *= lp[j];
  double sum = prod;
  for (std::size_t l = 0; l < k; ++l) {
    double term = sob[l];
    for (std::size_t j = 0; j < k; ++j)
      if (j != l) term *= lp[j];
    sum += term;
  }
  return sum;
}

}  // namespace

ProbeReport leibniz_probe(const DistortedPlan& plan, const Symbol& m, int s,
                          const std::vector<double>& exponents, const ProbeOptions& opt) {
  if (s != 1 && s != 2) throw PreconditionError("leibniz_probe: s must be 1 or 2");
  validate_hoelder(exponents);
  const std::size_t k = exponents.size() - 1;
  if (k != m.arity) throw PreconditionError("leibniz_probe: exponent count does not match arity");
  ProbeReport rep;
  rep.exponents = exponents;
  rep.ratios.assign(opt.samples, 0.0);
  std::vector<TPath> paths(opt.samples, TPath::Auto);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const std::vector<GridFunction> fs = sample_tuple(plan, k, i, opt);
    const TResult T = apply_T(plan, m, fs, opt.t);
    paths[i] = T.path;
    const double lhs = sobolev_sharp_norm(plan, T.value, s, exponents.back());
    std::vector<double> lp(k), sob(k);
    for (std::size_t j = 0; j < k; ++j) {
      lp[j] = lp_norm(fs[j], exponents[j]);
      sob[j] = sobolev_sharp_norm(plan, fs[j], s, exponents[j]);
    }
    rep.ratios[i] = safe_ratio(lhs, leibniz_rhs(exponents, lp, sob));
  }
  if (!paths.empty()) rep.path = paths.front();
  summarize(rep);
  return rep;
}

ProbeReport leibniz_probe_flat(const Grid& g, int s, const std::vector<double>& exponents,
                               const ProbeOptions& opt, std::size_t refine) {
  if (s != 1 && s != 2) throw PreconditionError("leibniz_probe: s must be 1 or 2");
  validate_hoelder(exponents);
  const std::size_t k = exponents.size() - 1;
  const BumpPair b;
  auto dsob = [&](const GridFunction& f, double p) {
    return lp_norm(flat_multiplier(f, [s](double xi) { return cd(std::pow(std::abs(xi), s)); }, refine), p);
  };
  ProbeReport rep;
  rep.exponents = exponents;
  rep.path = TPath::Separable;
  rep.ratios.assign(opt.samples, 0.0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (std::size_t i = 0; i < opt.samples; ++i) {
    std::vector<GridFunction> fs;
    for (std::size_t l = 0; l < k; ++l) {
      GridFunction f = probe_sample(g, opt.seed, k * i + l, opt.sample);
      if (std::isfinite(opt.t.band))
        f = flat_multiplier(f, [&](double xi) { return cd(b.psi(2.0 * xi / opt.t.band)); }, refine);
      fs.push_back(std::move(f));
    }
    CVec prod = CVec::Constant(static_cast<Eigen::Index>(g.N), std::pow(2.0 * kPi, 0.5 * static_cast<double>(k)));
    for (const auto& f : fs) prod = prod.cwiseProduct(f.values());
    const double lhs = dsob(GridFunction(g, prod), exponents.back());
    std::vector<double> lp(k), sob(k);
    for (std::size_t j = 0; j < k; ++j) {
      lp[j] = lp_norm(fs[j], exponents[j]);
      sob[j] = dsob(fs[j], exponents[j]);
    }
    rep.ratios[i] = safe_ratio(lhs, leibniz_rhs(exponents, lp, sob));
  }
  summarize(rep);
  return rep;
}

namespace {

void validate_admissible(double p, double q) {
  if (!admissible_pair(p, q)) throw PreconditionError("strichartz: (p, q) is not admissible in d = 1");
}

std::vector<double> time_stamps(const StrichartzOptions& opt) {
  if (!(opt.dt > 0.0) || !(opt.horizon > 0.0)) throw PreconditionError("strichartz: dt and horizon must be positive");
  const auto n = static_cast<std::size_t>(std::llround(opt.horizon / opt.dt));
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * opt.dt;
  return t;
}

}  // namespace

ProbeReport strichartz_probe(const DistortedPlan& plan, double p, double q, const StrichartzOptions& opt) {
  validate_admissible(p, q);
  const std::vector<double> times = time_stamps(opt);
  ProbeReport rep;
  rep.exponents = {p, q};
  rep.ratios.assign(opt.samples, 0.0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const GridFunction u0 = probe_sample(plan.grid(), opt.seed, i, opt.sample);
    const std::vector<GridFunction> traj = propagate_many(plan, u0, times);
    rep.ratios[i] = spacetime_norm(traj, opt.dt, p, q) / lp_norm(u0, 2.0);
  }
  summarize(rep);
  return rep;
}

ProbeReport strichartz_probe_flat(const Grid& g, double p, double q, const StrichartzOptions& opt,
                                  std::size_t refine) {
  validate_admissible(p, q);
  const std::vector<double> times = time_stamps(opt);
  ProbeReport rep;
  rep.exponents = {p, q};
  rep.ratios.assign(opt.samples, 0.0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opt.jobs))
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const GridFunction u0 = probe_sample(g, opt.seed, i, opt.sample);
    std::vector<GridFunction> traj;
    for (double t : times) traj.push_back(flat_propagator(u0, t, refine));
    rep.ratios[i] = spacetime_norm(traj, opt.dt, p, q) / lp_norm(u0, 2.0);
  }
  summarize(rep);
  return rep;
}

double refinement_change(const ProbeReport& coarse, const ProbeReport& fine) {
  if (!(coarse.max > 0.0)) return fine.max == 0.0 ? 0.0 : kInf;
  return std::abs(fine.max / coarse.max - 1.0);
}

}  // namespace dft
