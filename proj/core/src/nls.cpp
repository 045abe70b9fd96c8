#include "dft/nls.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dft/errors.hpp"

namespace dft {

Scheme parse_scheme(const std::string& name) {
  if (name == "strang") return Scheme::Strang;
  if (name == "duhamel-rk2") return Scheme::DuhamelRK2;
  throw ConfigError("unknown scheme '" + name + "' (strang, duhamel-rk2)");
}

std::string to_string(Scheme s) { return s == Scheme::Strang ? "strang" : "duhamel-rk2"; }

std::string to_string(Verdict v) {
  return v == Verdict::ScatteringConsistent ? "scattering-consistent" : "inconclusive";
}

double Trajectory::mass_drift() const {
  if (steps.empty() || steps.front().mass == 0.0) return 0.0;
  const double n0 = std::sqrt(steps.front().mass);
  double drift = 0.0;
  for (const auto& d : steps) drift = std::max(drift, std::abs(std::sqrt(d.mass) - n0) / n0);
  return drift;
}

void validate(const NLSConfig& cfg, const DistortedPlan& plan) {
  if (cfg.symbol.arity != 5) throw PreconditionError("nls: d = 1 requires a symbol of arity 5");
  if (!(cfg.dt > 0.0)) throw PreconditionError("nls: dt must be positive");
  if (!(cfg.horizon > 0.0)) throw PreconditionError("nls: horizon must be positive");
  if (cfg.store_every == 0) throw PreconditionError("nls: store_every must be positive");
  if (cfg.a_profile.size() > 0) {
    if (static_cast<std::size_t>(cfg.a_profile.size()) != plan.grid().N)
      throw PreconditionError("nls: coupling profile does not match the grid");
    if (!cfg.a_profile.allFinite()) throw PreconditionError("nls: coupling must be bounded");
  } else if (!std::isfinite(cfg.a)) {
    throw PreconditionError("nls: coupling must be bounded");
  }
}

namespace {

constexpr double kTwoPi52 = 98.95771135632306;  // (2 pi)^{5/2}

bool is_unit(const Symbol& m) { return m.name == "one"; }

RVec coupling(const NLSConfig& cfg, std::size_t n) {
  if (cfg.a_profile.size() > 0) return cfg.a_profile;
  return RVec::Constant(static_cast<Eigen::Index>(n), cfg.a);
}

double mass(const CVec& u, double h) { return h * u.squaredNorm(); }

}  // namespace

GridFunction nonlinearity(const DistortedPlan& plan, const NLSConfig& cfg, const GridFunction& u) {
  const Grid& g = plan.grid();
  if (is_unit(cfg.symbol)) {
    CVec v = u.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= kTwoPi52 * std::pow(std::norm(v[i]), 2);
    return GridFunction(g, v);
  }
  const GridFunction ub(g, u.values().conjugate());
  const std::vector<GridFunction> fs{ub, ub, u, u, u};
  if (cfg.symbol.has_separable()) return apply_T_separable(plan, cfg.symbol, fs);
  ExpansionOptions eo;
  eo.n_max = cfg.expansion_n_max;
  eo.verify = false;
  return apply_T_expansion(plan, cfg.symbol, fs, eo);
}

Trajectory nls_solve(const DistortedPlan& plan, const NLSConfig& cfg, const GridFunction& u0) {
  validate(cfg, plan);
  if (!(u0.grid() == plan.grid())) throw PreconditionError("nls: initial data grid does not match plan grid");
  const Grid& g = plan.grid();
  const double h = g.h();
  const RVec a = coupling(cfg, g.N);
  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));

  auto phase = [&](double t) -> Multiplier { return [t](double xi) { return std::polar(1.0, t * xi * xi); }; };
  auto to_state = [&](const Spectrum& w, double t) { return dft_inverse(plan, multiply(plan, phase(t), w)).values(); };
  auto to_spectrum = [&](const CVec& v, double t) {
    return multiply(plan, phase(-t), dft_forward(plan, GridFunction(g, v))).values();
  };
  // u_t = -i a F(u)
  auto rhs = [&](const CVec& u) -> CVec {
    const CVec F = nonlinearity(plan, cfg, GridFunction(g, u)).values();
    return cd(0.0, -1.0) * a.cast<cd>().cwiseProduct(F);
  };
  auto nonlinear_flow = [&](const CVec& u, double tau) -> CVec {
    if (is_unit(cfg.symbol)) {
      CVec v = u;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] *= std::polar(1.0, -a[i] * kTwoPi52 * std::pow(std::norm(v[i]), 2) * tau);
      return v;
    }
    const CVec k1 = rhs(u);
    const CVec k2 = rhs(u + 0.5 * tau * k1);
    const CVec k3 = rhs(u + 0.5 * tau * k2);
    const CVec k4 = rhs(u + tau * k3);
    return u + tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  Trajectory traj;
  Spectrum w = dft_forward(plan, u0);
  CVec u = u0.values();
  const double m0 = mass(u, h);
  double l6 = 0.0;
  auto record = [&](std::size_t n) {
    StepDiagnostics d{static_cast<double>(n) * cfg.dt, mass(u, h), u.cwiseAbs().maxCoeff(), l6};
    traj.steps.push_back(d);
    if (n % cfg.store_every == 0 || n == steps) {
      traj.times.push_back(d.t);
      traj.states.emplace_back(g, u);
      traj.stored.push_back(d);
    }
    if (m0 > 0.0 && std::abs(d.mass - m0) / m0 > cfg.mass_drift_limit) {
      traj.aborted = true;
      traj.abort_reason = "mass drift above limit";
    } else if (d.sup > 1.0 / h) {
      traj.aborted = true;
      traj.abort_reason = "sup norm above 1/h";
    } else if (!u.allFinite()) {
      traj.aborted = true;
      traj.abort_reason = "non-finite state";
    }
  };

  record(0);
  for (std::size_t n = 1; n <= steps && !traj.aborted; ++n) {
    const double t0 = static_cast<double>(n - 1) * cfg.dt;
    const double t1 = static_cast<double>(n) * cfg.dt;
    l6 += cfg.dt * std::pow(lp_norm(u, h, 6.0), 6.0);
    CVec wv = w.values();
    if (cfg.scheme == Scheme::Strang) {
      wv += to_spectrum(nonlinear_flow(u, 0.5 * cfg.dt) - u, t0);
      const CVec mid = to_state(Spectrum(plan.axis(), wv), t1);
      wv += to_spectrum(nonlinear_flow(mid, 0.5 * cfg.dt) - mid, t1);
    } else {
      const CVec k1 = to_spectrum(rhs(u), t0);
      const CVec star = to_state(Spectrum(plan.axis(), wv + cfg.dt * k1), t1);
      const CVec k2 = to_spectrum(rhs(star), t1);
      wv += 0.5 * cfg.dt * (k1 + k2);
    }
    w = Spectrum(plan.axis(), wv);
    u = to_state(w, t1);
    record(n);
  }
  if (traj.aborted && (traj.times.empty() || traj.times.back() != traj.steps.back().t)) {
    traj.times.push_back(traj.steps.back().t);
    traj.states.emplace_back(g, u);
    traj.stored.push_back(traj.steps.back());
  }
  return traj;
}

std::vector<GridFunction> interaction_profile(const DistortedPlan& plan, const Trajectory& traj) {
  if (traj.states.empty()) throw PreconditionError("interaction_profile: empty trajectory");
  std::vector<GridFunction> v;
  v.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    v.push_back(traj.times[i] == 0.0 ? traj.states[i] : propagator(plan, -traj.times[i], traj.states[i]));
  return v;
}

ScatteringReport scattering_extract(const DistortedPlan& plan, const Trajectory& traj,
                                    const ScatteringThresholds& th) {
  if (traj.aborted) throw BlowUpError("scattering_extract: trajectory aborted (" + traj.abort_reason + ")");
  ScatteringReport rep;
  rep.times = traj.times;
  rep.profiles = interaction_profile(plan, traj);
  const std::size_t n = rep.profiles.size();
  const double h = plan.grid().h();
  rep.residuals = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = std::sqrt(h) * (rep.profiles[j].values() - rep.profiles[i].values()).norm();
      rep.residuals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
      rep.residuals(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
    }
  rep.u0_norm = lp_norm(traj.states.front(), 2.0);
  rep.threshold = th.final_fraction * rep.u0_norm;

  const double T = rep.times.back();
  auto nearest = [&](double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(rep.times[i] - t) < std::abs(rep.times[best] - t)) best = i;
    return best;
  };
  std::vector<std::size_t> idx;
  for (double f : {0.125, 0.25, 0.5, 1.0}) idx.push_back(nearest(f * T));
  for (std::size_t i : idx) rep.window_edges.push_back(rep.times[i]);
  for (std::size_t w = 0; w + 1 < idx.size(); ++w)
    rep.window_residuals.push_back(
        rep.residuals(static_cast<Eigen::Index>(idx[w]), static_cast<Eigen::Index>(idx[w + 1])));
  rep.final_residual = rep.window_residuals.back();

  const double floor = th.floor * rep.u0_norm;
  bool decreasing = true;
  for (std::size_t w = 0; w + 1 < rep.window_residuals.size(); ++w)
    if (!(rep.window_residuals[w + 1] < rep.window_residuals[w] || rep.window_residuals[w + 1] <= floor))
      decreasing = false;
  rep.verdict = decreasing && rep.final_residual < rep.threshold ? Verdict::ScatteringConsistent
                                                                  : Verdict::Inconclusive;
  rep.u_plus = rep.profiles.back().values();
  rep.u_plus_flat = wave_operator(plan, rep.profiles.back(), Direction::Adjoint).values();
  return rep;
}

namespace {

constexpr char kMagic[8] = {'D', 'F', 'T', 'T', 'R', 'A', 'J', '1'};

template <class T>
void put(std::ostream& os, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), sizeof(T))) throw Error("trajectory file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::string& path) {
  if (traj.states.empty()) throw PreconditionError("write_trajectory: empty trajectory");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  const Grid& g = traj.states.front().grid();
  os.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(os, g.N);
  put<double>(os, g.L);
  put<std::uint64_t>(os, traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    put<double>(os, traj.times[i]);
    for (std::size_t k = 0; k < g.N; ++k) {
      put<double>(os, traj.states[i][k].real());
      put<double>(os, traj.states[i][k].imag());
    }
  }
  if (!os) throw Error("write failed: " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error("not a trajectory file: " + path);
  const auto N = get<std::uint64_t>(is);
  const double L = get<double>(is);
  const auto count = get<std::uint64_t>(is);
  const Grid g = make_grid(L, N);
  Trajectory traj;
  for (std::uint64_t i = 0; i < count; ++i) {
    traj.times.push_back(get<double>(is));
    CVec v(static_cast<Eigen::Index>(N));
    for (std::uint64_t k = 0; k < N; ++k) {
      const double re = get<double>(is);
      v[static_cast<Eigen::Index>(k)] = cd(re, get<double>(is));
    }
    StepDiagnostics d{traj.times.back(), g.h() * v.squaredNorm(), v.cwiseAbs().maxCoeff(), 0.0};
    traj.stored.push_back(d);
    traj.states.emplace_back(g, std::move(v));
  }
  return traj;
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "step,t,mass,sup,l6_accum\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& d = traj.steps[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%.12g\n", i, d.t, d.mass, d.sup, d.l6_accum);
    os << buf;
  }
}

}  // namespace dft
