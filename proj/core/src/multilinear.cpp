#include "dft/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dft/errors.hpp"

namespace dft {

namespace {

void require_inputs(const DistortedPlan& plan, const Symbol& m, std::span<const GridFunction> fs) {
  if (!m.eval) throw PreconditionError("symbol has no evaluator");
  if (fs.size() != m.arity) throw PreconditionError("arity mismatch between symbol and inputs");
  for (const GridFunction& f : fs)
    if (!(f.grid() == plan.grid())) throw PreconditionError("input grid does not match plan grid");
}

std::vector<Spectrum> spectra(const DistortedPlan& plan, std::span<const GridFunction> fs) {
  std::vector<Spectrum> out;
  out.reserve(fs.size());
  for (const GridFunction& f : fs) out.push_back(dft_forward(plan, f));
  return out;
}

void require_band_limited(const std::vector<Spectrum>& F, const std::vector<std::size_t>& idx) {
  for (const Spectrum& s : F) {
    const double total = s.values().squaredNorm();
    double inside = 0.0;
    for (std::size_t j : idx) inside += std::norm(s[j]);
    if (total > 0.0 && (total - inside) > 1e-8 * total)
      throw PreconditionError("input has spectral mass outside the dense band");
  }
}

// sum_n a(n) prod_l rows[l](x, n_l) for every x; a is row-major with the first
// variable slowest and R = rows[l].cols() entries per axis.
CVec contract(const std::vector<cd>& a, const std::vector<Eigen::MatrixXcd>& rows) {
  const std::size_t k = rows.size();
  const Eigen::Index n = rows[0].rows();
  const Eigen::Index R = rows[0].cols();
  const Eigen::Index head = static_cast<Eigen::Index>(a.size()) / R;
  const Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
      a.data(), head, R);
  const Eigen::MatrixXcd Z = A * rows[k - 1].transpose();  // head x n
  CVec out(n);
  std::vector<cd> acc(static_cast<std::size_t>(head));
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index c = 0; c < head; ++c) acc[static_cast<std::size_t>(c)] = Z(c, x);
    std::size_t len = static_cast<std::size_t>(head);
    for (std::size_t l = k - 1; l-- > 0;) {
      len /= static_cast<std::size_t>(R);
      for (std::size_t o = 0; o < len; ++o) {
        cd s = 0.0;
        for (Eigen::Index r = 0; r < R; ++r) s += acc[o * static_cast<std::size_t>(R) + static_cast<std::size_t>(r)] * rows[l](x, r);
        acc[o] = s;
      }
    }
    out[x] = acc[0];
  }
  return out;
}

}  // namespace

std::vector<std::size_t> band_indices(const DistortedPlan& plan, double band) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < plan.size(); ++j)
    if (plan.active(j) && std::abs(plan.xi(j)) <= band) idx.push_back(j);
  return idx;
}

GridFunction apply_T_dense(const DistortedPlan& plan, const Symbol& m,
                           std::span<const GridFunction> fs, double band) {
  require_inputs(plan, m, fs);
  const std::size_t k = m.arity;
  const std::vector<std::size_t> idx = band_indices(plan, band);
  const std::size_t B = idx.size();
  if ((k == 2 && B > kDenseBudgetK2) || (k == 3 && B > kDenseBudgetK3) || k > 3)
    throw BudgetError("apply_T_dense: " + std::to_string(B) + " frequencies exceed the budget for k = " +
                      std::to_string(k));
  const std::vector<Spectrum> F = spectra(plan, fs);
  require_band_limited(F, idx);

  const double dxi = plan.axis().dxi();
  const auto n = static_cast<Eigen::Index>(plan.grid().N);
  std::vector<Eigen::MatrixXcd> rows(k, Eigen::MatrixXcd(n, static_cast<Eigen::Index>(B)));
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t b = 0; b < B; ++b)
      rows[l].col(static_cast<Eigen::Index>(b)) =
          (dxi * F[l][idx[b]]) * plan.table().E.col(static_cast<Eigen::Index>(idx[b]));

  std::size_t total = 1;
  for (std::size_t l = 0; l < k; ++l) total *= B;
  std::vector<cd> a(total);
  std::vector<std::size_t> pos(k, 0);
  std::vector<double> xi(k);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t l = 0; l < k; ++l) xi[l] = plan.xi(idx[pos[l]]);
    const cd v = m(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw PreconditionError("symbol is not finite on the band");
    a[c] = v;
    for (std::size_t l = k; l-- > 0;) {
      if (++pos[l] < B) break;
      pos[l] = 0;
    }
  }
  return GridFunction(plan.grid(), contract(a, rows));
}

GridFunction apply_T_separable(const DistortedPlan& plan, const Symbol& m,
                               std::span<const GridFunction> fs) {
  require_inputs(plan, m, fs);
  if (!m.has_separable()) throw PreconditionError("apply_T_separable: symbol has no separable factors");
  const std::vector<Spectrum> F = spectra(plan, fs);
  const double scale = std::pow(2.0 * kPi, 0.5 * static_cast<double>(m.arity));
  CVec out = CVec::Zero(static_cast<Eigen::Index>(plan.grid().N));
  for (const SeparableTerm& t : m.separable) {
    if (t.factors.size() != m.arity) throw PreconditionError("apply_T_separable: missing factors");
    CVec prod = CVec::Constant(out.size(), t.weight * scale);
    for (std::size_t l = 0; l < m.arity; ++l)
      prod = prod.cwiseProduct(dft_inverse(plan, multiply(plan, t.factors[l], F[l])).values());
    out += prod;
  }
  return GridFunction(plan.grid(), std::move(out));
}

GridFunction apply_T_expansion(const DistortedPlan& plan, const Symbol& m,
                               std::span<const GridFunction> fs, const ExpansionOptions& opt) {
  require_inputs(plan, m, fs);
  const std::size_t k = m.arity;
  const std::vector<Spectrum> F = spectra(plan, fs);
  const double dxi = plan.axis().dxi();
  const auto n = static_cast<Eigen::Index>(plan.grid().N);
  const auto R = static_cast<Eigen::Index>(2 * opt.n_max + 1);
  const Eigen::MatrixXcd& E = plan.table().E;
  ExpansionOptions eo = opt;
  eo.verify = false;

  // Nodes are sorted, so each box maps to a contiguous column range.
  auto column_range = [&](double lo, double hi) {
    std::size_t j0 = 0;
    while (j0 < plan.size() && plan.xi(j0) < lo) ++j0;
    std::size_t j1 = j0;
    while (j1 < plan.size() && plan.xi(j1) < hi) ++j1;
    return std::pair{j0, j1};
  };

  CVec out = CVec::Zero(n);
  std::vector<ExpansionTerm> shared;
  auto run_level = [&](double N, bool low) {
    const double reach = low ? N : 2.0 * N;
    bool any = false;
    for (std::size_t j = 0; j < plan.size(); ++j)
      if (plan.active(j) && std::abs(plan.xi(j)) < reach && (low || std::abs(plan.xi(j)) > 0.5 * N)) any = true;
    if (!any) return;
    std::vector<ExpansionTerm> local;
    const std::vector<ExpansionTerm>* terms = nullptr;
    if (m.homogeneous && !low) {
      if (shared.empty()) shared = expand_symbol(m, plan.bumps(), 1.0, eo, false).terms;
      terms = &shared;
    } else {
      local = expand_symbol(m, plan.bumps(), N, eo, low).terms;
      terms = &local;
    }
    for (const ExpansionTerm& t : *terms) {
      std::vector<Eigen::MatrixXcd> rows;
      rows.reserve(k);
      for (std::size_t l = 0; l < k; ++l) {
        const auto [j0, j1] = column_range(N * t.lo[l], N * (t.lo[l] + t.width[l]));
        if (j1 == j0) break;
        Eigen::MatrixXcd W(static_cast<Eigen::Index>(j1 - j0), R);
        for (std::size_t j = j0; j < j1; ++j) {
          const double u = (plan.xi(j) / N - t.lo[l]) / t.width[l];
          const cd fj = plan.active(j) ? dxi * F[l][j] : cd(0.0);
          for (Eigen::Index r = 0; r < R; ++r) {
            const double nn = static_cast<double>(r) - static_cast<double>(opt.n_max);
            W(static_cast<Eigen::Index>(j - j0), r) = fj * std::polar(1.0, 2.0 * kPi * nn * u);
          }
        }
        rows.push_back(E.middleCols(static_cast<Eigen::Index>(j0), static_cast<Eigen::Index>(j1 - j0)) * W);
      }
      if (rows.size() < k) continue;
      out += contract(t.coeffs, rows);
    }
  };
  for (double N : plan.dyadic().levels()) run_level(N, false);
  run_level(plan.dyadic().n_min, true);
  return GridFunction(plan.grid(), std::move(out));
}

GridFunction apply_T_flat(const Symbol& m, std::span<const GridFunction> fs, double band,
                          std::size_t refine) {
  if (fs.size() != m.arity || fs.empty()) throw PreconditionError("arity mismatch between symbol and inputs");
  const Grid& g = fs.front().grid();
  const FrequencyAxis axis = g.axis(refine);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < axis.size(); ++j)
    if (std::abs(axis.xi(j)) <= band) idx.push_back(j);
  const std::size_t k = m.arity, B = idx.size();
  std::vector<std::vector<cd>> F(k, std::vector<cd>(B));
  for (std::size_t l = 0; l < k; ++l) {
    const Spectrum s = flat_dft(fs[l], refine);
    for (std::size_t b = 0; b < B; ++b) F[l][b] = axis.dxi() * s[idx[b]];
  }
  std::size_t total = 1;
  for (std::size_t l = 0; l < k; ++l) total *= B;
  std::vector<cd> a(total);
  std::vector<double> sum_xi(total);
  std::vector<std::size_t> pos(k, 0);
  std::vector<double> xi(k);
  for (std::size_t c = 0; c < total; ++c) {
    cd w = 1.0;
    double s = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      xi[l] = axis.xi(idx[pos[l]]);
      w *= F[l][pos[l]];
      s += xi[l];
    }
    a[c] = m(xi) * w;
    sum_xi[c] = s;
    for (std::size_t l = k; l-- > 0;) {
      if (++pos[l] < B) break;
      pos[l] = 0;
    }
  }
  CVec out(static_cast<Eigen::Index>(g.N));
  for (std::size_t i = 0; i < g.N; ++i) {
    cd v = 0.0;
    for (std::size_t c = 0; c < total; ++c) v += a[c] * std::polar(1.0, g.x(i) * sum_xi[c]);
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return GridFunction(g, std::move(out));
}

TPath parse_t_path(const std::string& name) {
  if (name == "auto") return TPath::Auto;
  if (name == "dense") return TPath::Dense;
  if (name == "separable") return TPath::Separable;
  if (name == "expansion") return TPath::Expansion;
  throw ConfigError("unknown T path '" + name + "'");
}

std::string to_string(TPath p) {
  switch (p) {
    case TPath::Auto: return "auto";
    case TPath::Dense: return "dense";
    case TPath::Separable: return "separable";
    case TPath::Expansion: return "expansion";
  }
  return "auto";
}

TResult apply_T(const DistortedPlan& plan, const Symbol& m, std::span<const GridFunction> fs,
                const TOptions& opt) {
  TPath path = opt.path;
  if (path == TPath::Auto) {
    const std::size_t B = band_indices(plan, opt.band).size();
    if (m.has_separable())
      path = TPath::Separable;
    else if ((m.arity == 2 && B <= kDenseBudgetK2) || (m.arity == 3 && B <= kDenseBudgetK3))
      path = TPath::Dense;
    else
      path = TPath::Expansion;
  }
  switch (path) {
    case TPath::Dense: return {apply_T_dense(plan, m, fs, opt.band), path};
    case TPath::Separable: return {apply_T_separable(plan, m, fs), path};
    default: return {apply_T_expansion(plan, m, fs, opt.expansion), TPath::Expansion};
  }
}

LambdaResult lambda_form(const DistortedPlan& plan, const Symbol& m, std::span<const GridFunction> fs,
                         const GridFunction& g, const TOptions& opt) {
  if (!(g.grid() == plan.grid())) throw PreconditionError("test function grid does not match plan grid");
  const TResult T = apply_T(plan, m, fs, opt);
  const cd v = plan.grid().h() * T.value.values().cwiseProduct(g.values()).sum();
  return {v, T.path};
}

GreenReport green_identity_residual(const DistortedPlan& plan, std::span<const GridFunction> fs,
                                    double band) {
  if (fs.size() < 3) throw PreconditionError("green_identity_residual: needs k + 1 >= 3 functions");
  const std::size_t k = fs.size() - 1;
  const std::vector<std::size_t> idx = band_indices(plan, band);
  if ((k == 2 && idx.size() > kDenseBudgetK2) || (k == 3 && idx.size() > kDenseBudgetK3) || k > 3)
    throw BudgetError("green_identity_residual: band exceeds the dense budget");
  for (const GridFunction& f : fs)
    if (!(f.grid() == plan.grid())) throw PreconditionError("input grid does not match plan grid");
  const std::vector<Spectrum> F = spectra(plan, fs);
  require_band_limited(F, idx);

  // u = int F e dxi, Hu = int xi^2 F e dxi, u' = int F e' dxi over the band.
  const double dxi = plan.axis().dxi();
  const auto n = static_cast<Eigen::Index>(plan.grid().N);
  const Eigen::MatrixXcd& E = plan.table().E;
  const Eigen::MatrixXcd& D = plan.table().E_deriv;
  std::vector<CVec> u(k + 1, CVec::Zero(n)), Hu(k + 1, CVec::Zero(n)), du(k + 1, CVec::Zero(n));
  for (std::size_t l = 0; l <= k; ++l)
    for (std::size_t j : idx) {
      const auto je = static_cast<Eigen::Index>(j);
      const cd c = dxi * F[l][j];
      const double xi = plan.xi(j);
      u[l] += c * E.col(je);
      Hu[l] += (c * xi * xi) * E.col(je);
      du[l] += c * D.col(je);
    }
  const double h = plan.grid().h();
  auto integral = [&](const std::vector<const CVec*>& parts, bool with_V) {
    CVec p = CVec::Ones(n);
    for (const CVec* q : parts) p = p.cwiseProduct(*q);
    if (with_V) p = p.cwiseProduct(plan.potential().samples.cast<cd>());
    return h * p.sum();
  };
  auto product_with = [&](std::size_t a, const CVec* va, std::size_t b, const CVec* vb) {
    std::vector<const CVec*> parts;
    for (std::size_t l = 0; l <= k; ++l) parts.push_back(l == a ? va : l == b ? vb : &u[l]);
    return parts;
  };

  GreenReport rep;
  rep.lhs = integral(product_with(0, &Hu[0], k + 1, nullptr), false);
  cd rhs = 0.0;
  for (std::size_t j = 1; j <= k; ++j) rhs += integral(product_with(j, &Hu[j], k + 1, nullptr), false);
  std::vector<const CVec*> plain;
  for (std::size_t l = 0; l <= k; ++l) plain.push_back(&u[l]);
  rhs -= static_cast<double>(k - 1) * integral(plain, true);
  for (std::size_t j = 1; j <= k; ++j)
    for (std::size_t l = j + 1; l <= k; ++l) rhs -= 2.0 * integral(product_with(j, &du[j], l, &du[l]), false);
  rep.rhs = rhs;
  rep.residual = std::abs(rep.lhs - rep.rhs) / (std::abs(rep.lhs) + std::abs(rep.rhs) + 1e-300);
  return rep;
}

}  // namespace dft
