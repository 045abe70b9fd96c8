#include "dft/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "dft/errors.hpp"

namespace dft {

ExpansionMode parse_expansion_mode(const std::string& name) {
  if (name == "tight") return ExpansionMode::Tight;
  if (name == "centered") return ExpansionMode::Centered;
  throw ConfigError("unknown expansion mode '" + name + "'");
}

namespace {

// Piece `term` of the localized symbol. For the tight mode term = 2 j + (sign < 0):
// prod_{l<j} psi(2 eta_l) phi(eta_j) [sign eta_j > 0] prod_{l>j} psi(eta_l).
double cutoff(const BumpPair& b, std::span<const double> eta, bool low, int term) {
  const std::size_t k = eta.size();
  if (low) {
    double c = 1.0;
    for (double e : eta) c *= b.psi(2.0 * e);
    return c;
  }
  if (term < 0) {
    double a = 1.0, c = 1.0;
    for (double e : eta) {
      a *= b.psi(e);
      c *= b.psi(2.0 * e);
    }
    return a - c;
  }
  const auto j = static_cast<std::size_t>(term / 2);
  const bool negative = term % 2 == 1;
  if (negative ? eta[j] >= 0.0 : eta[j] <= 0.0) return 0.0;
  double c = b.phi(eta[j]);
  for (std::size_t l = 0; l < k; ++l) {
    if (l < j) c *= b.psi(2.0 * eta[l]);
    if (l > j) c *= b.psi(eta[l]);
  }
  return c;
}

// Contract axis `axis` of a row-major tensor with dims `dims` against the rows of F.
std::vector<cd> contract_axis(const std::vector<cd>& data, std::vector<std::size_t>& dims,
                              std::size_t axis, const Eigen::MatrixXcd& F) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= dims[a];
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
  const std::size_t P = dims[axis];
  const auto R = static_cast<std::size_t>(F.rows());
  std::vector<cd> out(outer * R * inner, cd(0.0));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t p = 0; p < P; ++p) {
      const cd* src = &data[(o * P + p) * inner];
      for (std::size_t r = 0; r < R; ++r) {
        const cd w = F(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p));
        cd* dst = &out[(o * R + r) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
    }
  dims[axis] = R;
  return out;
}

std::size_t pow_size(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

ExpansionTerm expand_term(const Symbol& m, const BumpPair& b, double N1, bool low, int term,
                          std::vector<double> lo, std::vector<double> width, std::size_t n_max,
                          std::size_t P) {
  const std::size_t k = lo.size();
  std::vector<cd> samples(pow_size(P, k));
  std::vector<double> eta(k), xi(k);
  std::vector<std::size_t> idx(k, 0);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t l = 0; l < k; ++l) {
      eta[l] = lo[l] + width[l] * static_cast<double>(idx[l]) / static_cast<double>(P);
      xi[l] = N1 * eta[l];
    }
    const double c = cutoff(b, eta, low, term);
    samples[s] = c == 0.0 ? cd(0.0) : c * m(xi);
    for (std::size_t l = k; l-- > 0;) {
      if (++idx[l] < P) break;
      idx[l] = 0;
    }
  }
  const auto R = static_cast<Eigen::Index>(2 * n_max + 1);
  Eigen::MatrixXcd F(R, static_cast<Eigen::Index>(P));
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(P); ++p) {
      const double n = static_cast<double>(r) - static_cast<double>(n_max);
      F(r, p) = std::polar(1.0 / static_cast<double>(P),
                           -2.0 * kPi * n * static_cast<double>(p) / static_cast<double>(P));
    }
  std::vector<std::size_t> dims(k, P);
  for (std::size_t a = 0; a < k; ++a) samples = contract_axis(samples, dims, a, F);
  return ExpansionTerm{std::move(lo), std::move(width), std::move(samples)};
}

cd eval_term(const ExpansionTerm& t, std::size_t n_max, std::span<const double> eta) {
  const std::size_t k = t.lo.size();
  const std::size_t R = 2 * n_max + 1;
  Eigen::MatrixXcd basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(R));
  for (std::size_t l = 0; l < k; ++l) {
    const double u = (eta[l] - t.lo[l]) / t.width[l];
    if (u < 0.0 || u >= 1.0) return 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double n = static_cast<double>(r) - static_cast<double>(n_max);
      basis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = std::polar(1.0, 2.0 * kPi * n * u);
    }
  }
  std::vector<cd> acc = t.coeffs;
  std::size_t len = acc.size();
  for (std::size_t l = k; l-- > 0;) {
    len /= R;
    for (std::size_t o = 0; o < len; ++o) {
      cd s = 0.0;
      for (std::size_t r = 0; r < R; ++r)
        s += acc[o * R + r] * basis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
      acc[o] = s;
    }
  }
  return acc[0];
}

}  // namespace

cd CoefficientTable::localized(const Symbol& m, const BumpPair& b, std::span<const double> eta) const {
  const double c = cutoff(b, eta, low, -1);
  if (c == 0.0) return 0.0;
  std::vector<double> xi(eta.begin(), eta.end());
  for (double& v : xi) v *= N1;
  return c * m(xi);
}

cd CoefficientTable::reconstruct(std::span<const double> eta) const {
  cd s = 0.0;
  for (const ExpansionTerm& t : terms) s += eval_term(t, n_max, eta);
  return s;
}

CoefficientTable expand_symbol(const Symbol& m, const BumpPair& b, double N1,
                               const ExpansionOptions& opt, bool low) {
  const std::size_t k = m.arity;
  if (!(N1 > 0.0)) throw PreconditionError("expand_symbol: N1 must be positive");
  if (opt.n_max < 1) throw PreconditionError("expand_symbol: n_max must be at least 1");
  if (!(opt.K >= 4.0)) throw PreconditionError("expand_symbol: box [-K/2, K/2] must contain the support");
  std::size_t P = opt.lattice;
  if (P == 0) {
    P = 4 * opt.n_max;
    std::size_t cap = 128;
    while (cap > 4 && pow_size(cap, k) > (std::size_t{1} << 21)) --cap;
    P = std::max(P, cap);
  }
  if (P < 4 * opt.n_max) throw PreconditionError("expand_symbol: lattice too coarse for n_max (aliasing guard)");

  CoefficientTable T;
  T.N1 = N1;
  T.K = opt.K;
  T.n_max = opt.n_max;
  T.arity = k;
  T.lattice = P;
  T.mode = opt.mode;
  T.low = low;

  const double support = low ? 1.0 : 2.0;
  if (opt.mode == ExpansionMode::Centered) {
    T.terms.push_back(expand_term(m, b, N1, low, -1, std::vector<double>(k, -opt.K / 2.0),
                                  std::vector<double>(k, opt.K), opt.n_max, P));
  } else if (low) {
    T.terms.push_back(expand_term(m, b, N1, true, -1, std::vector<double>(k, -1.0),
                                  std::vector<double>(k, 2.0), opt.n_max, P));
  } else {
    for (std::size_t j = 0; j < k; ++j)
      for (int sgn = 0; sgn < 2; ++sgn) {
        std::vector<double> lo(k), width(k);
        for (std::size_t l = 0; l < k; ++l) {
          if (l < j) {
            lo[l] = -1.0;
            width[l] = 2.0;
          } else if (l > j) {
            lo[l] = -2.0;
            width[l] = 4.0;
          } else {
            lo[l] = sgn == 0 ? 0.5 : -2.0;
            width[l] = 1.5;
          }
        }
        T.terms.push_back(expand_term(m, b, N1, false, static_cast<int>(2 * j) + sgn, std::move(lo),
                                      std::move(width), opt.n_max, P));
      }
  }

  // Shell maxima and decay fit.
  const std::size_t R = 2 * opt.n_max + 1;
  T.shell_max.assign(k * opt.n_max + 1, 0.0);
  for (const ExpansionTerm& t : T.terms)
    for (std::size_t c = 0; c < t.coeffs.size(); ++c) {
      std::size_t rem = c, s = 0;
      for (std::size_t l = 0; l < k; ++l) {
        const auto r = static_cast<long>(rem % R);
        rem /= R;
        s += static_cast<std::size_t>(std::labs(r - static_cast<long>(opt.n_max)));
      }
      T.shell_max[s] = std::max(T.shell_max[s], std::abs(t.coeffs[c]));
    }
  T.shell_monotone = true;
  for (std::size_t s = 1; s < T.shell_max.size(); ++s)
    if (T.shell_max[s] > T.shell_max[s - 1]) T.shell_monotone = false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t s = 0; s < T.shell_max.size(); ++s) {
    if (!(T.shell_max[s] > 1e-15 * T.shell_max[0])) continue;
    const double x = std::log(1.0 + static_cast<double>(s)), y = std::log(T.shell_max[s]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) T.decay_fit = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

  if (!opt.verify) return T;
  // Resampling lattice, cell-centered and offset from the coefficient lattice.
  std::size_t Q = 9;
  while (pow_size(Q + 2, k) <= 20000) Q += 2;
  std::vector<double> eta(k);
  std::vector<std::size_t> idx(k, 0);
  const std::size_t total = pow_size(Q, k);
  for (std::size_t s = 0; s < total; ++s) {
    for (std::size_t l = 0; l < k; ++l)
      eta[l] = -support + 2.0 * support * (static_cast<double>(idx[l]) + 0.5) / static_cast<double>(Q);
    T.reconstruction_error =
        std::max(T.reconstruction_error, std::abs(T.reconstruct(eta) - T.localized(m, b, eta)));
    for (std::size_t l = k; l-- > 0;) {
      if (++idx[l] < Q) break;
      idx[l] = 0;
    }
  }
  return T;
}

}  // namespace dft
