#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dft/errors.hpp"
#include "dft/transform.hpp"

namespace dft {

namespace {

constexpr char kMagic[8] = {'D', 'F', 'T', 'P', 'L', 'A', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

class Fnv1a {
 public:
  void bytes(const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_c(std::ostream& out, cd v) {
  put_f64(out, v.real());
  put_f64(out, v.imag());
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return true;
}

bool get_f64(std::istream& in, double& v) {
  std::uint64_t u = 0;
  if (!get_u64(in, u)) return false;
  v = std::bit_cast<double>(u);
  return true;
}

bool get_c(std::istream& in, cd& v) {
  double re = 0.0, im = 0.0;
  if (!get_f64(in, re) || !get_f64(in, im)) return false;
  v = cd(re, im);
  return true;
}

}  // namespace

std::uint64_t plan_key(const Potential& V, std::size_t refine, std::size_t substeps) {
  Fnv1a h;
  h.f64(V.grid.L);
  h.u64(V.grid.N);
  h.u64(refine);
  h.u64(substeps);
  for (Eigen::Index i = 0; i < V.samples.size(); ++i) h.f64(V.samples[i]);
  return h.value();
}

std::string plan_cache_path(const std::string& dir, const Potential& V, std::size_t refine,
                            std::size_t substeps) {
  std::ostringstream name;
  name << "plan_" << std::hex << std::setw(16) << std::setfill('0')
       << plan_key(V, refine, substeps) << ".bin";
  return (std::filesystem::path(dir) / name.str()).string();
}

void save_plan(const PlaneWaveTable& T, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write plan cache: " + path);
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_u32(out, 0);
  put_u64(out, plan_key(T.potential, T.axis.refine, T.substeps));
  put_f64(out, T.grid.L);
  put_u64(out, T.grid.N);
  put_u64(out, T.axis.refine);
  put_u64(out, T.substeps);
  const auto n = static_cast<Eigen::Index>(T.grid.N);
  const auto M = static_cast<Eigen::Index>(T.axis.size());
  for (Eigen::Index j = 0; j < M; ++j) put_f64(out, T.xi[j]);
  for (std::size_t j = 0; j < T.axis.size(); ++j) out.put(static_cast<char>(T.active[j]));
  for (std::size_t j = 0; j < T.axis.size(); ++j) put_c(out, T.transmission[j]);
  for (std::size_t j = 0; j < T.axis.size(); ++j) put_c(out, T.wronskian[j]);
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index i = 0; i < n; ++i) put_c(out, T.E(i, j));
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index i = 0; i < n; ++i) put_c(out, T.E_deriv(i, j));
  if (!out) throw Error("failed writing plan cache: " + path);
}

std::optional<PlaneWaveTable> load_plan(const std::string& path, const Potential& V,
                                        std::size_t refine, std::size_t substeps) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
  std::uint32_t version = 0, reserved = 0;
  std::uint64_t key = 0, N = 0, r = 0, s = 0;
  double L = 0.0;
  if (!get_u32(in, version) || !get_u32(in, reserved) || version != kVersion) return std::nullopt;
  if (!get_u64(in, key) || !get_f64(in, L) || !get_u64(in, N) || !get_u64(in, r) || !get_u64(in, s))
    return std::nullopt;
  if (key != plan_key(V, refine, substeps) || L != V.grid.L || N != V.grid.N || r != refine ||
      s != substeps)
    return std::nullopt;
  PlaneWaveTable T;
  T.grid = V.grid;
  T.axis = V.grid.axis(refine);
  T.potential = V;
  T.substeps = substeps;
  const auto n = static_cast<Eigen::Index>(N);
  const std::size_t Mu = T.axis.size();
  const auto M = static_cast<Eigen::Index>(Mu);
  T.xi.resize(M);
  for (Eigen::Index j = 0; j < M; ++j)
    if (!get_f64(in, T.xi[j])) return std::nullopt;
  T.active.resize(Mu);
  for (std::size_t j = 0; j < Mu; ++j) {
    const int c = in.get();
    if (c == EOF) return std::nullopt;
    T.active[j] = static_cast<unsigned char>(c);
  }
  T.transmission.resize(Mu);
  T.wronskian.resize(Mu);
  for (std::size_t j = 0; j < Mu; ++j)
    if (!get_c(in, T.transmission[j])) return std::nullopt;
  for (std::size_t j = 0; j < Mu; ++j)
    if (!get_c(in, T.wronskian[j])) return std::nullopt;
  T.E.resize(n, M);
  T.E_deriv.resize(n, M);
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!get_c(in, T.E(i, j))) return std::nullopt;
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!get_c(in, T.E_deriv(i, j))) return std::nullopt;
  return T;
}

PlaneWaveTable cached_plane_wave_table(const Potential& V, const PlanOptions& opt,
                                       const std::string& cache_dir) {
  if (cache_dir.empty()) return build_plane_wave_table(V, opt);
  const std::string path = plan_cache_path(cache_dir, V, opt.xi_refine, opt.jost.substeps);
  if (auto T = load_plan(path, V, opt.xi_refine, opt.jost.substeps)) return std::move(*T);
  PlaneWaveTable T = build_plane_wave_table(V, opt);
  std::filesystem::create_directories(cache_dir);
  save_plan(T, path);
  return T;
}

}  // namespace dft
