#pragma once

#include <cstdint>
#include <vector>

#include "dft/multilinear.hpp"

namespace dft {

struct SampleOptions {
  double max_modulation = 3.0;
  double center_range = 4.0;
  double min_width = 0.4;
};

// Continuous random test function for sample `index`: modulated Gaussian,
// dyadic wave-packet superposition or bump train (by index mod 3). The function
// depends only on (seed, index), not on the grid.
GridFunction probe_sample(const Grid& g, std::uint64_t seed, std::size_t index,
                          const SampleOptions& opt = {});

// Distorted projection onto |xi| <= band: multiplier psi(2 xi / band).
GridFunction band_limit(const DistortedPlan& plan, const GridFunction& f, double band);

struct ProbeReport {
  std::vector<double> exponents;        // p_1..p_k, r'
  std::vector<double> tilde_exponents;  // empty unless the epsilon variant ran
  std::size_t samples = 0;
  std::vector<double> ratios;
  std::vector<double> eps_ratios;
  double max = 0.0;
  double median = 0.0;
  double eps_max = 0.0;
  double eps_median = 0.0;
  bool all_finite = true;
  TPath path = TPath::Auto;
};

struct ProbeOptions {
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  double epsilon = 0.0;  // > 0 adds the two-term variant with 1/p~_j = 1/p_j + epsilon / k
  TOptions t;            // t.band also band-limits the samples when finite
  SampleOptions sample;
  int jobs = 1;
};

// Hoelder relation sum 1/p_j = 1/r' with exponents = (p_1..p_k, r').
void validate_hoelder(const std::vector<double>& exponents);

// ||T(f)||_{r'} / prod ||f_j||_{p_j}; the variant divides by
// prod ||f_j||_{p_j} + prod ||f_j||_{p~_j}.
ProbeReport cm_bound_probe(const DistortedPlan& plan, const Symbol& m,
                           const std::vector<double>& exponents, const ProbeOptions& opt = {});

// ||T(f)||_{W^{s,r'}} / (sum_l ||f_l||_{W^{s,p_l}} prod_{j!=l} ||f_j||_{p_j} + prod ||f_j||_{p_j}).
ProbeReport leibniz_probe(const DistortedPlan& plan, const Symbol& m, int s,
                          const std::vector<double>& exponents, const ProbeOptions& opt = {});

// Same ratio with m = 1 through the flat transform: T = (2 pi)^{k/2} prod f_j.
ProbeReport leibniz_probe_flat(const Grid& g, int s, const std::vector<double>& exponents,
                               const ProbeOptions& opt = {}, std::size_t refine = 2);

struct StrichartzOptions {
  std::size_t samples = 30;
  std::uint64_t seed = 1;
  double horizon = 2.0;
  double dt = 0.05;
  SampleOptions sample{1.0, 4.0, 1.0};
  int jobs = 1;
};

// ||e^{itH} u0||_{L^p_t L^q_x([0, T])} / ||u0||_2 with exponents = (p, q).
ProbeReport strichartz_probe(const DistortedPlan& plan, double p, double q,
                             const StrichartzOptions& opt = {});
ProbeReport strichartz_probe_flat(const Grid& g, double p, double q, const StrichartzOptions& opt = {},
                                  std::size_t refine = 2);

// |max_fine / max_coarse - 1|.
double refinement_change(const ProbeReport& coarse, const ProbeReport& fine);

}  // namespace dft
