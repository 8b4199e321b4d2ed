#pragma once

#include <cstdint>
#include <vector>

#include "irsrrm/common.hpp"
#include "irsrrm/feasibility.hpp"
#include "irsrrm/model.hpp"

namespace irsrrm {

/// Joint (phi, p) solution of the max-min SINR problem on a module subset.
struct MaxMinSolution {
  cvec phi;   ///< full length N; exactly zero outside the subset
  rvec p;
  double gamma = 0.0;  ///< certified balanced SINR: min_k SINR_k >= gamma (1 - 1e-6)
  std::vector<std::pair<double, double>> trace;  ///< (gamma_out, gamma_in) per outer round
  int outer_iters = 0;
  bool converged = true;  ///< false when max_outer rounds ran out
  double max_interval_width = 0.0;  ///< widest final bisection interval seen
};

struct MaxMinOptions {
  double eps = 1e-4;
  int max_outer = 50;
  double tol_feas = 1e-7;
  int max_feas_iter = 20000;
};

/// Passive-beamforming stage: bisects the SINR target with the cone
/// feasibility test at fixed p, warm-started from phi_init. Returns the
/// certificate phi of the last feasible probe and the achieved target.
std::pair<cvec, double> optimize_phase(const rvec& p, const EffectiveChannels& eff,
                                       const cvec& phi_init, const MaxMinOptions& opt,
                                       double* interval_width = nullptr);

/// Power stage: bisects the target with the minimal-power fixed point at
/// fixed phi. p_init seeds the incumbent certificate.
std::pair<rvec, double> optimize_power(const cvec& phi, const EffectiveChannels& eff,
                                       const rvec& p_init, const MaxMinOptions& opt,
                                       double* interval_width = nullptr);

/// Alternates the two stages on the given module subset (0-based indices)
/// until |gamma_out - gamma_in| <= eps. phi starts unit-modulus with phases
/// from init_seed; p starts at the caps. An empty subset short-circuits to
/// the all-zero solution.
MaxMinSolution alternate(const EffectiveChannels& eff, const std::vector<int>& subset,
                         uint64_t init_seed, const MaxMinOptions& opt);

}  // namespace irsrrm
