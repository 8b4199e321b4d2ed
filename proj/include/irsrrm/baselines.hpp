#pragma once

#include <cstdint>
#include <vector>

#include "irsrrm/common.hpp"
#include "irsrrm/maxmin.hpp"
#include "irsrrm/model.hpp"

namespace irsrrm {

/// Subset plus the max-min solution run on it.
struct BaselineResult {
  std::vector<int> subset;  ///< 0-based module indices
  MaxMinSolution sol;
};

/// Exhaustive search over all module subsets of the given cardinality,
/// keeping the best balanced SINR. Each candidate reuses init_seed so a run
/// on any particular subset reproduces a direct alternate() call bit for bit.
/// Refuses M > 12 (combinatorial guard).
BaselineResult mes(const EffectiveChannels& eff, int cardinality, uint64_t init_seed,
                   const MaxMinOptions& opt);

/// Uniformly random subset of the given cardinality, then alternate().
BaselineResult mrs(const EffectiveChannels& eff, int cardinality, uint64_t subset_seed,
                   uint64_t init_seed, const MaxMinOptions& opt);

/// Direct-link max-min power control: SINR_k = p_k |d(k,k)|^2 /
/// (sum_{j!=k} p_j |d(k,j)|^2 + sigma2) with d(k, j) the ST j -> DT k scalar.
MaxMinSolution no_irs_maxmin(const cmat& d_direct, double sigma2, const rvec& p_max, double eps);

/// AF relay configuration. P_r_max mirrors the summed ST budgets.
struct AfConfig {
  double P_r_max = 0.0;
  double sigma_v2 = 0.0;  ///< relay receive noise, watts
  rvec p_max;
  double sigma2 = 0.0;
};

/// Zero-forcing relay beam matrix V = G^H (G G^H)^{-1} (H^H H)^{-1} H^H with
/// G V H = I. H is N x K (columns h_k), G is K x N (rows g_k^H). Throws on
/// rank deficiency.
cmat zf_relay_beam(const cmat& H, const cmat& G);

/// Per-pair amplify factor normalizing the relay transmit power to P_r_max.
double af_amplify_factor(int k, const cmat& H, const cmat& G, const rvec& p, double P_r_max,
                         double sigma_v2);

/// Receive SINR of pair k under the ZF relay with amplify factor zeta.
double af_sinr(int k, const cmat& H, const cmat& G, const rvec& p, double zeta, double sigma_v2,
               double sigma2);

struct AfSolution {
  rvec p;
  double gamma = 0.0;
  rvec sinrs;
  bool valid = true;  ///< false when the ZF preconditions fail (N < K etc.)
};

/// Max-min power control for the ZF AF relay: bisection over the target with
/// a fixed-point sweep on the coupled (p, zeta) system as feasibility test.
AfSolution af_maxmin_power(const cmat& H, const cmat& G, const AfConfig& cfg, double eps);

}  // namespace irsrrm
