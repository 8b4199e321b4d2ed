#pragma once

#include <vector>

#include "irsrrm/common.hpp"
#include "irsrrm/scenario.hpp"

namespace irsrrm {

/// Effective reflect channels hbar(j, k) = diag(g_k^H) h_j together with the
/// instance data every solver needs (budgets, noise). With Phi = diag(phi),
/// the cascaded gain satisfies |g_k^H Phi h_j| = |hbar(j, k)^H conj(phi)|; all
/// SINR math here uses the quadratic form in hbar, so a reported phi
/// corresponds to the physical reflection coefficients conj(phi).
struct EffectiveChannels {
  int K = 0, M = 0, L = 0;
  std::vector<cvec> hb;  ///< hb[j * K + k] = hbar(j, k), length N
  rvec p_max;
  double sigma2 = 0.0;

  int n_elements() const { return M * L; }
  const cvec& hbar(int j, int k) const { return hb[static_cast<size_t>(j) * K + k]; }
  cvec& hbar(int j, int k) { return hb[static_cast<size_t>(j) * K + k]; }
};

/// Entrywise conj(g_k) .* h_j. Throws std::invalid_argument on length mismatch.
cvec effective_channel(const cvec& g_k, const cvec& h_j);

/// Builds all K^2 effective channels from one realization.
EffectiveChannels make_effective_channels(const ChannelSet& ch, const rvec& p_max, double sigma2);

/// Restriction of an instance to the elements of the given modules (sorted,
/// 0-based). elem_index maps reduced coordinates back to full ones.
struct RestrictedChannels {
  EffectiveChannels eff;
  std::vector<int> elem_index;
};
RestrictedChannels restrict_to_modules(const EffectiveChannels& eff, const std::vector<int>& modules);

/// SINR_k = p_k |hbar(k,k)^H phi|^2 / (sum_{j != k} p_j |hbar(j,k)^H phi|^2 + sigma2).
rvec sinr_all(const cvec& phi, const rvec& p, const EffectiveChannels& eff);

/// Received power gains b(j, k) = |hbar(j, k)^H phi|^2.
rmat channel_gains(const cvec& phi, const EffectiveChannels& eff);

/// SINRs from a precomputed gain table.
rvec sinr_from_gains(const rmat& gains, const rvec& p, double sigma2);

/// Dissipation model constants (watts). Defaults: 10 dBm circuit power per
/// terminal, amplifier coefficient 1.2, 0.01 W per reflecting element/antenna.
struct PowerModelParams {
  double P_ST = 0.01;
  double P_DT = 0.01;
  double xi_ST = 1.2;
  double xi_AF = 1.2;
  double P_module_per_element = 0.01;
  double P_antenna = 0.01;
  double P_module(int L) const { return P_module_per_element * L; }
};

/// xi_ST * sum(p) + K (P_ST + P_DT) + triggered * P_module(L).
double total_power_irs(const rvec& p, int triggered_count, int L, const PowerModelParams& pm);

/// xi_AF * P_r + xi_ST * sum(p) + K (P_ST + P_DT) + antennas * P_antenna.
double total_power_af(const rvec& p, double P_r, int antenna_count, const PowerModelParams& pm);

/// Sum of log2(1 + SINR_k), bit/s/Hz.
double sum_rate(const rvec& sinrs);

/// sum_rate / total_power, bit/Joule/Hz. Throws std::domain_error for
/// nonpositive power.
double energy_efficiency(const rvec& sinrs, double total_power);

}  // namespace irsrrm
