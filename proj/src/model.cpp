#include "irsrrm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace irsrrm {

cvec effective_channel(const cvec& g_k, const cvec& h_j) {
  if (g_k.size() != h_j.size())
    throw std::invalid_argument("effective_channel: length mismatch");
  return g_k.conjugate().cwiseProduct(h_j);
}

EffectiveChannels make_effective_channels(const ChannelSet& ch, const rvec& p_max, double sigma2) {
  EffectiveChannels eff;
  eff.K = ch.K;
  eff.M = ch.M;
  eff.L = ch.L;
  eff.p_max = p_max;
  eff.sigma2 = sigma2;
  eff.hb.resize(static_cast<size_t>(ch.K) * ch.K);
  for (int j = 0; j < ch.K; ++j)
    for (int k = 0; k < ch.K; ++k) eff.hbar(j, k) = effective_channel(ch.g[k], ch.h[j]);
  return eff;
}

RestrictedChannels restrict_to_modules(const EffectiveChannels& eff, const std::vector<int>& modules) {
  RestrictedChannels out;
  out.elem_index.reserve(modules.size() * eff.L);
  for (int m : modules)
    for (int l = 0; l < eff.L; ++l) out.elem_index.push_back(m * eff.L + l);
  out.eff.K = eff.K;
  out.eff.M = static_cast<int>(modules.size());
  out.eff.L = eff.L;
  out.eff.p_max = eff.p_max;
  out.eff.sigma2 = eff.sigma2;
  const int n = static_cast<int>(out.elem_index.size());
  out.eff.hb.resize(eff.hb.size());
  for (size_t i = 0; i < eff.hb.size(); ++i) {
    out.eff.hb[i].resize(n);
    for (int r = 0; r < n; ++r) out.eff.hb[i](r) = eff.hb[i](out.elem_index[r]);
  }
  return out;
}

rmat channel_gains(const cvec& phi, const EffectiveChannels& eff) {
  rmat gains(eff.K, eff.K);
  for (int j = 0; j < eff.K; ++j)
    for (int k = 0; k < eff.K; ++k) gains(j, k) = std::norm(eff.hbar(j, k).dot(phi));
  return gains;
}

rvec sinr_from_gains(const rmat& gains, const rvec& p, double sigma2) {
  const int K = static_cast<int>(gains.rows());
  rvec out(K);
  for (int k = 0; k < K; ++k) {
    double interference = 0.0;
    for (int j = 0; j < K; ++j)
      if (j != k) interference += p(j) * gains(j, k);
    out(k) = p(k) * gains(k, k) / (interference + sigma2);
  }
  return out;
}

rvec sinr_all(const cvec& phi, const rvec& p, const EffectiveChannels& eff) {
  return sinr_from_gains(channel_gains(phi, eff), p, eff.sigma2);
}

double total_power_irs(const rvec& p, int triggered_count, int L, const PowerModelParams& pm) {
  const int K = static_cast<int>(p.size());
  return pm.xi_ST * p.sum() + K * (pm.P_ST + pm.P_DT) + triggered_count * pm.P_module(L);
}

double total_power_af(const rvec& p, double P_r, int antenna_count, const PowerModelParams& pm) {
  const int K = static_cast<int>(p.size());
  return pm.xi_AF * P_r + pm.xi_ST * p.sum() + K * (pm.P_ST + pm.P_DT) +
         antenna_count * pm.P_antenna;
}

double sum_rate(const rvec& sinrs) {
  double r = 0.0;
  for (int k = 0; k < sinrs.size(); ++k) r += std::log2(1.0 + sinrs(k));
  return r;
}

double energy_efficiency(const rvec& sinrs, double total_power) {
  if (!(total_power > 0.0)) throw std::domain_error("energy_efficiency: power must be positive");
  return sum_rate(sinrs) / total_power;
}

}  // namespace irsrrm
