#include "irsrrm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "irsrrm/rng.hpp"

namespace irsrrm {

namespace {

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::array<double, 2> sample_disk(Rng& rng, const std::array<double, 2>& center, double radius) {
  // r = R*sqrt(u) gives the uniform density on the disk.
  double r = radius * std::sqrt(rng.uniform());
  double a = 2.0 * std::numbers::pi * rng.uniform();
  return {center[0] + r * std::cos(a), center[1] + r * std::sin(a)};
}

}  // namespace

Scenario Scenario::defaults(int K, int M, int L) {
  Scenario sc;
  sc.K = K;
  sc.M = M;
  sc.L = L;
  sc.p_max.assign(static_cast<size_t>(K), dbm_to_watts(20.0));
  sc.sigma2 = dbm_to_watts(-90.0);
  sc.validate();
  return sc;
}

void Scenario::validate() const {
  if (K < 1 || M < 1 || L < 1) throw std::invalid_argument("scenario: K, M, L must be >= 1");
  if (static_cast<int>(p_max.size()) != K)
    throw std::invalid_argument("scenario: p_max must have K entries");
  for (double p : p_max)
    if (!(p > 0.0)) throw std::invalid_argument("scenario: p_max entries must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("scenario: sigma2 must be positive");
  if (!(cell_radius > 0.0)) throw std::invalid_argument("scenario: cell_radius must be positive");
}

Geometry sample_positions(const Scenario& sc, uint64_t seed) {
  Rng rng(seed);
  Geometry geo;
  geo.irs_pos = sc.irs_pos;
  geo.st_pos.reserve(sc.K);
  geo.dt_pos.reserve(sc.K);
  for (int k = 0; k < sc.K; ++k) geo.st_pos.push_back(sample_disk(rng, sc.st_center, sc.cell_radius));
  for (int k = 0; k < sc.K; ++k) geo.dt_pos.push_back(sample_disk(rng, sc.dt_center, sc.cell_radius));
  geo.d_h.resize(sc.K);
  geo.d_g.resize(sc.K);
  geo.d_direct.resize(sc.K, sc.K);
  for (int k = 0; k < sc.K; ++k) {
    geo.d_h[k] = dist(geo.st_pos[k], geo.irs_pos);
    geo.d_g[k] = dist(geo.irs_pos, geo.dt_pos[k]);
    for (int j = 0; j < sc.K; ++j) geo.d_direct(k, j) = dist(geo.dt_pos[k], geo.st_pos[j]);
  }
  return geo;
}

double pathloss_variance(double distance, double exponent) {
  if (!(distance > 0.0)) throw std::domain_error("pathloss_variance: distance must be positive");
  return std::pow(200.0 / distance, exponent);
}

double direct_pathloss_variance(double distance, double exponent) {
  if (!(distance > 0.0)) throw std::domain_error("direct_pathloss_variance: distance must be positive");
  return 1e-3 * std::pow(distance, -exponent);
}

ChannelSet generate_channels(const Scenario& sc, const Geometry& geo, uint64_t seed) {
  if (static_cast<int>(geo.d_h.size()) != sc.K || static_cast<int>(geo.d_g.size()) != sc.K)
    throw std::invalid_argument("generate_channels: geometry inconsistent with scenario");
  Rng rng(seed);
  const int n = sc.n_elements();
  ChannelSet ch;
  ch.K = sc.K;
  ch.M = sc.M;
  ch.L = sc.L;
  ch.h.resize(sc.K);
  ch.g.resize(sc.K);
  for (int k = 0; k < sc.K; ++k) {
    double var_h = pathloss_variance(geo.d_h[k], sc.pathloss_exp_uplink);
    ch.h[k].resize(n);
    for (int i = 0; i < n; ++i) ch.h[k](i) = rng.cnormal(var_h);
  }
  for (int k = 0; k < sc.K; ++k) {
    double var_g = pathloss_variance(geo.d_g[k], sc.pathloss_exp_downlink);
    ch.g[k].resize(n);
    for (int i = 0; i < n; ++i) ch.g[k](i) = rng.cnormal(var_g);
  }
  ch.d_direct.resize(sc.K, sc.K);
  for (int k = 0; k < sc.K; ++k)
    for (int j = 0; j < sc.K; ++j) {
      double var_d = direct_pathloss_variance(geo.d_direct(k, j), sc.pathloss_exp_direct);
      ch.d_direct(k, j) = rng.cnormal(var_d);
    }
  ch.min_d_h = *std::min_element(geo.d_h.begin(), geo.d_h.end());
  ch.min_d_g = *std::min_element(geo.d_g.begin(), geo.d_g.end());
  return ch;
}

ChannelSet perturb_csi(const ChannelSet& ch, double xi, uint64_t seed) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::domain_error("perturb_csi: xi must be in [0, 1]");
  if (xi == 1.0) return ch;
  Rng rng(seed);
  ChannelSet out = ch;
  const double mix = std::sqrt(1.0 - xi * xi);
  const double var_dh = pathloss_variance(ch.min_d_h, 2.0);
  const double var_dg = pathloss_variance(ch.min_d_g, 2.0);
  for (int k = 0; k < ch.K; ++k)
    for (int i = 0; i < out.h[k].size(); ++i)
      out.h[k](i) = xi * ch.h[k](i) + mix * rng.cnormal(var_dh);
  for (int k = 0; k < ch.K; ++k)
    for (int i = 0; i < out.g[k].size(); ++i)
      out.g[k](i) = xi * ch.g[k](i) + mix * rng.cnormal(var_dg);
  return out;
}

}  // namespace irsrrm
