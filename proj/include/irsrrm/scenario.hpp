#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "irsrrm/common.hpp"

namespace irsrrm {

/// Network setup: pair count, modular IRS dimensions, power budgets, noise,
/// and the path-loss geometry. All powers in watts, distances in meters.
struct Scenario {
  int K = 0;  ///< ST-DT pairs
  int M = 0;  ///< IRS modules
  int L = 0;  ///< reflecting elements per module
  std::vector<double> p_max;  ///< per-ST transmit cap, watts
  double sigma2 = 0.0;        ///< DT noise power, watts

  std::array<double, 2> st_center{0.0, 0.0};
  std::array<double, 2> dt_center{200.0, 0.0};
  std::array<double, 2> irs_pos{120.0, 50.0};
  double cell_radius = 2.0;

  double pathloss_exp_uplink = 2.0;
  double pathloss_exp_downlink = 2.1;
  double pathloss_exp_direct = 3.5;

  int n_elements() const { return M * L; }

  /// Standard setup: p_max = 20 dBm, sigma2 = -90 dBm, fixed geometry.
  static Scenario defaults(int K, int M, int L);

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

/// Sampled terminal positions and the derived link distances.
struct Geometry {
  std::vector<std::array<double, 2>> st_pos;
  std::vector<std::array<double, 2>> dt_pos;
  std::array<double, 2> irs_pos{};
  std::vector<double> d_h;  ///< ST k -> IRS
  std::vector<double> d_g;  ///< IRS -> DT k
  rmat d_direct;            ///< (k, j): DT k <- ST j distance
};

/// One fading realization. h[k], g[k] have length N = M*L; d_direct(k, j)
/// is the scalar direct channel from ST j to DT k (no-IRS baseline only).
struct ChannelSet {
  int K = 0, M = 0, L = 0;
  std::vector<cvec> h;
  std::vector<cvec> g;
  cmat d_direct;
  // Smallest link distances of this realization; they set the perturbation
  // variance for imperfect-CSI modeling.
  double min_d_h = 0.0;
  double min_d_g = 0.0;
};

/// STs/DTs uniform on disks about their cell centers, IRS fixed.
Geometry sample_positions(const Scenario& sc, uint64_t seed);

/// Per-entry channel variance (200 / distance)^exponent.
/// Throws std::domain_error for distance <= 0.
double pathloss_variance(double distance, double exponent);

/// Direct-link variance: 30 dB loss at 1 m reference, then d^-exponent.
double direct_pathloss_variance(double distance, double exponent);

/// i.i.d. CN(0, var) channels with per-link variances from the geometry.
ChannelSet generate_channels(const Scenario& sc, const Geometry& geo, uint64_t seed);

/// Estimated channels: xi * ch + sqrt(1 - xi^2) * noise, noise variance
/// (200 / min_k d)^2 per entry. xi = 1 returns the input unchanged.
/// Throws std::domain_error for xi outside [0, 1].
ChannelSet perturb_csi(const ChannelSet& ch, double xi, uint64_t seed);

}  // namespace irsrrm
