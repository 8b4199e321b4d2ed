#include "irsrrm/maxmin.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "irsrrm/rng.hpp"

namespace irsrrm {

namespace {

double min_sinr(const cvec& phi, const rvec& p, const EffectiveChannels& eff) {
  return sinr_all(phi, p, eff).minCoeff();
}

// Upper bound for the phase stage: per user, aligned phases and no
// interference; the max-min optimum cannot beat the weakest user's bound.
double phase_gamma_hi(const rvec& p, const EffectiveChannels& eff) {
  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < eff.K; ++k) {
    double amp = eff.hbar(k, k).cwiseAbs().sum();
    hi = std::min(hi, p(k) * amp * amp / eff.sigma2);
  }
  return hi;
}

double power_gamma_hi(const rmat& gains, const EffectiveChannels& eff) {
  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < eff.K; ++k)
    hi = std::min(hi, eff.p_max(k) * gains(k, k) / eff.sigma2);
  return hi;
}

}  // namespace

std::pair<cvec, double> optimize_phase(const rvec& p, const EffectiveChannels& eff,
                                       const cvec& phi_init, const MaxMinOptions& opt,
                                       double* interval_width) {
  const int n = eff.n_elements();
  if (n == 0) {
    if (interval_width) *interval_width = 0.0;
    return {cvec(), 0.0};
  }
  PhaseFeasibilitySolver solver(p, eff);
  cvec cert = phi_init;
  double lo = phi_init.size() == n ? min_sinr(phi_init, p, eff) : 0.0;
  double hi = phase_gamma_hi(p, eff);
  if (!(hi > lo)) {
    if (interval_width) *interval_width = 0.0;
    return {cert, lo};
  }
  auto predicate = [&](double gamma) {
    PhaseFeasibility r = solver.solve(gamma, cert, opt.tol_feas, opt.max_feas_iter);
    if (r.feasible) cert = r.phi;
    return r.feasible;
  };
  double eps = opt.eps;
  double star = bisect(predicate, lo, hi, eps);
  if (interval_width) *interval_width = eps;
  return {cert, star};
}

std::pair<rvec, double> optimize_power(const cvec& phi, const EffectiveChannels& eff,
                                       const rvec& p_init, const MaxMinOptions& opt,
                                       double* interval_width) {
  rmat gains = channel_gains(phi, eff);
  if (!(gains.diagonal().minCoeff() > 0.0)) {
    if (interval_width) *interval_width = 0.0;
    return {rvec::Zero(eff.K), 0.0};
  }
  rvec cert = p_init;
  double lo = sinr_from_gains(gains, p_init, eff.sigma2).minCoeff();
  double hi = power_gamma_hi(gains, eff);
  if (!(hi > lo)) {
    if (interval_width) *interval_width = 0.0;
    return {cert, lo};
  }
  auto predicate = [&](double gamma) {
    auto p = power_min_fixed_point(gamma, gains, eff.sigma2, eff.p_max);
    if (p) cert = *p;
    return p.has_value();
  };
  double star = bisect(predicate, lo, hi, opt.eps);
  if (interval_width) *interval_width = opt.eps;
  return {cert, star};
}

MaxMinSolution alternate(const EffectiveChannels& eff, const std::vector<int>& subset,
                         uint64_t init_seed, const MaxMinOptions& opt) {
  if (!(opt.eps > 0.0)) throw std::invalid_argument("alternate: eps must be positive");
  const int N = eff.n_elements();
  MaxMinSolution sol;
  sol.phi = cvec::Zero(N);
  sol.p = rvec::Zero(eff.K);
  if (subset.empty()) return sol;

  RestrictedChannels rc = restrict_to_modules(eff, subset);
  const int n = rc.eff.n_elements();

  Rng rng(init_seed);
  cvec phi(n);
  for (int i = 0; i < n; ++i) {
    double theta = 2.0 * std::numbers::pi * rng.uniform();
    phi(i) = cd(std::cos(theta), std::sin(theta));
  }
  rvec p = eff.p_max;

  double gamma_out = 0.0, gamma_in = 0.0;
  sol.converged = false;
  for (int round = 0; round < opt.max_outer; ++round) {
    double w1 = 0.0, w2 = 0.0;
    std::tie(phi, gamma_out) = optimize_phase(p, rc.eff, phi, opt, &w1);
    std::tie(p, gamma_in) = optimize_power(phi, rc.eff, p, opt, &w2);
    sol.trace.emplace_back(gamma_out, gamma_in);
    sol.outer_iters = round + 1;
    sol.max_interval_width = std::max({sol.max_interval_width, w1, w2});
    if (std::abs(gamma_out - gamma_in) <= opt.eps) {
      sol.converged = true;
      break;
    }
  }

  sol.gamma = gamma_in;
  sol.p = p;
  for (int r = 0; r < n; ++r) sol.phi(rc.elem_index[r]) = phi(r);
  return sol;
}

}  // namespace irsrrm
