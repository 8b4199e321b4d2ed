#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "irsrrm/common.hpp"
#include "irsrrm/model.hpp"

namespace irsrrm {

/// Projection of (x0, xrest) onto the cone { a * x0 >= ||xrest||_2 }, a > 0.
/// Points in the polar cone map to the origin, boundary-exterior points to
/// the nearest cone boundary point.
std::pair<double, rvec> soc_project(double x0, const rvec& xrest, double a);
std::pair<double, cvec> soc_project(double x0, const cvec& xrest, double a);

/// Componentwise-minimal power meeting SINR_k >= gamma for all k, via the
/// interference-function iteration p_k <- gamma * (sum_{j!=k} p_j b(j,k) +
/// sigma2) / b(k,k) started from zero. Returns std::nullopt when the minimal
/// solution exceeds p_max in some component or no fixed point exists.
/// gains(j, k) is the received power gain of ST j at DT k.
std::optional<rvec> power_min_fixed_point(double gamma, const rmat& gains, double sigma2,
                                          const rvec& p_max);

/// Result of a phase-feasibility test; phi is a certificate when feasible
/// (all |phi_n| <= 1 and min_k SINR_k(phi, p) >= gamma on the given channels).
struct PhaseFeasibility {
  bool feasible = false;
  cvec phi;
  int iters = 0;
  double best_ratio = 0.0;  ///< best min_k SINR_k / gamma seen
};

/// Decides whether some phi with |phi_n| <= 1 attains SINR_k >= gamma for all
/// k at the fixed power p, by operator splitting on the second-order-cone
/// form: per-user cone projection of the stacked received amplitudes, an
/// entrywise disk projection of phi, and a least-squares consensus solve whose
/// N x N factorization is computed once per (p, channels).
///
/// "Infeasible" is approximate near the boundary (iteration cutoff); a
/// declared Feasible always carries an exact certificate.
class PhaseFeasibilitySolver {
 public:
  PhaseFeasibilitySolver(const rvec& p, const EffectiveChannels& eff);

  PhaseFeasibility solve(double gamma, const cvec& phi_init, double tol_feas, int max_iter) const;

  int n() const { return n_; }

 private:
  int K_;
  int n_;
  double sigma_;
  std::vector<cmat> B_;  ///< per DT k: K x n rows sqrt(p_j) hbar(j,k)^H
  Eigen::LLT<cmat> consensus_llt_;
};

/// One-shot wrapper around PhaseFeasibilitySolver.
PhaseFeasibility soc_feasibility_phase(double gamma, const rvec& p, const EffectiveChannels& eff,
                                       double tol_feas, int max_iter, const cvec& phi_init);

/// Bisection on a monotone feasibility predicate over [lo, hi]. predicate(lo)
/// is assumed true (lo = 0 uses the zero-solution convention). Returns the
/// final lower end; *upper_bound_hit (optional) reports that every probe was
/// feasible, i.e. the upper bound was not binding.
double bisect(const std::function<bool(double)>& predicate, double lo, double hi, double eps,
              bool* upper_bound_hit = nullptr);

}  // namespace irsrrm
