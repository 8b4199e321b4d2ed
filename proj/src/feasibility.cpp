#include "irsrrm/feasibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace irsrrm {

namespace {

// Scaled second-order cone projection shared by the real and complex
// overloads. Returns the scaling of (x0, xrest) -> (t, s * xrest).
struct ConeScale {
  double t;
  double s;  // multiply xrest by s
};

ConeScale cone_scale(double x0, double norm_rest, double a) {
  if (a * x0 >= norm_rest) return {x0, 1.0};               // inside
  if (a * norm_rest <= -x0) return {0.0, 0.0};             // polar cone
  double t = (a * norm_rest + x0) / (a * a + 1.0);         // boundary point
  if (norm_rest == 0.0) return {std::max(t, 0.0), 0.0};
  return {t, a * t / norm_rest};
}

}  // namespace

std::pair<double, rvec> soc_project(double x0, const rvec& xrest, double a) {
  if (!(a > 0.0)) throw std::domain_error("soc_project: a must be positive");
  ConeScale cs = cone_scale(x0, xrest.norm(), a);
  return {cs.t, cs.s * xrest};
}

std::pair<double, cvec> soc_project(double x0, const cvec& xrest, double a) {
  if (!(a > 0.0)) throw std::domain_error("soc_project: a must be positive");
  ConeScale cs = cone_scale(x0, xrest.norm(), a);
  return {cs.t, cs.s * xrest};
}

std::optional<rvec> power_min_fixed_point(double gamma, const rmat& gains, double sigma2,
                                          const rvec& p_max) {
  const int K = static_cast<int>(gains.rows());
  if (gamma == 0.0) return rvec::Zero(K);
  if (!(gamma > 0.0)) throw std::domain_error("power_min_fixed_point: gamma must be >= 0");
  for (int k = 0; k < K; ++k)
    if (!(gains(k, k) > 0.0)) return std::nullopt;

  // The map is a standard interference function, so iterates from zero
  // increase monotonically toward the minimal fixed point; crossing the cap
  // certifies infeasibility.
  rvec p = rvec::Zero(K);
  rvec pn(K);
  constexpr int kMaxSweeps = 200000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (int k = 0; k < K; ++k) {
      double interference = 0.0;
      for (int j = 0; j < K; ++j)
        if (j != k) interference += p(j) * gains(j, k);
      pn(k) = gamma * (interference + sigma2) / gains(k, k);
      if (pn(k) > p_max(k) * (1.0 + 1e-9)) return std::nullopt;
    }
    double change = (pn - p).cwiseAbs().maxCoeff();
    p = pn;
    if (change <= 1e-12 * std::max(1.0, p.maxCoeff())) return p;
  }
  return std::nullopt;  // no convergence: spectral radius at or beyond one
}

PhaseFeasibilitySolver::PhaseFeasibilitySolver(const rvec& p, const EffectiveChannels& eff)
    : K_(eff.K), n_(eff.n_elements()), sigma_(std::sqrt(eff.sigma2)) {
  B_.reserve(K_);
  cmat A = cmat::Identity(n_, n_);
  for (int k = 0; k < K_; ++k) {
    cmat Bk(K_, n_);
    for (int j = 0; j < K_; ++j) Bk.row(j) = std::sqrt(p(j)) * eff.hbar(j, k).adjoint();
    A.noalias() += Bk.adjoint() * Bk;
    B_.push_back(std::move(Bk));
  }
  consensus_llt_.compute(A);
}

PhaseFeasibility PhaseFeasibilitySolver::solve(double gamma, const cvec& phi_init,
                                               double tol_feas, int max_iter) const {
  if (!(gamma > 0.0)) throw std::domain_error("phase feasibility: gamma must be positive");
  PhaseFeasibility out;

  // Douglas-Rachford in the product space (phi, y_1, ..., y_K) with
  // y_k in C^{K+1} carrying the per-user received amplitudes plus the sigma
  // slot. One projection handles the separable constraint set (unit disks on
  // phi, the SINR cone with Im(y_kk) = 0 per user); the other restores
  // consensus y_k = [B_k phi; sigma] via the precomputed Hermitian solve.
  const double margin = 10.0 * tol_feas;
  const double beta = std::sqrt(1.0 / (gamma * (1.0 + margin)));
  const double sigma2 = sigma_ * sigma_;

  cvec zu = phi_init.size() == n_ ? phi_init : cvec::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    double m = std::abs(zu(i));
    if (m > 1.0) zu(i) /= m;
  }
  cmat zy(K_ + 1, K_);
  for (int k = 0; k < K_; ++k) {
    zy.col(k).head(K_).noalias() = B_[k] * zu;
    zy(K_, k) = sigma_;
  }

  cvec cu(n_), rhs(n_), phi_cons(n_);
  cmat cy(K_ + 1, K_);
  cvec rest(K_);
  cmat Ycert(K_, K_);

  // Plateau detection: an infeasible target leaves a positive consensus gap;
  // abandon the probe once the best certificate ratio stops improving.
  constexpr int kMinIterBeforeStall = 1200;
  constexpr int kStallWindow = 1000;
  double window_best = 0.0;
  int window_start = 0;

  for (int it = 0; it < max_iter; ++it) {
    // P_C: entrywise disk projection of the phi block.
    cu = zu;
    for (int i = 0; i < n_; ++i) {
      double m = std::abs(cu(i));
      if (m > 1.0) cu(i) /= m;
    }
    // P_C: per-user cone projection on (Re y_kk, [y_{-k,k}, sigma slot]). The
    // diagonal imaginary part is a free coordinate: the cone inequality alone
    // already implies SINR >= gamma (imaginary leakage lands in the norm), so
    // pinning it to zero would only shrink the decided set.
    for (int k = 0; k < K_; ++k) {
      int idx = 0;
      for (int j = 0; j < K_; ++j)
        if (j != k) rest(idx++) = zy(j, k);
      rest(K_ - 1) = zy(K_, k);
      auto [t, proj_rest] = soc_project(zy(k, k).real(), rest, beta);
      idx = 0;
      for (int j = 0; j < K_; ++j)
        cy(j, k) = (j == k) ? cd(t, zy(k, k).imag()) : proj_rest(idx++);
      cy(K_, k) = proj_rest(K_ - 1);
    }

    // Exact certificate check at the disk-feasible point.
    for (int k = 0; k < K_; ++k) Ycert.col(k).noalias() = B_[k] * cu;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K_; ++k) {
      double sig = std::norm(Ycert(k, k));
      double interference = sigma2;
      for (int j = 0; j < K_; ++j)
        if (j != k) interference += std::norm(Ycert(j, k));
      min_ratio = std::min(min_ratio, sig / interference / gamma);
    }
    out.best_ratio = std::max(out.best_ratio, min_ratio);
    out.iters = it + 1;
    if (min_ratio >= 1.0) {
      out.feasible = true;
      out.phi = cu;
      return out;
    }

    if (it - window_start >= kStallWindow && it >= kMinIterBeforeStall) {
      if (out.best_ratio <= window_best * (1.0 + 1e-5) + 1e-12) break;  // stalled
      window_best = out.best_ratio;
      window_start = it;
    }

    // Reflection, then P_D (consensus projection).
    rhs = 2.0 * cu - zu;
    for (int k = 0; k < K_; ++k)
      rhs.noalias() += B_[k].adjoint() * (2.0 * cy.col(k).head(K_) - zy.col(k).head(K_)).eval();
    phi_cons = consensus_llt_.solve(rhs);

    // z += P_D(2 P_C(z) - z) - P_C(z)
    zu += phi_cons - cu;
    for (int k = 0; k < K_; ++k) {
      zy.col(k).head(K_) += (B_[k] * phi_cons - cy.col(k).head(K_)).eval();
      zy(K_, k) += sigma_ - cy(K_, k);
    }
  }
  out.phi = cu;
  return out;
}

PhaseFeasibility soc_feasibility_phase(double gamma, const rvec& p, const EffectiveChannels& eff,
                                       double tol_feas, int max_iter, const cvec& phi_init) {
  PhaseFeasibilitySolver solver(p, eff);
  return solver.solve(gamma, phi_init, tol_feas, max_iter);
}

double bisect(const std::function<bool(double)>& predicate, double lo, double hi, double eps,
              bool* upper_bound_hit) {
  if (!(hi > lo)) throw std::invalid_argument("bisect: hi must exceed lo");
  if (!(eps > 0.0)) throw std::invalid_argument("bisect: eps must be positive");
  bool all_feasible = true;
  do {
    double mid = 0.5 * (lo + hi);
    if (predicate(mid)) {
      lo = mid;
    } else {
      hi = mid;
      all_feasible = false;
    }
  } while (hi - lo > eps);
  if (upper_bound_hit) *upper_bound_hit = all_feasible;
  return lo;
}

}  // namespace irsrrm
