#include "irsrrm/admm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace irsrrm {

AdmmParams AdmmParams::for_delta(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("AdmmParams: delta must be positive");
  AdmmParams p;
  p.delta = d;
  p.alpha = 1.0 / (d + 0.01);
  return p;
}

double delta_upper_bound(int M, int K, int N, double p_max_max) {
  double s = std::sqrt(16.0 * M * K * N * p_max_max);
  return (-0.01 + std::sqrt(0.01 * 0.01 + s)) / 2.0;
}

double sinr_upper_bound(const EffectiveChannels& eff) {
  double best = 0.0;
  for (int k = 0; k < eff.K; ++k) {
    double amp = eff.hbar(k, k).cwiseAbs().sum();
    best = std::max(best, eff.p_max(k) * amp * amp / eff.sigma2);
  }
  return best;
}

cvec update_phibar(const cmat& Hbar_k, const cvec& lambda_k, const cvec& w_k, const cvec& psi_k,
                   const cvec& f_k, const rvec& mu_k, double c) {
  const int n = static_cast<int>(Hbar_k.rows());
  cmat A = c * (cmat::Identity(n, n) + Hbar_k * Hbar_k.adjoint());
  A.diagonal() += 2.0 * mu_k.cast<cd>();
  cvec rhs = lambda_k + c * w_k + Hbar_k * (psi_k + c * f_k);
  cvec phibar = Eigen::LLT<cmat>(A).solve(rhs);
  if (!phibar.allFinite()) throw std::runtime_error("update_phibar: non-finite solution");
  return phibar;
}

cmat update_w_block(const cmat& Xi_m, double alpha, double c) {
  double norm = Xi_m.norm();
  if (norm <= alpha) return cmat::Zero(Xi_m.rows(), Xi_m.cols());
  return ((norm - alpha) / (c * norm)) * Xi_m;
}

Eigen::RowVectorXcd update_f_row(const Eigen::RowVectorXcd& b_k, const Eigen::RowVectorXcd& psi_k,
                                 double gamma, double c, int k) {
  if (!(gamma > 0.0)) throw std::domain_error("update_f_row: gamma must be positive");
  const int len = static_cast<int>(b_k.size());
  const cd s = c * b_k(k) - psi_k(k);
  Eigen::RowVectorXcd v(len - 1);
  int idx = 0;
  for (int j = 0; j < len; ++j)
    if (j != k) v(idx++) = c * b_k(j) - psi_k(j);

  const double vnorm = v.norm();
  const double sre = s.real();
  const double sqg = std::sqrt(gamma);
  Eigen::RowVectorXcd f(len);
  double fkk_re;
  Eigen::RowVectorXcd frest;
  if (sre / sqg >= vnorm) {  // constraint slack, epsilon_k = 0
    fkk_re = sre / c;
    frest = v / c;
  } else if (vnorm <= -sqg * sre) {  // polar cone: cone coordinates vanish
    fkk_re = 0.0;
    frest = Eigen::RowVectorXcd::Zero(len - 1);
  } else {  // active: dual epsilon_k > 0, constraint tight
    double eps_k = (gamma * vnorm - sqg * sre) / (1.0 + gamma);
    fkk_re = (sre + eps_k / sqg) / c;
    frest = v * ((vnorm - eps_k) / (c * vnorm));
  }
  idx = 0;
  for (int j = 0; j < len; ++j)
    f(j) = (j == k) ? cd(fkk_re, s.imag() / c) : frest(idx++);
  return f;
}

void update_mu(AdmmState& state, int k, double p_max_k, double c, MuMode mode) {
  const int n = static_cast<int>(state.Phibar.rows());
  for (int i = 0; i < n; ++i) {
    double mag2 = std::norm(state.Phibar(i, k));
    if (mode == MuMode::kDualAscent) {
      state.mu(i, k) = std::max(0.0, state.mu(i, k) + c * (mag2 - p_max_k));
    } else {
      state.mu(i, k) = std::max(0.0, p_max_k - mag2);
    }
  }
}

cmat coupling_matrix(const AdmmState& state, const EffectiveChannels& eff) {
  const int K = eff.K;
  cmat B(K, K + 1);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) B(k, j) = eff.hbar(j, k).dot(state.Phibar.col(j));
  B.col(K).setConstant(std::sqrt(eff.sigma2));
  return B;
}

void update_multipliers(AdmmState& state, const cmat& B, double c) {
  state.Lambda += c * (state.W - state.Phibar);
  state.Psi += c * (state.F - B);
}

std::vector<int> extract_subset(const cmat& W, int M, int L, double zero_threshold) {
  if (!(zero_threshold > 0.0 && zero_threshold < 1.0))
    throw std::domain_error("extract_subset: zero_threshold must lie in (0, 1)");
  rvec norms(M);
  for (int m = 0; m < M; ++m) norms(m) = W.middleRows(m * L, L).norm();
  double top = norms.maxCoeff();
  std::vector<int> subset;
  if (top <= 0.0) return subset;
  for (int m = 0; m < M; ++m)
    if (norms(m) > zero_threshold * top) subset.push_back(m);
  return subset;
}

AdmmInnerResult admm_inner_solve(double gamma, const EffectiveChannels& eff,
                                 const AdmmParams& params) {
  if (!(gamma > 0.0)) throw std::domain_error("admm_inner_solve: gamma must be positive");
  const int K = eff.K;
  const int N = eff.n_elements();
  const int M = eff.M;
  const int L = eff.L;
  const double c = params.c;

  // Nondimensionalize per target: amplitudes are measured in units of the
  // column magnitude the target itself demands, min(sqrt(p_max),
  // sqrt(gamma) sigma / ||hbar_kk||). Without this the dual variables must
  // bridge the gap between alpha and micro-scale primal iterates one
  // c-times-residual step at a time.
  double h_norm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) h_norm = std::min(h_norm, eff.hbar(k, k).norm());
  double amp_scale = std::sqrt(eff.p_max.maxCoeff());
  if (h_norm > 0.0)
    amp_scale = std::min(amp_scale, std::sqrt(gamma) * std::sqrt(eff.sigma2) / h_norm);
  if (!(amp_scale > 0.0) || !std::isfinite(amp_scale)) amp_scale = std::sqrt(eff.p_max.maxCoeff());

  AdmmState st;
  st.gamma = gamma;
  st.Phibar = cmat::Zero(N, K);
  st.W = cmat::Zero(N, K);
  st.Lambda = cmat::Zero(N, K);
  st.F = cmat::Zero(K, K + 1);
  st.Psi = cmat::Zero(K, K + 1);
  st.mu = rmat::Zero(N, K);
  st.Hbar.reserve(K);
  for (int k = 0; k < K; ++k) {
    cmat Hk(N, K);
    for (int j = 0; j < K; ++j) Hk.col(j) = eff.hbar(k, j);
    st.Hbar.push_back(std::move(Hk));
  }

  // The column system matrix only changes through the box duals; keep the
  // mu = 0 factorization and the Gram part cached.
  std::vector<cmat> base_mat(K);
  std::vector<Eigen::LLT<cmat>> base_llt(K);
  for (int k = 0; k < K; ++k) {
    base_mat[k].noalias() = st.Hbar[k] * st.Hbar[k].adjoint();
    base_mat[k] += cmat::Identity(N, N);
    base_mat[k] *= c;
    base_llt[k].compute(base_mat[k]);
  }

  AdmmInnerResult out;
  // Residual plateau detection: an infeasible target keeps the primal
  // residual bounded away from zero, so a window without meaningful decrease
  // ends the probe early.
  constexpr int kStallMinIter = 800;
  constexpr int kStallWindow = 400;
  constexpr double kStallRatio = 0.97;
  double window_res = std::numeric_limits<double>::infinity();
  int window_start = 0;

  const double sigma = std::sqrt(eff.sigma2) / amp_scale;
  rvec caps = eff.p_max / (amp_scale * amp_scale);
  // Residuals are scale-free: the noise column fixes the smallest magnitude a
  // meaningful iterate can have, so it floors the normalization (an absolute
  // floor of 1 would declare instant convergence at sub-milliwatt scales).
  const double res_floor = sigma * std::sqrt(static_cast<double>(K));

  // Start at the per-user phase-aligned full-power point. Zero is a poor
  // start at large targets: the cone projection then lifts the diagonal of F
  // by only sigma/sqrt(gamma) per pass.
  for (int k = 0; k < K; ++k) {
    double amp = std::sqrt(caps(k));
    for (int n = 0; n < N; ++n) {
      cd h = eff.hbar(k, k)(n);
      double m = std::abs(h);
      st.Phibar(n, k) = m > 0.0 ? amp * h / m : cd(amp, 0.0);
    }
  }
  st.W = st.Phibar;
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) st.F(k, j) = eff.hbar(j, k).dot(st.Phibar.col(j));
  st.F.col(K).setConstant(sigma);

  cvec rhs(N);
  cmat A(N, N), B(K, K + 1), Xi(L, K);
  Eigen::LLT<cmat> llt_ws;
  for (int t = 0; t < params.max_inner_iter; ++t) {
    for (int k = 0; k < K; ++k) {
      rhs.noalias() = st.Hbar[k] * (st.Psi.col(k) + c * st.F.col(k));
      rhs += st.Lambda.col(k) + c * st.W.col(k);
      if (st.mu.col(k).maxCoeff() == 0.0) {
        st.Phibar.col(k) = base_llt[k].solve(rhs);
      } else {
        A = base_mat[k];
        A.diagonal() += 2.0 * st.mu.col(k).cast<cd>();
        llt_ws.compute(A);
        st.Phibar.col(k) = llt_ws.solve(rhs);
      }
    }
    if (!st.Phibar.allFinite()) throw std::runtime_error("admm_inner_solve: non-finite iterate");
    for (int k = 0; k < K; ++k) update_mu(st, k, caps(k), c, params.mu_mode);

    for (int m = 0; m < M; ++m) {
      Xi = c * st.Phibar.middleRows(m * L, L) - st.Lambda.middleRows(m * L, L);
      st.W.middleRows(m * L, L) = update_w_block(Xi, params.alpha, c);
    }

    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k) B(k, j) = eff.hbar(j, k).dot(st.Phibar.col(j));
    B.col(K).setConstant(sigma);
    for (int k = 0; k < K; ++k) st.F.row(k) = update_f_row(B.row(k), st.Psi.row(k), gamma, c, k);

    update_multipliers(st, B, c);

    double w_scale = std::max({res_floor, st.Phibar.norm(), st.W.norm()});
    double f_scale = std::max({res_floor, st.F.norm(), B.norm()});
    out.res_w = (st.W - st.Phibar).norm() / w_scale;
    out.res_f = (st.F - B).norm() / f_scale;
    out.iters = t + 1;

    double objective = 0.0;
    for (int m = 0; m < M; ++m) objective += params.alpha * st.W.middleRows(m * L, L).norm();
    out.objective = amp_scale * objective;  // back to physical units

    if (params.record_trace) out.trace.push_back({t, out.res_w, out.res_f, out.objective});

    if (out.res_w <= params.tol_primal && out.res_f <= params.tol_primal) {
      out.converged = true;
      break;
    }

    double res = out.res_w + out.res_f;
    if (t - window_start >= kStallWindow) {
      if (t >= kStallMinIter && res > kStallRatio * window_res) break;  // plateau
      window_res = res;
      window_start = t;
    }
  }

  out.Phibar = amp_scale * st.Phibar;
  out.W = amp_scale * st.W;
  return out;
}

SelectionResult bisection_identify(const EffectiveChannels& eff, const AdmmParams& params) {
  SelectionResult sel;
  sel.gamma_hi = params.gamma_hi > 0.0 ? params.gamma_hi : sinr_upper_bound(eff);
  double lo = params.gamma_lo;
  double hi = sel.gamma_hi;
  if (!(hi > lo)) throw std::invalid_argument("bisection_identify: empty bisection interval");

  bool have_feasible = false;
  AdmmInnerResult best;
  do {
    double mid = 0.5 * (lo + hi);
    AdmmInnerResult r = admm_inner_solve(mid, eff, params);
    sel.iterations += r.iters;
    ++sel.bisect_steps;
    if (r.converged && r.objective <= params.delta) {
      lo = mid;
      best = std::move(r);
      have_feasible = true;
    } else {
      hi = mid;
    }
  } while (hi - lo > params.eps_bisect);

  sel.gamma_star = lo;
  sel.block_norms = rvec::Zero(eff.M);
  if (have_feasible) {
    for (int m = 0; m < eff.M; ++m)
      sel.block_norms(m) = best.W.middleRows(m * eff.L, eff.L).norm();
    sel.objective = best.objective;
    sel.subset = extract_subset(best.W, eff.M, eff.L, params.zero_threshold);
    sel.trace = std::move(best.trace);
  }
  return sel;
}

}  // namespace irsrrm
