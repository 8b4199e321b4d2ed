#pragma once

#include <string>
#include <vector>

#include "irsrrm/common.hpp"
#include "irsrrm/model.hpp"

namespace irsrrm {

enum class MuMode {
  kDualAscent,    // projected dual ascent, step c
  kPaperLiteral,  // mu = (p_max - |phibar|^2)^+
};

/// Parameters of the group-sparse selection phase. alpha is tied to delta as
/// 1 / (delta + 0.01) at construction.
struct AdmmParams {
  double c = 1.0;
  double delta = 1.0;
  double alpha = 1.0 / 1.01;
  double tol_primal = 1e-4;
  int max_inner_iter = 4000;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;  ///< <= 0: use the closed-form interference-free bound
  double eps_bisect = 1e-4;
  MuMode mu_mode = MuMode::kDualAscent;
  double zero_threshold = 1e-3;
  bool record_trace = false;
  /// Relative target raise on bisection probes; solving slightly above the
  /// probed target leaves the certificate strictly interior.
  double cert_margin = 1e-3;

  static AdmmParams for_delta(double delta);
};

/// All iterates of the two-block splitting for one SINR target.
struct AdmmState {
  cmat Phibar;  ///< N x K, column k is sqrt(p_k) phi relaxed to independent columns
  cmat W;       ///< N x K auxiliary copy of Phibar
  cmat Lambda;  ///< N x K multiplier for W = Phibar
  cmat F;       ///< K x (K+1), rows f_k; last column targets sigma * 1
  cmat Psi;     ///< K x (K+1) multiplier for the F coupling
  rmat mu;      ///< N x K nonnegative box-constraint duals
  double gamma = 0.0;
  std::vector<cmat> Hbar;  ///< per ST k: [hbar(k,1), ..., hbar(k,K)], N x K
};

struct AdmmTraceRow {
  int iter;
  double res_w;
  double res_f;
  double objective;
};

struct AdmmInnerResult {
  cmat Phibar;
  cmat W;
  double objective = 0.0;  ///< sum_m alpha ||W^m||_F at the final iterate
  double res_w = 0.0;
  double res_f = 0.0;
  int iters = 0;
  bool converged = false;
  /// min_k of the cap-clamped iterate's restricted SINR over the caller's
  /// target; >= 1 certifies feasibility with an explicit witness.
  double cert_ratio = 0.0;
  std::vector<AdmmTraceRow> trace;
};

/// Identified module subset with diagnostics.
struct SelectionResult {
  std::vector<int> subset;  ///< 0-based module indices
  double gamma_star = 0.0;
  rvec block_norms;       ///< ||W^m||_F at the final feasible target
  double objective = 0.0;  ///< sum_m alpha ||W^m||_F there
  int iterations = 0;      ///< accumulated inner iterations
  int bisect_steps = 0;
  double gamma_hi = 0.0;
  std::vector<AdmmTraceRow> trace;  ///< trace of the final feasible solve
};

/// Budget above which the group-sparsity constraint is provably inactive:
/// (-0.01 + sqrt(0.01^2 + sqrt(16 M K N p_max_max))) / 2.
double delta_upper_bound(int M, int K, int N, double p_max_max);

/// Solves the column subproblem: (c I + c Hbar_k Hbar_k^H + 2 diag(mu_k))
/// phibar = lambda_k + c w_k + Hbar_k (psi_k + c f_k). The system matrix is
/// Hermitian positive definite for any mu >= 0.
cvec update_phibar(const cmat& Hbar_k, const cvec& lambda_k, const cvec& w_k, const cvec& psi_k,
                   const cvec& f_k, const rvec& mu_k, double c);

/// Block soft-threshold: 0 when ||Xi||_F <= alpha, else scaled Xi.
cmat update_w_block(const cmat& Xi_m, double alpha, double c);

/// Row update of F: projection of (c b_k - psi_k) / c onto the cone
/// sqrt(1/gamma) Re(f_kk) >= ||f_{-k,k}||_2, with the imaginary part of the
/// diagonal entry passing through unconstrained. b_k is the k-th row of
/// [Htilde^H Phitilde, sigma 1].
Eigen::RowVectorXcd update_f_row(const Eigen::RowVectorXcd& b_k, const Eigen::RowVectorXcd& psi_k,
                                 double gamma, double c, int k);

/// Box-constraint dual update for column k (mode selected by params).
void update_mu(AdmmState& state, int k, double p_max_k, double c, MuMode mode);

/// Dual ascent on Lambda and Psi given the iterates at t+1; B is the current
/// coupling matrix [Htilde^H Phitilde, sigma 1].
void update_multipliers(AdmmState& state, const cmat& B, double c);

/// Rows of [Htilde^H Phitilde, sigma 1]: B(k, j) = hbar(j,k)^H phibar_j,
/// B(k, K) = sigma.
cmat coupling_matrix(const AdmmState& state, const EffectiveChannels& eff);

/// Two-block splitting for one SINR target; stops when both primal residuals
/// drop below tol_primal * max(1, ||Phibar||_F) or the iteration budget runs
/// out. Throws std::runtime_error on a non-finite iterate.
AdmmInnerResult admm_inner_solve(double gamma, const EffectiveChannels& eff,
                                 const AdmmParams& params);

/// Outer bisection of the SINR target; a target is feasible when the inner
/// solve converges with objective <= delta. The subset comes from the block
/// sparsity pattern of W at the last feasible target.
SelectionResult bisection_identify(const EffectiveChannels& eff, const AdmmParams& params);

/// Modules whose block norm exceeds zero_threshold * max block norm.
std::vector<int> extract_subset(const cmat& W, int M, int L, double zero_threshold);

/// Interference-free, phase-aligned upper bound on any attainable SINR:
/// max_k p_max_k (sum_n |hbar(k,k,n)|)^2 / sigma2.
double sinr_upper_bound(const EffectiveChannels& eff);

}  // namespace irsrrm
