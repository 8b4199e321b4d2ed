#include "irsrrm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "irsrrm/feasibility.hpp"
#include "irsrrm/rng.hpp"

namespace irsrrm {

namespace {

// Next subset of fixed size in lexicographic order; false when exhausted.
bool next_combination(std::vector<int>& idx, int M) {
  int r = static_cast<int>(idx.size());
  for (int i = r - 1; i >= 0; --i) {
    if (idx[i] < M - r + i) {
      ++idx[i];
      for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Gram diagonals used throughout the AF formulas: [(H^H H)^{-1}]_kk and
// [(G G^H)^{-1}]_kk.
struct AfGrams {
  rvec hinv_diag;
  rvec ginv_diag;
};

AfGrams af_grams(const cmat& H, const cmat& G) {
  const int K = static_cast<int>(H.cols());
  cmat HtH = H.adjoint() * H;
  cmat GGt = G * G.adjoint();
  Eigen::FullPivLU<cmat> lu_h(HtH), lu_g(GGt);
  if (!lu_h.isInvertible() || !lu_g.isInvertible())
    throw std::runtime_error("af relay: singular Gram matrix");
  cmat Hinv = lu_h.inverse();
  cmat Ginv = lu_g.inverse();
  AfGrams out;
  out.hinv_diag = Hinv.diagonal().real();
  out.ginv_diag = Ginv.diagonal().real();
  (void)K;
  return out;
}

double af_zeta_from_grams(int k, const AfGrams& gr, const rvec& p, double P_r_max,
                          double sigma_v2) {
  const int K = static_cast<int>(p.size());
  double denom = 0.0;
  for (int j = 0; j < K; ++j) {
    double t = (p(j) + sigma_v2 * gr.hinv_diag(j)) * gr.ginv_diag(j);
    denom += t * t;
  }
  double num = P_r_max * (p(k) + sigma_v2 * gr.hinv_diag(k)) * gr.ginv_diag(k);
  return std::sqrt(num / denom);
}

}  // namespace

BaselineResult mes(const EffectiveChannels& eff, int cardinality, uint64_t init_seed,
                   const MaxMinOptions& opt) {
  if (eff.M > 12) throw std::invalid_argument("mes: enumeration limited to M <= 12");
  if (cardinality < 0 || cardinality > eff.M)
    throw std::invalid_argument("mes: cardinality out of range");
  BaselineResult best;
  best.sol.gamma = -1.0;
  if (cardinality == 0) {
    best.sol = alternate(eff, {}, init_seed, opt);
    return best;
  }
  std::vector<int> idx(cardinality);
  for (int i = 0; i < cardinality; ++i) idx[i] = i;
  do {
    MaxMinSolution sol = alternate(eff, idx, init_seed, opt);
    if (sol.gamma > best.sol.gamma) {
      best.subset = idx;
      best.sol = std::move(sol);
    }
  } while (next_combination(idx, eff.M));
  return best;
}

BaselineResult mrs(const EffectiveChannels& eff, int cardinality, uint64_t subset_seed,
                   uint64_t init_seed, const MaxMinOptions& opt) {
  if (cardinality < 0 || cardinality > eff.M)
    throw std::invalid_argument("mrs: cardinality out of range");
  // Partial Fisher-Yates draw of `cardinality` distinct modules.
  Rng rng(subset_seed);
  std::vector<int> pool(eff.M);
  for (int m = 0; m < eff.M; ++m) pool[m] = m;
  for (int i = 0; i < cardinality; ++i) {
    int j = i + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(eff.M - i));
    std::swap(pool[i], pool[j]);
  }
  BaselineResult out;
  out.subset.assign(pool.begin(), pool.begin() + cardinality);
  std::sort(out.subset.begin(), out.subset.end());
  out.sol = alternate(eff, out.subset, init_seed, opt);
  return out;
}

MaxMinSolution no_irs_maxmin(const cmat& d_direct, double sigma2, const rvec& p_max, double eps) {
  const int K = static_cast<int>(d_direct.rows());
  rmat gains(K, K);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j) gains(j, k) = std::norm(d_direct(k, j));

  MaxMinSolution sol;
  sol.phi = cvec();
  sol.p = rvec::Zero(K);
  if (!(gains.diagonal().minCoeff() > 0.0)) return sol;

  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) hi = std::min(hi, p_max(k) * gains(k, k) / sigma2);
  rvec cert = rvec::Zero(K);
  auto predicate = [&](double gamma) {
    auto p = power_min_fixed_point(gamma, gains, sigma2, p_max);
    if (p) cert = *p;
    return p.has_value();
  };
  sol.gamma = bisect(predicate, 0.0, hi, eps);
  sol.p = cert;
  sol.max_interval_width = eps;
  sol.outer_iters = 1;
  return sol;
}

cmat zf_relay_beam(const cmat& H, const cmat& G) {
  const int N = static_cast<int>(H.rows());
  const int K = static_cast<int>(H.cols());
  if (N < K) throw std::invalid_argument("zf_relay_beam: needs N >= K");
  cmat HtH = H.adjoint() * H;
  cmat GGt = G * G.adjoint();
  Eigen::FullPivLU<cmat> lu_h(HtH), lu_g(GGt);
  if (!lu_h.isInvertible() || !lu_g.isInvertible())
    throw std::runtime_error("zf_relay_beam: singular Gram matrix");
  cmat Vr = lu_h.solve(H.adjoint());        // (H^H H)^{-1} H^H, receive ZF
  cmat Vt = G.adjoint() * lu_g.inverse();   // G^H (G G^H)^{-1}, transmit ZF
  return Vt * Vr;
}

double af_amplify_factor(int k, const cmat& H, const cmat& G, const rvec& p, double P_r_max,
                         double sigma_v2) {
  return af_zeta_from_grams(k, af_grams(H, G), p, P_r_max, sigma_v2);
}

double af_sinr(int k, const cmat& H, const cmat& G, const rvec& p, double zeta, double sigma_v2,
               double sigma2) {
  AfGrams gr = af_grams(H, G);
  double z2 = zeta * zeta;
  return p(k) * z2 / (z2 * sigma_v2 * gr.hinv_diag(k) + sigma2);
}

AfSolution af_maxmin_power(const cmat& H, const cmat& G, const AfConfig& cfg, double eps) {
  const int K = static_cast<int>(H.cols());
  AfSolution sol;
  sol.p = rvec::Zero(K);
  sol.sinrs = rvec::Zero(K);
  if (H.rows() < K) {
    sol.valid = false;
    return sol;
  }
  AfGrams gr;
  try {
    gr = af_grams(H, G);
  } catch (const std::runtime_error&) {
    sol.valid = false;
    return sol;
  }

  auto sinrs_at = [&](const rvec& p) {
    rvec s(K);
    for (int k = 0; k < K; ++k) {
      double z = af_zeta_from_grams(k, gr, p, cfg.P_r_max, cfg.sigma_v2);
      s(k) = p(k) * z * z / (z * z * cfg.sigma_v2 * gr.hinv_diag(k) + cfg.sigma2);
    }
    return s;
  };

  if (cfg.sigma_v2 == 0.0) {
    // Noiseless relay: the SINRs are scale-invariant in p and balance in
    // closed form at p_k proportional to 1/sqrt(g_inv_kk).
    rvec dir(K);
    for (int k = 0; k < K; ++k) dir(k) = 1.0 / std::sqrt(gr.ginv_diag(k));
    double t = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) t = std::min(t, cfg.p_max(k) / dir(k));
    sol.p = t * dir;
    sol.sinrs = sinrs_at(sol.p);
    sol.gamma = sol.sinrs.minCoeff();
    return sol;
  }

  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k)
    hi = std::min(hi, cfg.p_max(k) / (cfg.sigma_v2 * gr.hinv_diag(k)));

  rvec cert = rvec::Zero(K);
  // Feasibility sweep: zeta recomputed from p each pass, then the power
  // needed to hit the target given that amplification.
  auto predicate = [&](double gamma) {
    rvec p = rvec::Zero(K);
    rvec pn(K);
    constexpr int kMaxSweeps = 1000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      for (int k = 0; k < K; ++k) {
        double z = af_zeta_from_grams(k, gr, p, cfg.P_r_max, cfg.sigma_v2);
        pn(k) = gamma * (cfg.sigma_v2 * gr.hinv_diag(k) + cfg.sigma2 / (z * z));
        if (pn(k) > cfg.p_max(k) * (1.0 + 1e-9)) return false;
      }
      double change = (pn - p).cwiseAbs().maxCoeff();
      p = pn;
      if (change <= 1e-12 * std::max(1.0, p.maxCoeff())) {
        rvec s = sinrs_at(p);
        if (s.minCoeff() >= gamma * (1.0 - 1e-9)) {
          cert = p;
          return true;
        }
        return false;
      }
    }
    return false;  // non-convergent sweep: conservatively infeasible
  };
  sol.gamma = bisect(predicate, 0.0, hi, eps);
  sol.p = cert;
  sol.sinrs = sinrs_at(sol.p);
  return sol;
}

}  // namespace irsrrm
