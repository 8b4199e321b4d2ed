#include <doctest.h>

#include <cmath>
#include <numbers>

#include "irsrrm/admm.hpp"
#include "irsrrm/feasibility.hpp"
#include "irsrrm/rng.hpp"

using namespace irsrrm;

namespace {

cmat random_cmat(int r, int c, Rng& rng, double var = 1.0) {
  cmat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.cnormal(var);
  return m;
}

EffectiveChannels random_eff(int K, int M, int L, Rng& rng, double sigma2, double p_cap) {
  EffectiveChannels eff;
  eff.K = K;
  eff.M = M;
  eff.L = L;
  eff.sigma2 = sigma2;
  eff.p_max = rvec::Constant(K, p_cap);
  eff.hb.resize(static_cast<size_t>(K) * K);
  for (auto& v : eff.hb) {
    v.resize(M * L);
    for (int i = 0; i < v.size(); ++i) v(i) = rng.cnormal(1.0);
  }
  return eff;
}

// Objective of the F-row subproblem.
double f_row_objective(const Eigen::RowVectorXcd& f, const Eigen::RowVectorXcd& b,
                       const Eigen::RowVectorXcd& psi, double c) {
  cd lin = (psi.conjugate().cwiseProduct(f - b)).sum();
  return lin.real() + 0.5 * c * (f - b).squaredNorm();
}

// Projection onto the row constraint set: sqrt(1/gamma) Re(f_kk) >=
// ||f_{-k,k}||, diagonal imaginary part free.
Eigen::RowVectorXcd project_row(const Eigen::RowVectorXcd& f, double gamma, int k) {
  const int len = static_cast<int>(f.size());
  cvec rest(len - 1);
  int idx = 0;
  for (int j = 0; j < len; ++j)
    if (j != k) rest(idx++) = f(j);
  auto [t, pr] = soc_project(f(k).real(), rest, std::sqrt(1.0 / gamma));
  Eigen::RowVectorXcd out(len);
  idx = 0;
  for (int j = 0; j < len; ++j)
    out(j) = (j == k) ? cd(t, f(k).imag()) : pr(idx++);
  return out;
}

}  // namespace

TEST_CASE("delta bound values") {
  CHECK(delta_upper_bound(5, 5, 100, 0.1) == doctest::Approx(3.9713567874).epsilon(1e-9));
  CHECK(delta_upper_bound(15, 10, 300, 0.1) == doctest::Approx(8.1853641143).epsilon(1e-9));
  CHECK(delta_upper_bound(5, 5, 100, 0.1) > 3.9);
  CHECK(delta_upper_bound(5, 5, 100, 0.1) < 4.05);
  CHECK(delta_upper_bound(15, 10, 300, 0.1) > 8.0);
  CHECK(delta_upper_bound(15, 10, 300, 0.1) < 8.3);
  CHECK(delta_upper_bound(3, 2, 10, 0.0) == 0.0);
}

TEST_CASE("norm inequality: capped columns never violate the bound budget") {
  Rng rng(100);
  const int M = 4, K = 3, L = 5, N = M * L;
  const double p_cap = 0.1;
  double bound = delta_upper_bound(M, K, N, p_cap);
  for (int trial = 0; trial < 1000; ++trial) {
    cmat Phibar(N, K);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < K; ++k) {
        // uniform over the per-entry disk of radius sqrt(p_cap)
        double r = std::sqrt(p_cap) * std::sqrt(rng.uniform());
        double a = 2.0 * std::numbers::pi * rng.uniform();
        Phibar(i, k) = cd(r * std::cos(a), r * std::sin(a));
      }
    for (double delta : {bound, 1.3 * bound}) {
      double alpha = 1.0 / (delta + 0.01);
      double obj = 0.0;
      for (int m = 0; m < M; ++m) obj += alpha * Phibar.middleRows(m * L, L).norm();
      CHECK(obj <= delta + 1e-12);
    }
  }
}

TEST_CASE("block soft-threshold named cases") {
  SUBCASE("zero input stays zero") {
    cmat z = cmat::Zero(3, 2);
    CHECK(update_w_block(z, 0.5, 1.0).norm() == 0.0);
  }
  SUBCASE("norm-2 input with alpha 1, c 1 halves") {
    cmat Xi(1, 1);
    Xi(0, 0) = cd(2.0, 0.0);
    cmat W = update_w_block(Xi, 1.0, 1.0);
    CHECK(W(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(W.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("block soft-threshold satisfies the subgradient equation") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    int L = 1 + static_cast<int>(rng.next_u64() % 4);
    int K = 1 + static_cast<int>(rng.next_u64() % 4);
    double alpha = 0.1 + 2.0 * rng.uniform();
    double c = 0.2 + 2.0 * rng.uniform();
    cmat Xi = random_cmat(L, K, rng);
    cmat W = update_w_block(Xi, alpha, c);
    if (W.norm() == 0.0) {
      CHECK(Xi.norm() <= alpha * (1.0 + 1e-12));
    } else {
      CHECK(Xi.norm() > alpha);
      cmat resid = alpha * W / W.norm() + c * W - Xi;
      CHECK(resid.norm() <= 1e-10 * std::max(1.0, Xi.norm()));
    }
  }
}

TEST_CASE("f-row update: interior fixed point") {
  Rng rng(102);
  const int K = 3;
  double gamma = 2.0, c = 1.3;
  // construct b deep inside the cone so the update returns b exactly
  Eigen::RowVectorXcd b(K + 1);
  for (int j = 0; j <= K; ++j) b(j) = rng.cnormal(0.01);
  b(1) = cd(50.0, 0.0);
  Eigen::RowVectorXcd psi = Eigen::RowVectorXcd::Zero(K + 1);
  Eigen::RowVectorXcd f = update_f_row(b, psi, gamma, c, 1);
  CHECK((f - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("f-row update: hand-solved boundary case") {
  // K = 1, gamma = 1, c = 1, psi = 0, b = (0, 2): epsilon = 1, f = (1, 1)
  Eigen::RowVectorXcd b(2), psi(2);
  b << cd(0, 0), cd(2, 0);
  psi.setZero();
  Eigen::RowVectorXcd f = update_f_row(b, psi, 1.0, 1.0, 0);
  CHECK(f(0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f(1).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f(0).imag() == 0.0);
  // the cone holds with equality
  CHECK(f(0).real() == doctest::Approx(std::abs(f(1))).epsilon(1e-14));
  CHECK_THROWS_AS(update_f_row(b, psi, 0.0, 1.0, 0), std::domain_error);
}

TEST_CASE("f-row update matches a projected-gradient oracle") {
  Rng rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    int K = 1 + static_cast<int>(rng.next_u64() % 4);
    int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(K));
    double gamma = 0.1 + 4.0 * rng.uniform();
    double c = 0.3 + 2.0 * rng.uniform();
    Eigen::RowVectorXcd b(K + 1), psi(K + 1);
    for (int j = 0; j <= K; ++j) {
      b(j) = rng.cnormal(1.0);
      psi(j) = rng.cnormal(1.0);
    }
    Eigen::RowVectorXcd f = update_f_row(b, psi, gamma, c, k);

    // feasibility of the returned row
    double lhs = std::sqrt(1.0 / gamma) * f(k).real();
    double rhs = 0.0;
    for (int j = 0; j <= K; ++j)
      if (j != k) rhs += std::norm(f(j));
    rhs = std::sqrt(rhs);
    CHECK(lhs >= rhs - 1e-10 * (1.0 + rhs));

    // complementary slackness with the dual recovered from the formula
    double sre = (c * b(k) - psi(k)).real();
    double vnorm = 0.0;
    for (int j = 0; j <= K; ++j)
      if (j != k) vnorm += std::norm(c * b(j) - psi(j));
    vnorm = std::sqrt(vnorm);
    double eps_k = 0.0;
    if (sre / std::sqrt(gamma) < vnorm && vnorm > -std::sqrt(gamma) * sre)
      eps_k = (gamma * vnorm - std::sqrt(gamma) * sre) / (1.0 + gamma);
    CHECK(eps_k * (lhs - rhs) <= 1e-8 * (1.0 + std::abs(eps_k)));

    // independent projected-gradient descent on the same subproblem
    Eigen::RowVectorXcd x = project_row(b, gamma, k);
    double step = 0.4 / c;
    for (int it = 0; it < 4000; ++it) {
      Eigen::RowVectorXcd grad = psi + c * (x - b);
      x = project_row(x - step * grad, gamma, k);
    }
    double gap = f_row_objective(f, b, psi, c) - f_row_objective(x, b, psi, c);
    CHECK(gap <= 1e-6 * (1.0 + std::abs(f_row_objective(x, b, psi, c))));
  }
}

TEST_CASE("equivalent SINR cone forms agree") {
  Rng rng(104);
  for (int trial = 0; trial < 2000; ++trial) {
    int K = 1 + static_cast<int>(rng.next_u64() % 4);
    int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(K));
    double gamma = 0.05 + 5.0 * rng.uniform();
    Eigen::RowVectorXcd f(K + 1);
    for (int j = 0; j <= K; ++j) f(j) = rng.cnormal(1.0);
    f(k) = cd(f(k).real(), 0.0);  // the identity is for a real diagonal entry
    double full = 0.0, rest = 0.0;
    for (int j = 0; j <= K; ++j) {
      full += std::norm(f(j));
      if (j != k) rest += std::norm(f(j));
    }
    bool lhs = std::sqrt(1.0 + 1.0 / gamma) * f(k).real() >= std::sqrt(full);
    bool rhs = std::sqrt(1.0 / gamma) * f(k).real() >= std::sqrt(rest);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("phibar update: identity system") {
  // N = 1, K = 1, c = 1, H = 0, mu = 0 -> phibar = lambda + w
  cmat H = cmat::Zero(1, 1);
  cvec lambda(1), w(1), psi(1), f(1);
  lambda << cd(0.3, -0.2);
  w << cd(1.0, 0.5);
  psi << cd(7.0, 1.0);  // multiplied by H = 0
  f << cd(-2.0, 0.0);
  rvec mu = rvec::Zero(1);
  cvec phibar = update_phibar(H, lambda, w, psi, f, mu, 1.0);
  CHECK(std::abs(phibar(0) - (lambda(0) + w(0))) <= 1e-14);
}

TEST_CASE("phibar update zeroes the smooth-objective gradient") {
  Rng rng(105);
  for (int trial = 0; trial < 200; ++trial) {
    int N = 2 + static_cast<int>(rng.next_u64() % 6);
    int K = 1 + static_cast<int>(rng.next_u64() % 3);
    double c = 0.3 + 2.0 * rng.uniform();
    cmat H = random_cmat(N, K, rng);
    cvec lambda = random_cmat(N, 1, rng);
    cvec w = random_cmat(N, 1, rng);
    cvec psi = random_cmat(K, 1, rng);
    cvec f = random_cmat(K, 1, rng);
    rvec mu(N);
    for (int i = 0; i < N; ++i) mu(i) = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
    cvec x = update_phibar(H, lambda, w, psi, f, mu, c);

    // central differences are exact for a quadratic up to roundoff
    auto objective = [&](const cvec& phi) {
      cd t1 = lambda.dot(w - phi);
      cd t2 = psi.dot(f - H.adjoint() * phi);
      double quad = 0.5 * c * (w - phi).squaredNorm() +
                    0.5 * c * (f - H.adjoint() * phi).squaredNorm();
      double box = 0.0;
      for (int i = 0; i < N; ++i) box += mu(i) * std::norm(phi(i));
      return t1.real() + t2.real() + quad + box;
    };
    double scale = std::max(1.0, x.norm());
    double h = 1e-5 * scale;
    double gnorm2 = 0.0;
    for (int i = 0; i < N; ++i) {
      for (int part = 0; part < 2; ++part) {
        cvec e = cvec::Zero(N);
        e(i) = part == 0 ? cd(h, 0.0) : cd(0.0, h);
        double g = (objective(x + e) - objective(x - e)) / (2.0 * h);
        gnorm2 += g * g;
      }
    }
    double ref = c * scale;  // natural gradient scale of the quadratic
    CHECK(std::sqrt(gnorm2) <= 1e-6 * ref);
  }
}

TEST_CASE("phibar system matrix dominates c I") {
  Rng rng(106);
  const int N = 6, K = 3;
  cmat H = random_cmat(N, K, rng);
  rvec mu(N);
  for (int i = 0; i < N; ++i) mu(i) = rng.uniform();
  double c = 0.8;
  cmat A = c * (cmat::Identity(N, N) + H * H.adjoint());
  A.diagonal() += 2.0 * mu.cast<cd>();
  Eigen::SelfAdjointEigenSolver<cmat> es(A);
  CHECK(es.eigenvalues().minCoeff() >= c - 1e-12);
}

TEST_CASE("mu update modes") {
  AdmmState st;
  st.Phibar = cmat::Zero(2, 1);
  st.mu = rmat::Zero(2, 1);
  st.Phibar(0, 0) = cd(0.1, 0.0);  // |.|^2 = 0.01, below the cap
  st.Phibar(1, 0) = cd(0.0, 2.0);  // |.|^2 = 4, above the cap
  double p_cap = 1.0, c = 1.0;

  SUBCASE("dual ascent keeps slack constraints at zero") {
    update_mu(st, 0, p_cap, c, MuMode::kDualAscent);
    CHECK(st.mu(0, 0) == 0.0);
    CHECK(st.mu(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
    // exactly active constraint leaves mu unchanged
    st.Phibar(1, 0) = cd(1.0, 0.0);
    double before = st.mu(1, 0);
    update_mu(st, 0, p_cap, c, MuMode::kDualAscent);
    CHECK(st.mu(1, 0) == before);
  }
  SUBCASE("paper-literal mode reproduces the printed formula") {
    update_mu(st, 0, p_cap, c, MuMode::kPaperLiteral);
    CHECK(st.mu(0, 0) == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(st.mu(1, 0) == 0.0);
  }
}

TEST_CASE("multiplier update is identity at zero residual") {
  Rng rng(107);
  EffectiveChannels eff = random_eff(2, 2, 2, rng, 0.5, 1.0);
  AdmmState st;
  st.Phibar = random_cmat(4, 2, rng);
  st.W = st.Phibar;
  st.Lambda = random_cmat(4, 2, rng);
  st.Psi = random_cmat(2, 3, rng);
  cmat B = coupling_matrix(st, eff);
  st.F = B;
  cmat lam0 = st.Lambda, psi0 = st.Psi;
  update_multipliers(st, B, 1.7);
  CHECK((st.Lambda - lam0).norm() == 0.0);
  CHECK((st.Psi - psi0).norm() == 0.0);
}

TEST_CASE("multiplier update moves by c times the residual") {
  AdmmState st;
  st.Phibar = cmat::Zero(1, 1);
  st.W = cmat::Constant(1, 1, cd(0.5, 0.0));
  st.Lambda = cmat::Zero(1, 1);
  st.F = cmat::Zero(1, 2);
  st.Psi = cmat::Zero(1, 2);
  cmat B = cmat::Zero(1, 2);
  update_multipliers(st, B, 1.0);
  CHECK(st.Lambda(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("subset extraction") {
  SUBCASE("all-zero W gives the empty set") {
    CHECK(extract_subset(cmat::Zero(6, 2), 3, 2, 1e-3).empty());
  }
  SUBCASE("single nonzero block gives a singleton") {
    cmat W = cmat::Zero(6, 2);
    W(2, 0) = cd(1.0, 0.0);
    auto s = extract_subset(W, 3, 2, 1e-3);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == 1);
  }
  SUBCASE("threshold rule keeps blocks above the relative cut") {
    cmat W = cmat::Zero(3, 1);
    W(0, 0) = cd(1.0, 0.0);
    W(1, 0) = cd(1e-9, 0.0);
    W(2, 0) = cd(0.5, 0.0);
    auto s = extract_subset(W, 3, 1, 1e-3);
    CHECK(s == std::vector<int>{0, 2});
    CHECK_THROWS_AS(extract_subset(W, 3, 1, 0.0), std::domain_error);
  }
}

TEST_CASE("inner solve: tiny target admits a near-zero objective") {
  Rng rng(108);
  EffectiveChannels eff = random_eff(2, 2, 2, rng, 1.0, 1.0);
  AdmmParams params = AdmmParams::for_delta(1.0);
  AdmmInnerResult r = admm_inner_solve(1e-8, eff, params);
  CHECK(r.converged);
  CHECK(r.objective <= 1e-2);
  CHECK(r.res_w <= params.tol_primal);
  CHECK(r.res_f <= params.tol_primal);
}

TEST_CASE("inner solve records a residual trace when asked") {
  Rng rng(109);
  EffectiveChannels eff = random_eff(2, 2, 2, rng, 1.0, 1.0);
  AdmmParams params = AdmmParams::for_delta(1.0);
  params.record_trace = true;
  AdmmInnerResult r = admm_inner_solve(0.5, eff, params);
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.size() == static_cast<size_t>(r.iters));
  CHECK(r.trace.back().res_w == r.res_w);
}

TEST_CASE("feasibility of the inner solve is monotone along a target grid") {
  Rng rng(110);
  EffectiveChannels eff = random_eff(3, 3, 2, rng, 0.8, 1.0);
  AdmmParams params = AdmmParams::for_delta(1.2);
  // objective <= delta flips from true to false once as gamma grows
  bool was_infeasible = false;
  int flips = 0;
  for (double gamma : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
    AdmmInnerResult r = admm_inner_solve(gamma, eff, params);
    bool feas = r.converged && r.objective <= params.delta;
    if (feas && was_infeasible) ++flips;
    if (!feas) was_infeasible = true;
  }
  CHECK(flips == 0);
}

TEST_CASE("bisection triggers all modules when the budget is inactive") {
  Rng rng(111);
  const int K = 2, M = 3, L = 2;
  for (int trial = 0; trial < 5; ++trial) {
    EffectiveChannels eff = random_eff(K, M, L, rng, 0.5, 1.0);
    double bound = delta_upper_bound(M, K, M * L, 1.0);
    AdmmParams params = AdmmParams::for_delta(1.1 * bound);
    SelectionResult sel = bisection_identify(eff, params);
    CHECK(sel.subset.size() == static_cast<size_t>(M));
    CHECK(sel.gamma_star > 0.0);
    CHECK(sel.objective <= params.delta + 1e-9);
  }
}

TEST_CASE("bisection with a tiny budget triggers at most one module") {
  Rng rng(112);
  EffectiveChannels eff = random_eff(2, 3, 2, rng, 0.5, 1.0);
  AdmmParams params = AdmmParams::for_delta(1e-3);
  SelectionResult sel = bisection_identify(eff, params);
  CHECK(sel.subset.size() <= 1);
}
