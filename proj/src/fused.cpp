#include "snbclust/fused.hpp"

#include "snbclust/kmeans.hpp"
#include "snbclust/parallel.hpp"
#include "snbclust/rng.hpp"

#include <cmath>
#include <limits>

namespace snbclust {

void FusedConfig::validate() const {
  if (lambda < 0.0) throw ValidationError("fused: lambda must be non-negative");
  if (gamma_mcp <= 1.0) throw ValidationError("fused: gamma_mcp must exceed 1");
  if (rho_admm <= 0.0) throw ValidationError("fused: rho_admm must be positive");
  if (gamma_mcp * rho_admm <= 1.0)
    throw ValidationError("fused: need gamma_mcp * rho_admm > 1");
  if (tol_admm <= 0.0 || max_admm_iter < 1)
    throw ValidationError("fused: bad ADMM stopping parameters");
  if (group_tol < 0.0) throw ValidationError("fused: group_tol must be >= 0");
}

double mcp_penalty(double x, double lambda, double gamma_mcp) {
  const double ax = std::fabs(x);
  if (ax <= gamma_mcp * lambda) return lambda * ax - x * x / (2.0 * gamma_mcp);
  return 0.5 * gamma_mcp * lambda * lambda;
}

double mcp_prox(double v, double lambda, double gamma_mcp, double rho) {
  const double av = std::fabs(v);
  if (av <= lambda / rho) return 0.0;
  if (av > gamma_mcp * lambda) return v;
  const double sign = v > 0.0 ? 1.0 : -1.0;
  return (v - sign * lambda / rho) / (1.0 - 1.0 / (gamma_mcp * rho));
}

double fused_penalty(const Matrix& beta, double lambda, double gamma_mcp) {
  double h = 0.0;
  const auto K = beta.cols();
  for (Eigen::Index j = 0; j < beta.rows(); ++j)
    for (Eigen::Index k = 0; k < K; ++k)
      for (Eigen::Index l = k + 1; l < K; ++l)
        h += mcp_penalty(beta(j, k) - beta(j, l), lambda, gamma_mcp);
  return h;
}

namespace {

// Pair index layout: p runs over (k, l) with k < l in row-major order.
void pairwise_diff(const Vector& beta, Vector& out) {
  int p = 0;
  const auto K = beta.size();
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = k + 1; l < K; ++l) out[p++] = beta[k] - beta[l];
}

// D^T v: +v_p at k, -v_p at l.
void pairwise_adjoint(const Vector& v, Vector& out) {
  out.setZero();
  int p = 0;
  const auto K = out.size();
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = k + 1; l < K; ++l) {
      out[k] += v[p];
      out[l] -= v[p];
      ++p;
    }
}

}  // namespace

AdmmOut fused_quadratic_admm(const Vector& weight, const Vector& linear,
                             const FusedConfig& fcfg, Vector& eta, Vector& u) {
  const auto K = weight.size();
  const double rho = fcfg.rho_admm;

  // diag(W) + rho*(K*I - J), ridged so an all-zero weight row stays PD.
  Eigen::MatrixXd A = Eigen::MatrixXd::Constant(K, K, -rho);
  for (Eigen::Index k = 0; k < K; ++k)
    A(k, k) = weight[k] + rho * static_cast<double>(K - 1) + 1e-12;
  Eigen::LDLT<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success)
    throw NumericError("fused ADMM: LDLT factorization failed");

  Vector beta(K), rhs(K), adj(K), diff(eta.size()), eta_old(eta.size());
  bool converged = false;
  for (int it = 0; it < fcfg.max_admm_iter; ++it) {
    pairwise_adjoint(eta - u, adj);
    rhs = linear + rho * adj;
    beta = solver.solve(rhs);
    pairwise_diff(beta, diff);
    eta_old = eta;
    for (Eigen::Index p = 0; p < eta.size(); ++p)
      eta[p] = mcp_prox(diff[p] + u[p], fcfg.lambda, fcfg.gamma_mcp, rho);
    u += diff - eta;
    const double primal = (diff - eta).cwiseAbs().maxCoeff();
    pairwise_adjoint(eta - eta_old, adj);
    const double dual = rho * adj.cwiseAbs().maxCoeff();
    if (primal <= fcfg.tol_admm && dual <= fcfg.tol_admm) {
      converged = true;
      break;
    }
  }
  return {std::move(beta), converged};
}

bool m_step_beta_fused(const NbWorkspace& ws, const Matrix& responsibilities,
                       Matrix& beta, const FusedConfig& fcfg, double tol_irls,
                       int max_irls_iter) {
  const auto G = ws.n_genes();
  const auto n = ws.n_samples();
  const auto K = beta.cols();
  Matrix zt = responsibilities.transpose();

  if (K == 1) {
    // No pairs: plain unpenalized weighted IRLS.
    Vector no_star = Vector::Zero(G);
    Matrix b = beta;
    m_step_beta(ws, responsibilities, no_star, b, 0.0, tol_irls, max_irls_iter);
    beta = b;
    return true;
  }

  const auto P = K * (K - 1) / 2;
  bool all_converged = true;
  for (Eigen::Index j = 0; j < G; ++j) {
    const double* y = ws.counts().counts.row(j).data();
    const double phi = ws.phi()[j];
    Vector bj = beta.row(j).transpose();
    Vector eta(P), u = Vector::Zero(P);
    pairwise_diff(bj, eta);

    for (int it = 0; it < max_irls_iter; ++it) {
      Vector weight = Vector::Zero(K), linear = Vector::Zero(K);
      for (Eigen::Index k = 0; k < K; ++k) {
        const double eb = std::exp(bj[k]);
        const double* z = zt.row(k).data();
        for (Eigen::Index i = 0; i < n; ++i) {
          if (z[i] == 0.0) continue;
          double mu = ws.s()[i] * eb;
          double log_mu = ws.log_s()[i] + bj[k];
          if (mu < kMuMin) { mu = kMuMin; log_mu = std::log(kMuMin); }
          else if (mu > kMuMax) { mu = kMuMax; log_mu = std::log(kMuMax); }
          const double w = z[i] * mu * phi / (phi + mu);
          const double c = (log_mu - ws.log_s()[i]) + (y[i] - mu) / mu;
          weight[k] += w;
          linear[k] += w * c;
        }
      }
      auto admm = fused_quadratic_admm(weight, linear, fcfg, eta, u);
      all_converged = all_converged && admm.converged;
      const double delta = (admm.beta - bj).cwiseAbs().maxCoeff();
      bj = admm.beta;
      if (delta < tol_irls) break;
    }
    beta.row(j) = bj.transpose();
  }
  return all_converged;
}

namespace {

struct FusedRestart {
  bool degenerate = false;
  bool converged = false;
  bool admm_ok = true;  // last M-step's ADMM solves all met tol_admm
  double penalized_loglik = -std::numeric_limits<double>::infinity();
  double loglik = 0.0;
  Vector pi;
  Matrix beta;
  Matrix z;
  std::vector<double> trace;
};

FusedRestart run_fused_restart(const NbWorkspace& ws,
                               const NormalizationProfile& prof,
                               const GlobalMeans& gm, const FitConfig& cfg,
                               const FusedConfig& fcfg, std::uint64_t sub_seed) {
  const auto n = ws.n_samples();
  const int K = cfg.K;
  Rng rng(sub_seed);

  FusedRestart out;
  if (cfg.init == InitKind::warm_start) {
    out.pi = cfg.warm_pi;
    out.beta = cfg.warm_beta;
  } else {
    std::vector<int> labels(n);
    if (cfg.init == InitKind::kmeans_logcpm) {
      Matrix pts = prof.log_cpm.transpose();
      labels = kmeans(pts, K, rng, cfg.kmeans_restarts).labels;
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        labels[i] = static_cast<int>(rng.uniform_int(K));
    }
    Matrix z0 = hard_responsibilities(labels, K);
    out.pi = m_step_pi(z0);
    if (out.pi.minCoeff() <= 0.0) {
      out.degenerate = true;
      return out;
    }
    out.beta = gm.beta_star.replicate(1, K);
    out.admm_ok = m_step_beta_fused(ws, z0, out.beta, fcfg, cfg.tol_irls_inner,
                                    cfg.max_irls_iter);
  }

  double prev_pen = -std::numeric_limits<double>::infinity();
  bool need_final_e = false;
  for (int it = 0; it < cfg.max_em_iter; ++it) {
    double ll = 0.0;
    out.z = e_step(ws, out.pi, out.beta, &ll);
    const double pen = ll - fused_penalty(out.beta, fcfg.lambda, fcfg.gamma_mcp);
    out.trace.push_back(pen);
    out.loglik = ll;
    out.penalized_loglik = pen;
    need_final_e = false;

    const Vector mass = out.z.colwise().sum().transpose();
    if (mass.minCoeff() < kVanishFraction * static_cast<double>(n)) {
      out.degenerate = true;
      return out;
    }
    if (it > 0 && std::fabs(pen - prev_pen) <= cfg.tol_em * std::max(1.0, std::fabs(prev_pen))) {
      out.converged = true;
      break;
    }
    prev_pen = pen;
    out.pi = m_step_pi(out.z);
    out.admm_ok = m_step_beta_fused(ws, out.z, out.beta, fcfg, cfg.tol_irls_inner,
                                    cfg.max_irls_iter);
    need_final_e = true;
  }
  if (need_final_e) {
    double ll = 0.0;
    out.z = e_step(ws, out.pi, out.beta, &ll);
    const double pen = ll - fused_penalty(out.beta, fcfg.lambda, fcfg.gamma_mcp);
    out.trace.push_back(pen);
    out.loglik = ll;
    out.penalized_loglik = pen;
    const Vector mass = out.z.colwise().sum().transpose();
    if (mass.minCoeff() < kVanishFraction * static_cast<double>(n)) out.degenerate = true;
  }
  return out;
}

}  // namespace

MixtureFit fit_fused(const CountMatrix& m, const NormalizationProfile& prof,
                     const GlobalMeans& gm, const FitConfig& cfg,
                     const FusedConfig& fcfg) {
  NbWorkspace ws(m, prof);
  cfg.validate(ws.n_samples());
  fcfg.validate();
  if (gm.beta_star.size() != ws.n_genes())
    throw ValidationError("fit_fused: beta_star length does not match gene count");

  std::vector<FusedRestart> outcomes(cfg.n_restarts);
  parallel_for(cfg.n_restarts, cfg.threads, [&](int r) {
    outcomes[r] = run_fused_restart(
        ws, prof, gm, cfg, fcfg,
        Rng::fork(cfg.seed, static_cast<std::uint64_t>(r)).next_u64());
  });

  int best = -1;
  int usable = 0;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    if (outcomes[r].degenerate) continue;
    ++usable;
    if (best < 0 || outcomes[r].penalized_loglik > outcomes[best].penalized_loglik)
      best = r;
  }
  if (best < 0) throw NumericError("fit_fused: every restart collapsed a component");

  FusedRestart& win = outcomes[best];
  MixtureFit f;
  f.K = cfg.K;
  f.lambda = fcfg.lambda;
  f.pi = m_step_pi(win.z);
  f.beta = std::move(win.beta);
  f.beta_star = gm.beta_star;
  f.responsibilities = std::move(win.z);
  f.penalized_loglik = win.penalized_loglik;
  f.loglik = win.loglik;
  f.loglik_trace = std::move(win.trace);
  f.converged = win.converged && win.admm_ok;
  f.iterations = static_cast<int>(f.loglik_trace.size());
  f.restarts_used = usable;
  f.n_shrunk = 0;
  for (Eigen::Index j = 0; j < f.beta.rows(); ++j)
    for (Eigen::Index k = 0; k < f.beta.cols(); ++k)
      if (f.beta(j, k) == f.beta_star[j]) ++f.n_shrunk;
  return f;
}

std::vector<int> gene_groups(const Eigen::RowVectorXd& beta_row, double group_tol) {
  const auto K = beta_row.size();
  std::vector<int> group(K, 0);
  int next = 0;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (group[k] != 0) continue;
    ++next;
    // Flood fill: |beta_k - beta_l| <= tol links k and l.
    std::vector<Eigen::Index> stack{k};
    group[k] = next;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (Eigen::Index l = 0; l < K; ++l) {
        if (group[l] == 0 && std::fabs(beta_row[a] - beta_row[l]) <= group_tol) {
          group[l] = next;
          stack.push_back(l);
        }
      }
    }
  }
  return group;
}

std::vector<char> fused_selected_genes(const MixtureFit& fit, double group_tol) {
  const auto G = fit.beta.rows();
  std::vector<char> mask(G, 0);
  for (Eigen::Index j = 0; j < G; ++j) {
    auto groups = gene_groups(fit.beta.row(j), group_tol);
    for (int g : groups)
      if (g != 1) { mask[j] = 1; break; }
  }
  return mask;
}

}  // namespace snbclust
