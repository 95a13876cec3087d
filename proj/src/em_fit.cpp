#include "snbclust/em_fit.hpp"

#include "snbclust/kmeans.hpp"
#include "snbclust/parallel.hpp"
#include "snbclust/rng.hpp"

#include <cmath>
#include <limits>

namespace snbclust {

void FitConfig::validate(Eigen::Index n_samples) const {
  if (K < 1) throw ValidationError("fit: K must be >= 1");
  if (K > n_samples) throw ValidationError("fit: K exceeds the number of samples");
  if (lambda < 0.0) throw ValidationError("fit: lambda must be non-negative");
  if (tol_em <= 0.0 || tol_irls_inner <= 0.0)
    throw ValidationError("fit: tolerances must be positive");
  if (max_em_iter < 1 || max_irls_iter < 1)
    throw ValidationError("fit: iteration caps must be positive");
  if (n_restarts < 1) throw ValidationError("fit: n_restarts must be >= 1");
  if (init == InitKind::warm_start) {
    if (warm_pi.size() != K || warm_beta.cols() != K)
      throw ValidationError("fit: warm start dimensions do not match K");
  }
}

Matrix e_step(const NbWorkspace& ws, const Vector& pi, const Matrix& beta,
              double* loglik_out) {
  const auto G = ws.n_genes();
  const auto n = ws.n_samples();
  const auto K = pi.size();

  // acc(i,k) = sum_j log f(y_ij ; s_i exp(beta_jk), phi_j)
  Matrix acc = Matrix::Zero(n, K);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double phi = ws.phi()[j];
    const double* y = ws.counts().counts.row(j).data();
    const double* lc = ws.log_const().row(j).data();
    for (Eigen::Index k = 0; k < K; ++k) {
      const double b = beta(j, k);
      const double eb = std::exp(b);
      for (Eigen::Index i = 0; i < n; ++i) {
        double mu = ws.s()[i] * eb;
        double log_mu = ws.log_s()[i] + b;
        if (mu < kMuMin) { mu = kMuMin; log_mu = std::log(kMuMin); }
        else if (mu > kMuMax) { mu = kMuMax; log_mu = std::log(kMuMax); }
        acc(i, k) += lc[i] + y[i] * log_mu - (phi + y[i]) * std::log(phi + mu);
      }
    }
  }

  Vector log_pi(K);
  for (Eigen::Index k = 0; k < K; ++k)
    log_pi[k] = pi[k] > 0.0 ? std::log(pi[k]) : -std::numeric_limits<double>::infinity();

  Matrix z(n, K);
  double total = 0.0;
  std::vector<double> row(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < K; ++k) row[k] = log_pi[k] + acc(i, k);
    const double lse = log_sum_exp(row.data(), static_cast<int>(K));
    if (!std::isfinite(lse))
      throw NumericError("e_step: sample " + std::to_string(i) +
                         " has no finite component density");
    for (Eigen::Index k = 0; k < K; ++k) z(i, k) = std::exp(row[k] - lse);
    total += lse;
  }
  if (loglik_out) *loglik_out = total;
  return z;
}

Vector m_step_pi(const Matrix& responsibilities) {
  return responsibilities.colwise().mean().transpose();
}

double penalized_mean_update(double weighted_sum, double weight_sum,
                             double lambda, double center) {
  const double unpenalized = weighted_sum / weight_sum;
  const double threshold = lambda / weight_sum;
  const double gap = unpenalized - center;
  if (std::fabs(gap) <= threshold) return center;
  return gap > 0.0 ? center + (gap - threshold) : center + (gap + threshold);
}

namespace {

// One (gene, cluster) coordinate: IRLS around the current beta with the
// soft-threshold update toward beta_star at each relinearization.
double irls_penalized_coordinate(const double* y, const Vector& s,
                                 const Vector& log_s, const double* z, double phi,
                                 double beta_star, double lambda, double beta0,
                                 double tol, int max_iter) {
  const auto n = s.size();
  double beta = beta0;
  for (int it = 0; it < max_iter; ++it) {
    const double eb = std::exp(beta);
    double sw = 0.0, swc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (z[i] == 0.0) continue;
      double mu = s[i] * eb;
      double log_mu = log_s[i] + beta;
      if (mu < kMuMin) { mu = kMuMin; log_mu = std::log(kMuMin); }
      else if (mu > kMuMax) { mu = kMuMax; log_mu = std::log(kMuMax); }
      const double w = z[i] * mu * phi / (phi + mu);
      const double c = (log_mu - log_s[i]) + (y[i] - mu) / mu;
      sw += w;
      swc += w * c;
    }
    if (sw < kWeightEps) return beta_star;
    const double beta_new = penalized_mean_update(swc, sw, lambda, beta_star);
    const double delta = std::fabs(beta_new - beta);
    beta = beta_new;
    if (delta < tol) break;
  }
  return beta;
}

}  // namespace

void m_step_beta(const NbWorkspace& ws, const Matrix& responsibilities,
                 const Vector& beta_star, Matrix& beta, double lambda,
                 double tol_irls, int max_irls_iter) {
  const auto G = ws.n_genes();
  const auto K = beta.cols();
  // The penalized Q function separates over (j, k); each coordinate runs its
  // own IRLS to convergence.
  Matrix zt = responsibilities.transpose();  // K x n, rows contiguous
  for (Eigen::Index j = 0; j < G; ++j) {
    const double* y = ws.counts().counts.row(j).data();
    for (Eigen::Index k = 0; k < K; ++k) {
      beta(j, k) = irls_penalized_coordinate(
          y, ws.s(), ws.log_s(), zt.row(k).data(), ws.phi()[j], beta_star[j],
          lambda, beta(j, k), tol_irls, max_irls_iter);
    }
  }
}

double lasso_penalty(const Matrix& beta, const Vector& beta_star) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < beta.rows(); ++j)
    for (Eigen::Index k = 0; k < beta.cols(); ++k)
      h += std::fabs(beta(j, k) - beta_star[j]);
  return h;
}

Matrix hard_responsibilities(const std::vector<int>& labels, int K) {
  const int base = *std::min_element(labels.begin(), labels.end());
  Matrix z = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), K);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int k = labels[i] - base;
    if (k < 0 || k >= K) throw ValidationError("labels outside 1..K");
    z(static_cast<Eigen::Index>(i), k) = 1.0;
  }
  return z;
}

namespace {

struct RestartOutcome {
  bool degenerate = false;
  bool converged = false;
  double penalized_loglik = -std::numeric_limits<double>::infinity();
  double loglik = 0.0;
  Vector pi;
  Matrix beta;
  Matrix z;
  std::vector<double> trace;
};

RestartOutcome run_restart(const NbWorkspace& ws, const NormalizationProfile& prof,
                           const GlobalMeans& gm, const FitConfig& cfg,
                           std::uint64_t sub_seed) {
  const auto n = ws.n_samples();
  const int K = cfg.K;
  Rng rng(sub_seed);

  RestartOutcome out;
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
    // Half iteration: start every cluster mean at the global mean and run the
    // penalized M-step against the hard assignment.
    out.beta = gm.beta_star.replicate(1, K);
    m_step_beta(ws, z0, gm.beta_star, out.beta, cfg.lambda, cfg.tol_irls_inner,
                cfg.max_irls_iter);
  }

  double prev_pen = -std::numeric_limits<double>::infinity();
  bool need_final_e = false;
  for (int it = 0; it < cfg.max_em_iter; ++it) {
    double ll = 0.0;
    out.z = e_step(ws, out.pi, out.beta, &ll);
    const double pen = ll - cfg.lambda * lasso_penalty(out.beta, gm.beta_star);
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
    m_step_beta(ws, out.z, gm.beta_star, out.beta, cfg.lambda, cfg.tol_irls_inner,
                cfg.max_irls_iter);
    need_final_e = true;
  }
  if (need_final_e) {
    // Iteration cap hit right after an M-step: refresh z and the objective.
    double ll = 0.0;
    out.z = e_step(ws, out.pi, out.beta, &ll);
    const double pen = ll - cfg.lambda * lasso_penalty(out.beta, gm.beta_star);
    out.trace.push_back(pen);
    out.loglik = ll;
    out.penalized_loglik = pen;
    const Vector mass = out.z.colwise().sum().transpose();
    if (mass.minCoeff() < kVanishFraction * static_cast<double>(n)) out.degenerate = true;
  }
  return out;
}

}  // namespace

MixtureFit fit(const NbWorkspace& ws, const NormalizationProfile& prof,
               const GlobalMeans& gm, const FitConfig& cfg) {
  cfg.validate(ws.n_samples());
  if (gm.beta_star.size() != ws.n_genes())
    throw ValidationError("fit: beta_star length does not match gene count");

  std::vector<RestartOutcome> outcomes(cfg.n_restarts);
  parallel_for(cfg.n_restarts, cfg.threads, [&](int r) {
    outcomes[r] = run_restart(ws, prof, gm, cfg,
                              Rng::fork(cfg.seed, static_cast<std::uint64_t>(r))
                                  .next_u64());
  });

  int best = -1;
  int usable = 0;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    if (outcomes[r].degenerate) continue;
    ++usable;
    if (best < 0 || outcomes[r].penalized_loglik > outcomes[best].penalized_loglik)
      best = r;
  }
  if (best < 0) throw NumericError("fit: every restart collapsed a component");

  RestartOutcome& win = outcomes[best];
  MixtureFit f;
  f.K = cfg.K;
  f.lambda = cfg.lambda;
  f.pi = m_step_pi(win.z);
  f.beta = std::move(win.beta);
  f.beta_star = gm.beta_star;
  f.responsibilities = std::move(win.z);
  f.penalized_loglik = win.penalized_loglik;
  f.loglik = win.loglik;
  f.loglik_trace = std::move(win.trace);
  f.converged = win.converged;
  f.iterations = static_cast<int>(f.loglik_trace.size());
  f.restarts_used = usable;
  f.n_shrunk = 0;
  for (Eigen::Index j = 0; j < f.beta.rows(); ++j)
    for (Eigen::Index k = 0; k < f.beta.cols(); ++k)
      if (f.beta(j, k) == f.beta_star[j]) ++f.n_shrunk;
  return f;
}

MixtureFit fit(const CountMatrix& m, const NormalizationProfile& prof,
               const GlobalMeans& gm, const FitConfig& cfg) {
  NbWorkspace ws(m, prof);
  return fit(ws, prof, gm, cfg);
}

std::vector<int> map_labels(const MixtureFit& fit) {
  const auto n = fit.responsibilities.rows();
  const auto K = fit.responsibilities.cols();
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    for (Eigen::Index k = 1; k < K; ++k)
      if (fit.responsibilities(i, k) > fit.responsibilities(i, best))
        best = static_cast<int>(k);
    labels[i] = best + 1;
  }
  return labels;
}

std::vector<char> selected_genes(const MixtureFit& fit) {
  const auto G = fit.beta.rows();
  std::vector<char> mask(G, 0);
  for (Eigen::Index j = 0; j < G; ++j)
    for (Eigen::Index k = 0; k < fit.beta.cols(); ++k)
      if (fit.beta(j, k) != fit.beta_star[j]) { mask[j] = 1; break; }
  return mask;
}

}  // namespace snbclust
