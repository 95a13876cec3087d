#include "snbclust/nb_model.hpp"

#include <cmath>

namespace snbclust {

double nb_log_pmf(long y, const NbParams& p) {
  if (y < 0) throw ValidationError("nb_log_pmf: y must be non-negative");
  if (!(p.mu > 0.0) || !(p.phi > 0.0))
    throw ValidationError("nb_log_pmf: mu and phi must be positive");
  const double yd = static_cast<double>(y);
  return std::lgamma(yd + p.phi) - std::lgamma(p.phi) - std::lgamma(yd + 1.0) +
         p.phi * std::log(p.phi / (p.phi + p.mu)) +
         yd * std::log(p.mu / (p.phi + p.mu));
}

NbWorkspace::NbWorkspace(const CountMatrix& m, const NormalizationProfile& prof)
    : m_(&m) {
  prof.validate(m.n_genes(), m.n_samples());
  s_ = prof.size_factors;
  log_s_ = s_.array().log();
  phi_ = prof.dispersions;
  const auto G = m.n_genes();
  const auto n = m.n_samples();
  log_const_.resize(G, n);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double phi = phi_[j];
    const double base = -std::lgamma(phi) + phi * std::log(phi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = m.counts(j, i);
      log_const_(j, i) = std::lgamma(y + phi) - std::lgamma(y + 1.0) + base;
    }
  }
}

namespace {

struct NullFit {
  double beta;
  bool converged;
  int iterations;
};

// 1-D IRLS with offset log(s_i): weights mu*phi/(phi+mu), working residual
// (y-mu)/mu added to the current beta.
NullFit irls_single_gene(const double* y, const Vector& s, const Vector& log_s,
                         double phi, double init_beta, double tol, int max_iter) {
  double beta = init_beta;
  for (int it = 1; it <= max_iter; ++it) {
    const double eb = std::exp(beta);
    double sw = 0.0, swc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      double mu = s[i] * eb;
      double log_mu = log_s[i] + beta;
      if (mu < kMuMin) { mu = kMuMin; log_mu = std::log(kMuMin); }
      if (mu > kMuMax) { mu = kMuMax; log_mu = std::log(kMuMax); }
      const double w = mu * phi / (phi + mu);
      const double c = (log_mu - log_s[i]) + (y[i] - mu) / mu;
      sw += w;
      swc += w * c;
    }
    const double beta_new = swc / sw;
    if (!std::isfinite(beta_new)) return {beta, false, it};
    const double delta = std::fabs(beta_new - beta);
    beta = beta_new;
    if (delta < tol) return {beta, true, it};
  }
  return {beta, false, max_iter};
}

}  // namespace

GlobalMeans fit_null_means(const NbWorkspace& ws, double tol, int max_iter) {
  const auto G = ws.n_genes();
  GlobalMeans gm;
  gm.beta_star.resize(G);
  gm.converged.assign(G, 1);
  gm.iterations.assign(G, 0);

  const double sum_s = ws.s().sum();
  for (Eigen::Index j = 0; j < G; ++j) {
    const double* y = ws.counts().counts.row(j).data();
    double sum_y = 0.0;
    for (Eigen::Index i = 0; i < ws.n_samples(); ++i) sum_y += y[i];
    if (sum_y == 0.0) {
      gm.beta_star[j] = std::log(kMuMin);
      continue;
    }
    const double init = std::log((sum_y + 0.5) / sum_s);
    auto r = irls_single_gene(y, ws.s(), ws.log_s(), ws.phi()[j], init, tol, max_iter);
    gm.iterations[j] = r.iterations;
    if (!std::isfinite(r.beta)) {
      gm.beta_star[j] = std::log(sum_y / sum_s);
      gm.converged[j] = 0;
    } else {
      gm.beta_star[j] = r.beta;
      gm.converged[j] = r.converged ? 1 : 0;
    }
  }
  return gm;
}

GlobalMeans fit_null_means(const CountMatrix& m, const NormalizationProfile& prof,
                           double tol, int max_iter) {
  NbWorkspace ws(m, prof);
  return fit_null_means(ws, tol, max_iter);
}

}  // namespace snbclust
