#ifndef SNBCLUST_FUSED_HPP
#define SNBCLUST_FUSED_HPP

#include "snbclust/em_fit.hpp"

#include <vector>

namespace snbclust {

struct FusedConfig {
  double lambda = 0.0;
  double gamma_mcp = 3.0;   // MCP concavity, > 1
  double rho_admm = 1.0;    // augmented-Lagrangian weight
  double tol_admm = 1e-6;
  int max_admm_iter = 500;
  double group_tol = 1e-4;  // pairwise gap below this is one group

  void validate() const;
};

/// MCP: lambda*|x| - x^2/(2*gamma) inside |x| <= gamma*lambda, flat
/// gamma*lambda^2/2 beyond.
double mcp_penalty(double x, double lambda, double gamma_mcp);

/// argmin_x 0.5*rho*(x - v)^2 + MCP(x; lambda, gamma). Requires
/// gamma*rho > 1: dead zone below lambda/rho, scaled soft-threshold up to
/// gamma*lambda, identity beyond.
double mcp_prox(double v, double lambda, double gamma_mcp, double rho);

/// Sum of MCP terms over all within-gene cluster pairs.
double fused_penalty(const Matrix& beta, double lambda, double gamma_mcp);

struct AdmmOut {
  Vector beta;
  bool converged;
};

/// One gene's M-step core: minimizes
///   0.5*sum_k weight_k*beta_k^2 - sum_k linear_k*beta_k
///     + sum_{k<l} MCP(beta_k - beta_l; lambda, gamma)
/// by scaled-dual ADMM on the K(K-1)/2 pairwise differences. eta/u carry the
/// consensus and dual state for warm starts across IRLS relinearizations.
AdmmOut fused_quadratic_admm(const Vector& weight, const Vector& linear,
                             const FusedConfig& fcfg, Vector& eta, Vector& u);

/// M-step under the pairwise MCP penalty: per gene, IRLS relinearization
/// around an ADMM solve with consensus variables on the K(K-1)/2 pairwise
/// differences (scaled dual form). Returns false if any gene's ADMM hit
/// max_admm_iter without meeting tol_admm.
bool m_step_beta_fused(const NbWorkspace& ws, const Matrix& responsibilities,
                       Matrix& beta, const FusedConfig& fcfg, double tol_irls,
                       int max_irls_iter);

/// EM loop identical to fit() but with the fused M-step and the MCP penalty
/// in the reported objective. n_shrunk stays defined as exact equality with
/// beta_star and is typically 0 here.
MixtureFit fit_fused(const CountMatrix& m, const NormalizationProfile& prof,
                     const GlobalMeans& gm, const FitConfig& cfg,
                     const FusedConfig& fcfg);

/// Group labels (1-based, by cluster index order) of the K fitted means of
/// one gene: clusters within group_tol of each other, transitively, share a
/// label.
std::vector<int> gene_groups(const Eigen::RowVectorXd& beta_row, double group_tol);

/// Gene is informative iff its K means form more than one group.
std::vector<char> fused_selected_genes(const MixtureFit& fit, double group_tol);

}  // namespace snbclust

#endif
