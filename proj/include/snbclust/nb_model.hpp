#ifndef SNBCLUST_NB_MODEL_HPP
#define SNBCLUST_NB_MODEL_HPP

#include "snbclust/common.hpp"
#include "snbclust/count_matrix.hpp"
#include "snbclust/normalize.hpp"

#include <vector>

namespace snbclust {

// Mean clamp applied inside every IRLS evaluation.
constexpr double kMuMin = 1e-8;
constexpr double kMuMax = 1e12;

/// NB(mu, phi) with E = mu and Var = mu + mu^2/phi.
struct NbParams {
  double mu;
  double phi;
};

/// log P(Y = y) for the mean/dispersion parameterization above; finite for
/// every non-negative integer y and valid parameters.
double nb_log_pmf(long y, const NbParams& p);

/// Per-gene log-scale global means under the no-cluster null model.
struct GlobalMeans {
  Vector beta_star;            // G
  std::vector<char> converged; // per gene
  std::vector<int> iterations; // per gene
};

/// Precomputed per-dataset quantities shared by the null fit, the E-step and
/// the M-step: y-only lgamma terms, log size factors, dispersions.
class NbWorkspace {
public:
  NbWorkspace(const CountMatrix& m, const NormalizationProfile& prof);

  const CountMatrix& counts() const { return *m_; }
  const Vector& log_s() const { return log_s_; }
  const Vector& s() const { return s_; }
  const Vector& phi() const { return phi_; }
  Eigen::Index n_genes() const { return m_->n_genes(); }
  Eigen::Index n_samples() const { return m_->n_samples(); }

  // lgamma(y+phi_j) - lgamma(phi_j) - lgamma(y+1) + phi_j*log(phi_j)
  const Matrix& log_const() const { return log_const_; }

private:
  const CountMatrix* m_;
  Vector s_, log_s_, phi_;
  Matrix log_const_;
};

/// One-parameter IRLS per gene maximizing sum_i log f(y_ij; s_i exp(beta_j))
/// with the gene dispersion fixed. All-zero genes are pinned at log(kMuMin);
/// a non-finite iterate falls back to log(sum y / sum s) with converged=false.
GlobalMeans fit_null_means(const CountMatrix& m, const NormalizationProfile& prof,
                           double tol = 1e-8, int max_iter = 100);

GlobalMeans fit_null_means(const NbWorkspace& ws, double tol = 1e-8,
                           int max_iter = 100);

}  // namespace snbclust

#endif
