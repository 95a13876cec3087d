#ifndef SNBCLUST_EM_FIT_HPP
#define SNBCLUST_EM_FIT_HPP

#include "snbclust/common.hpp"
#include "snbclust/nb_model.hpp"

#include <cstdint>
#include <vector>

namespace snbclust {

// A component whose responsibility mass drops below this fraction of n marks
// the restart as degenerate.
constexpr double kVanishFraction = 1e-6;
// Minimum total IRLS weight before a (gene, cluster) coordinate is pinned to
// the global mean for the pass.
constexpr double kWeightEps = 1e-12;

enum class InitKind { kmeans_logcpm, random_partition, warm_start };

struct FitConfig {
  int K = 3;
  double lambda = 0.0;
  double tol_em = 1e-6;       // relative penalized log-likelihood change
  int max_em_iter = 200;
  double tol_irls_inner = 1e-6;
  int max_irls_iter = 50;
  int n_restarts = 10;
  std::uint64_t seed = 0;
  InitKind init = InitKind::kmeans_logcpm;
  int kmeans_restarts = 20;
  Matrix warm_beta;  // G x K, used when init == warm_start
  Vector warm_pi;    // K
  int threads = 1;   // restart-level parallelism only

  void validate(Eigen::Index n_samples) const;
};

struct MixtureFit {
  int K = 0;
  double lambda = 0.0;
  Vector pi;                // K
  Matrix beta;              // G x K, log-scale cluster means
  Vector beta_star;         // G
  Matrix responsibilities;  // n x K
  double penalized_loglik = 0.0;
  double loglik = 0.0;  // unpenalized observed-data log-likelihood
  std::vector<double> loglik_trace;
  long n_shrunk = 0;  // exact count of beta_jk == beta_star_j
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
};

/// Responsibilities z_ik from current (pi, beta), computed in log space with
/// per-sample max subtraction. When loglik_out is non-null it receives the
/// observed-data mixture log-likelihood at the same parameters.
Matrix e_step(const NbWorkspace& ws, const Vector& pi, const Matrix& beta,
              double* loglik_out = nullptr);

Vector m_step_pi(const Matrix& responsibilities);

/// Closed-form minimizer of 0.5*sum_i v_i (c_i - b)^2 + lambda*|b - center|
/// given weight_sum = sum v and weighted_sum = sum v*c. When the threshold
/// closes the gap the result is `center` bitwise, so shrinkage counts need no
/// tolerance.
double penalized_mean_update(double weighted_sum, double weight_sum,
                             double lambda, double center);

/// Independent per-(gene, cluster) IRLS with the lasso proximal update toward
/// beta_star. beta is updated in place from its current values.
void m_step_beta(const NbWorkspace& ws, const Matrix& responsibilities,
                 const Vector& beta_star, Matrix& beta, double lambda,
                 double tol_irls, int max_irls_iter);

/// Penalized EM over n_restarts seeded initializations; the restart with the
/// highest penalized log-likelihood wins. Restarts whose smallest component
/// mass falls below kVanishFraction*n are discarded; if every restart is
/// discarded a NumericError is thrown.
MixtureFit fit(const CountMatrix& m, const NormalizationProfile& prof,
               const GlobalMeans& gm, const FitConfig& cfg);

MixtureFit fit(const NbWorkspace& ws, const NormalizationProfile& prof,
               const GlobalMeans& gm, const FitConfig& cfg);

/// MAP cluster labels, 1-based; ties resolve to the smaller index.
std::vector<int> map_labels(const MixtureFit& fit);

/// Gene j is selected iff some beta_jk differs from beta_star_j (bitwise).
std::vector<char> selected_genes(const MixtureFit& fit);

double lasso_penalty(const Matrix& beta, const Vector& beta_star);

/// Hard 0/1 responsibilities from labels (values may be 0- or 1-based).
Matrix hard_responsibilities(const std::vector<int>& labels, int K);

}  // namespace snbclust

#endif
