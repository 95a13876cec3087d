#ifndef SNBCLUST_GAUSSIAN_MIXTURE_HPP
#define SNBCLUST_GAUSSIAN_MIXTURE_HPP

#include "snbclust/common.hpp"
#include "snbclust/em_fit.hpp"

#include <vector>

namespace snbclust {

constexpr double kSigma2Floor = 1e-6;

/// Lasso-penalized diagonal Gaussian mixture on per-gene standardized data.
struct GaussianMixtureFit {
  int K = 0;
  double lambda = 0.0;
  Vector pi;                // K
  Matrix mu;                // G x K, means of the standardized data
  Vector sigma2;            // G, shared across clusters
  Matrix responsibilities;  // n x K
  double penalized_loglik = 0.0;
  double loglik = 0.0;
  std::vector<double> loglik_trace;
  long n_zero = 0;  // exact count of mu_jk == 0
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
};

/// Standardizes each gene row of x to zero mean and unit variance, then runs
/// the penalized EM: soft-thresholded mean updates toward 0, pooled per-gene
/// variances refreshed every M-step. Restart/degeneracy handling matches the
/// count-model fit.
GaussianMixtureFit fit_sgclust(const Matrix& x, int K, double lambda,
                               const FitConfig& cfg);

std::vector<int> map_labels(const GaussianMixtureFit& fit);

/// Rows of x minus their mean, divided by their sample SD. Constant rows map
/// to all zeros.
Matrix standardize_rows(const Matrix& x);

}  // namespace snbclust

#endif
