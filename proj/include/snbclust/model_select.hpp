#ifndef SNBCLUST_MODEL_SELECT_HPP
#define SNBCLUST_MODEL_SELECT_HPP

#include "snbclust/common.hpp"
#include "snbclust/em_fit.hpp"
#include "snbclust/gaussian_mixture.hpp"

#include <string>
#include <vector>

namespace snbclust {

/// BIC = -2*loglik + log(n)*d_e with d_e = (K-1) + K*G - q. The
/// log-likelihood is the unpenalized observed-data value at the penalized
/// estimate; dispersions are plug-ins and contribute no parameters.
double bic_value(double loglik, Eigen::Index n, int K, Eigen::Index G, long q);

double bic(const MixtureFit& fit, Eigen::Index n);
double bic(const GaussianMixtureFit& fit, Eigen::Index n, Eigen::Index G);

struct PathEntry {
  double lambda = 0.0;
  bool ok = false;
  std::string error;
  double loglik = 0.0;
  double penalized_loglik = 0.0;
  long q = 0;
  long n_selected = 0;
  double bic = 0.0;
};

struct PathResult {
  std::vector<double> lambdas;
  std::vector<PathEntry> entries;
  std::vector<MixtureFit> fits;  // aligned with lambdas; unusable slots empty
  int chosen_index = -1;         // argmin BIC over ok entries, ties -> larger lambda

  const MixtureFit& chosen() const { return fits.at(chosen_index); }
};

/// Fits every lambda in the increasing grid, warm-starting each fit from the
/// previous solution (the first uses cfg.init as given), and selects the BIC
/// minimizer. Per-lambda failures are recorded and skipped; at least one fit
/// must succeed.
PathResult run_lambda_path(const CountMatrix& m, const NormalizationProfile& prof,
                           const GlobalMeans& gm, int K,
                           const std::vector<double>& lambda_grid,
                           const FitConfig& cfg);

/// 16 log-spaced values from lambda_max/1000 to lambda_max, where lambda_max
/// is found by doubling/halving pilot fits until the smallest fully-shrinking
/// lambda is bracketed.
std::vector<double> default_lambda_grid(const CountMatrix& m,
                                        const NormalizationProfile& prof,
                                        const GlobalMeans& gm, int K,
                                        const FitConfig& cfg, int n_points = 16);

/// Gaussian-baseline analog of run_lambda_path (same BIC rule, q = n_zero).
struct SgPathResult {
  std::vector<double> lambdas;
  std::vector<PathEntry> entries;
  std::vector<GaussianMixtureFit> fits;
  int chosen_index = -1;

  const GaussianMixtureFit& chosen() const { return fits.at(chosen_index); }
};

SgPathResult run_sg_lambda_path(const Matrix& logcpm, int K,
                                const std::vector<double>& lambda_grid,
                                const FitConfig& cfg);

std::vector<double> default_sg_lambda_grid(const Matrix& logcpm, int K,
                                           const FitConfig& cfg, int n_points = 16);

std::vector<double> log_spaced_grid(double lo, double hi, int n_points);

}  // namespace snbclust

#endif
