#ifndef SNBCLUST_SIMULATE_HPP
#define SNBCLUST_SIMULATE_HPP

#include "snbclust/common.hpp"
#include "snbclust/count_matrix.hpp"
#include "snbclust/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace snbclust {

/// Pool of candidate baseline mean counts with the top tail removed.
struct EmpiricalMeanDist {
  std::vector<double> pool;  // sorted ascending, non-empty
  double trimmed_fraction = 0.0;
};

/// Per-gene mean counts of `source` with the top `trim` fraction excluded
/// (values at or above the (1-trim) quantile are dropped when trim > 0).
EmpiricalMeanDist build_empirical_dist(const CountMatrix& source, double trim = 0.30);

/// Log-normal surrogate pool: 1e4 draws of exp(N(3, 1.2)) conditioned on
/// >= 5, top 30% trimmed. Used whenever no source matrix is supplied.
EmpiricalMeanDist default_surrogate_dist(std::uint64_t seed);

enum class SimScheme { sim1, sim2, sim3 };

struct SimulationConfig {
  SimScheme scheme = SimScheme::sim2;
  int G = 1000;
  int n_per_cluster = 15;
  int K = 3;
  double gamma = 1.0;       // effect-size location of TN(gamma, 1, gamma/2, inf)
  double lib_lb = 1.0;      // library scaling factor bounds
  double lib_ub = 1.0;
  double alpha = 0.0;       // module correlation (sim3), in [0, 1)
  int n_modules = 15;       // sim3
  int module_size = 10;     // sim3
  double phi_const = 2.0;   // dispersion when no pool is given
  std::uint64_t seed = 0;

  void validate() const;
};

SimulationConfig make_sim1(double gamma, std::uint64_t seed);
SimulationConfig make_sim2(double gamma, double lib_lb, double lib_ub,
                           std::uint64_t seed);
SimulationConfig make_sim3(double alpha, std::uint64_t seed);

struct SimulatedDataset {
  CountMatrix counts;               // G x n
  std::vector<int> labels;          // 1-based, balanced
  std::vector<char> informative_mask;
  Matrix true_beta;                 // G x K, log2-scale generating means
  Vector true_phi;                  // G
  SimulationConfig config;
};

/// Follows the numbered recipes: baseline means from the pool, three fixed
/// 50-gene up/down patterns, truncated-normal log2 effects, uniform library
/// factors, NB counts via the gamma-Poisson mixture; sim3 adds
/// inverse-Wishart module covariances and MVN log2 expressions.
/// Deterministic: identical (cfg, dist, phi pool) and seed give identical
/// datasets.
SimulatedDataset generate(const SimulationConfig& cfg, const EmpiricalMeanDist& dist,
                          const std::optional<std::vector<double>>& phi_pool = {});

/// Binomial thinning: each count replaced by Binomial(count, rate).
CountMatrix thin(const CountMatrix& m, double rate, std::uint64_t seed);

/// Sample from inverse-Wishart(psi, df) via the Bartlett construction on the
/// Wishart of the inverse scale.
Eigen::MatrixXd inverse_wishart(const Eigen::MatrixXd& psi, int df, Rng& rng);

}  // namespace snbclust

#endif
