#include "snbclust/simulate.hpp"

#include <cmath>

namespace snbclust {

namespace {

constexpr int kInformative = 150;
constexpr int kPatternBlock = 50;

// The three up/down patterns, 50 genes each: (-1,0,1), (0,1,1), (1,-1,0).
int pattern_delta(int gene, int k) {
  if (gene >= kInformative) return 0;
  static constexpr int kPatterns[3][3] = {{-1, 0, 1}, {0, 1, 1}, {1, -1, 0}};
  return kPatterns[gene / kPatternBlock][k];
}

}  // namespace

EmpiricalMeanDist build_empirical_dist(const CountMatrix& source, double trim) {
  if (trim < 0.0 || trim > 1.0)
    throw ValidationError("build_empirical_dist: trim must lie in [0,1]");
  std::vector<double> means(source.n_genes());
  for (Eigen::Index j = 0; j < source.n_genes(); ++j)
    means[j] = source.counts.row(j).mean();

  EmpiricalMeanDist dist;
  dist.trimmed_fraction = trim;
  if (trim == 0.0) {
    dist.pool = means;
  } else {
    const double cutoff = quantile(means, 1.0 - trim);
    for (double m : means)
      if (m < cutoff) dist.pool.push_back(m);
  }
  if (dist.pool.empty())
    throw ValidationError("build_empirical_dist: pool empty after trimming");
  std::sort(dist.pool.begin(), dist.pool.end());
  return dist;
}

EmpiricalMeanDist default_surrogate_dist(std::uint64_t seed) {
  Rng rng(seed);
  const int n_draws = 10000;
  std::vector<double> draws;
  draws.reserve(n_draws);
  while (static_cast<int>(draws.size()) < n_draws) {
    const double v = std::exp(rng.normal(3.0, 1.2));
    if (v >= 5.0) draws.push_back(v);
  }
  std::sort(draws.begin(), draws.end());
  const int keep = n_draws - static_cast<int>(std::floor(0.30 * n_draws));
  EmpiricalMeanDist dist;
  dist.trimmed_fraction = 0.30;
  dist.pool.assign(draws.begin(), draws.begin() + keep);
  return dist;
}

void SimulationConfig::validate() const {
  if (K != 3)
    throw ValidationError("simulate: the pattern table is defined for K = 3");
  if (n_per_cluster < 2)
    throw ValidationError("simulate: need at least 2 samples per cluster");
  if (gamma <= 0.0) throw ValidationError("simulate: gamma must be positive");
  if (!(lib_lb > 0.0) || lib_ub < lib_lb)
    throw ValidationError("simulate: need 0 < lib_lb <= lib_ub");
  if (phi_const <= 0.0) throw ValidationError("simulate: phi must be positive");
  switch (scheme) {
    case SimScheme::sim1:
      if (G != kInformative || n_per_cluster != 15 || lib_lb != 1.0 || lib_ub != 1.0)
        throw ValidationError(
            "simulate: sim1 fixes G=150, 15 samples per cluster, unit library sizes");
      break;
    case SimScheme::sim2:
      if (G != 1000) throw ValidationError("simulate: sim2 fixes G=1000");
      break;
    case SimScheme::sim3:
      if (G != 1000) throw ValidationError("simulate: sim3 fixes G=1000");
      if (alpha < 0.0 || alpha >= 1.0)
        throw ValidationError("simulate: alpha must lie in [0,1)");
      if (n_modules < 1 || module_size < 1 ||
          n_modules * module_size > kInformative)
        throw ValidationError(
            "simulate: modules must tile within the informative genes");
      break;
  }
}

SimulationConfig make_sim1(double gamma, std::uint64_t seed) {
  SimulationConfig c;
  c.scheme = SimScheme::sim1;
  c.G = kInformative;
  c.gamma = gamma;
  c.seed = seed;
  return c;
}

SimulationConfig make_sim2(double gamma, double lib_lb, double lib_ub,
                           std::uint64_t seed) {
  SimulationConfig c;
  c.scheme = SimScheme::sim2;
  c.G = 1000;
  c.gamma = gamma;
  c.lib_lb = lib_lb;
  c.lib_ub = lib_ub;
  c.seed = seed;
  return c;
}

SimulationConfig make_sim3(double alpha, std::uint64_t seed) {
  SimulationConfig c;
  c.scheme = SimScheme::sim3;
  c.G = 1000;
  c.gamma = 0.5;
  c.lib_lb = 0.9;
  c.lib_ub = 1.1;
  c.alpha = alpha;
  c.seed = seed;
  return c;
}

Eigen::MatrixXd inverse_wishart(const Eigen::MatrixXd& psi, int df, Rng& rng) {
  const auto d = psi.rows();
  if (df <= d) throw ValidationError("inverse_wishart: need df > dimension");
  const Eigen::MatrixXd psi_inv =
      psi.llt().solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd L = psi_inv.llt().matrixL();

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(static_cast<double>(df - i)));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const Eigen::MatrixXd la = L * A;
  const Eigen::MatrixXd w = la * la.transpose();
  return w.llt().solve(Eigen::MatrixXd::Identity(d, d));
}

SimulatedDataset generate(const SimulationConfig& cfg, const EmpiricalMeanDist& dist,
                          const std::optional<std::vector<double>>& phi_pool) {
  cfg.validate();
  if (dist.pool.empty()) throw ValidationError("generate: empty mean pool");
  if (phi_pool && phi_pool->empty())
    throw ValidationError("generate: empty dispersion pool");

  const int G = cfg.G;
  const int K = cfg.K;
  const int n = K * cfg.n_per_cluster;
  Rng rng(cfg.seed);

  SimulatedDataset ds;
  ds.config = cfg;
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) ds.labels[i] = i / cfg.n_per_cluster + 1;
  ds.informative_mask.assign(G, 0);
  const int n_inf = cfg.scheme == SimScheme::sim1 ? G : kInformative;
  for (int j = 0; j < n_inf; ++j) ds.informative_mask[j] = 1;

  ds.true_phi.resize(G);
  for (int j = 0; j < G; ++j)
    ds.true_phi[j] = phi_pool
                         ? (*phi_pool)[rng.uniform_int(phi_pool->size())]
                         : cfg.phi_const;

  auto draw_mu = [&]() { return dist.pool[rng.uniform_int(dist.pool.size())]; };
  auto draw_effect = [&]() {
    return rng.truncated_normal(cfg.gamma, 1.0, cfg.gamma / 2.0);
  };

  Vector mu(G), effect(G);
  if (cfg.scheme == SimScheme::sim3) {
    // sim3 draws effects before baselines.
    for (int j = 0; j < G; ++j) effect[j] = draw_effect();
    for (int j = 0; j < G; ++j) mu[j] = draw_mu();
  } else {
    for (int j = 0; j < G; ++j) mu[j] = draw_mu();
    for (int j = 0; j < G; ++j) effect[j] = draw_effect();
  }

  ds.true_beta.resize(G, K);
  for (int j = 0; j < G; ++j)
    for (int k = 0; k < K; ++k)
      ds.true_beta(j, k) =
          std::log2(mu[j]) + effect[j] * static_cast<double>(pattern_delta(j, k));

  ds.counts.gene_ids.reserve(G);
  for (int j = 0; j < G; ++j) ds.counts.gene_ids.push_back("g" + std::to_string(j + 1));
  ds.counts.sample_ids.reserve(n);
  for (int i = 0; i < n; ++i) ds.counts.sample_ids.push_back("s" + std::to_string(i + 1));
  ds.counts.counts.resize(G, n);

  if (cfg.scheme != SimScheme::sim3) {
    Vector lib = Vector::Ones(n);
    if (cfg.scheme == SimScheme::sim2)
      for (int i = 0; i < n; ++i) lib[i] = rng.uniform(cfg.lib_lb, cfg.lib_ub);
    for (int j = 0; j < G; ++j)
      for (int i = 0; i < n; ++i) {
        const int k = ds.labels[i] - 1;
        const double mean =
            lib[i] * mu[j] *
            std::exp2(effect[j] * static_cast<double>(pattern_delta(j, k)));
        ds.counts.counts(j, i) =
            static_cast<double>(rng.negative_binomial(mean, ds.true_phi[j]));
      }
    ds.counts.validate();
    return ds;
  }

  // sim3: module covariances, then per-sample MVN log2 expressions.
  const int M = cfg.n_modules;
  const int d = cfg.module_size;
  const Eigen::MatrixXd psi =
      (1.0 - cfg.alpha) * Eigen::MatrixXd::Identity(d, d) +
      cfg.alpha * Eigen::MatrixXd::Ones(d, d);
  std::vector<Eigen::MatrixXd> chol(M * K);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      Eigen::MatrixXd sigma = inverse_wishart(psi, 60, rng);
      // Standardize to unit diagonal.
      Eigen::VectorXd inv_sd = sigma.diagonal().array().sqrt().inverse();
      sigma = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
      chol[m * K + k] = sigma.llt().matrixL();
    }

  const int modular = M * d;  // genes covered by modules
  Matrix log2_expr(n, modular);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    const int k = ds.labels[i] - 1;
    for (int m = 0; m < M; ++m) {
      for (int t = 0; t < d; ++t) z[t] = rng.normal();
      const Eigen::VectorXd noise = chol[m * K + k] * z;
      for (int t = 0; t < d; ++t) {
        const int j = m * d + t;
        log2_expr(i, j) = ds.true_beta(j, k) + noise[t];
      }
    }
  }

  Vector lib(n);
  for (int i = 0; i < n; ++i) lib[i] = rng.uniform(cfg.lib_lb, cfg.lib_ub);

  for (int j = 0; j < G; ++j)
    for (int i = 0; i < n; ++i) {
      const int k = ds.labels[i] - 1;
      double mean;
      if (j < modular) {
        mean = lib[i] * std::exp2(log2_expr(i, j));
      } else if (j < n_inf) {
        // Informative gene outside the module tiling: independent unit noise.
        mean = lib[i] * std::exp2(ds.true_beta(j, k) + rng.normal());
      } else {
        mean = lib[i] * mu[j];
      }
      ds.counts.counts(j, i) =
          static_cast<double>(rng.negative_binomial(mean, ds.true_phi[j]));
    }
  ds.counts.validate();
  return ds;
}

CountMatrix thin(const CountMatrix& m, double rate, std::uint64_t seed) {
  if (rate < 0.0 || rate > 1.0)
    throw ValidationError("thin: rate must lie in [0,1]");
  Rng rng(seed);
  CountMatrix out = m;
  for (Eigen::Index j = 0; j < m.n_genes(); ++j)
    for (Eigen::Index i = 0; i < m.n_samples(); ++i)
      out.counts(j, i) = static_cast<double>(
          rng.binomial(static_cast<long>(m.counts(j, i)), rate));
  return out;
}

}  // namespace snbclust
