#include "snbclust/sparse_kmeans.hpp"

#include "snbclust/kmeans.hpp"
#include "snbclust/rng.hpp"

#include <cmath>

namespace snbclust {

Vector bcss(const Matrix& x, const std::vector<int>& labels, int K) {
  const auto G = x.rows();
  const auto n = x.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ValidationError("bcss: label length mismatch");
  const int base = *std::min_element(labels.begin(), labels.end());

  std::vector<double> nk(K, 0.0);
  for (int l : labels) {
    const int k = l - base;
    if (k < 0 || k >= K) throw ValidationError("bcss: label outside 1..K");
    nk[k] += 1.0;
  }

  // (1/m) sum_{i,i'} (x_i - x_i')^2 over a group of size m equals
  // 2 * sum_i (x_i - mean)^2, applied to the full set and to each cluster.
  Vector out(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double* row = x.row(j).data();
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += row[i];
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = row[i] - mean;
      tss += d * d;
    }
    tss *= 2.0;

    // Two-pass per cluster, so constant data yields an exact zero.
    std::vector<double> sum(K, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) sum[labels[i] - base] += row[i];
    double wcss = 0.0;
    for (int k = 0; k < K; ++k) {
      if (nk[k] == 0.0) continue;
      const double ck = sum[k] / nk[k];
      double ss = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[i] - base != k) continue;
        const double d = row[i] - ck;
        ss += d * d;
      }
      wcss += 2.0 * ss;
    }
    out[j] = tss - wcss;
  }
  return out;
}

Vector skmeans_weights(const Vector& bcss_values, double s) {
  const auto G = bcss_values.size();
  Vector b = bcss_values.cwiseMax(0.0);
  if (b.maxCoeff() <= 0.0)
    throw NumericError("sparse k-means: no gene separates the clusters");

  auto weights_at = [&](double delta) {
    Vector w(G);
    for (Eigen::Index j = 0; j < G; ++j) w[j] = std::max(b[j] - delta, 0.0);
    w /= w.norm();
    return w;
  };

  Vector w = weights_at(0.0);
  if (w.lpNorm<1>() <= s) return w;  // constraint inactive, delta stays 0

  double lo = 0.0, hi = b.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    w = weights_at(mid);
    const double l1 = w.lpNorm<1>();
    if (std::fabs(l1 - s) < 1e-10) return w;
    if (l1 > s) lo = mid; else hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, b.maxCoeff())) break;
  }
  return weights_at(hi);  // feasible side
}

SparseKmeansFit fit_skmeans(const Matrix& x, int K, double s,
                            const SparseKmeansConfig& cfg) {
  const auto G = x.rows();
  const auto n = x.cols();
  const double s_max = std::sqrt(static_cast<double>(G));
  if (s < 1.0 || s > s_max * (1.0 + 1e-12))
    throw ValidationError("fit_skmeans: s must lie in [1, sqrt(G)]");
  if (K < 1 || K > n) throw ValidationError("fit_skmeans: K must lie in [1, n]");

  Rng rng(cfg.seed);
  SparseKmeansFit fit;
  fit.s = s;
  fit.weights = Vector::Constant(G, 1.0 / std::sqrt(static_cast<double>(G)));

  std::vector<int> labels;
  for (int it = 1; it <= cfg.max_alternations; ++it) {
    // (a) clusters given weights: K-means on sqrt(w)-scaled features.
    Matrix scaled(n, G);
    for (Eigen::Index j = 0; j < G; ++j)
      scaled.col(j) = x.row(j).transpose() * std::sqrt(fit.weights[j]);
    auto km = kmeans(scaled, K, rng, cfg.kmeans_restarts, 100,
                     labels.empty() ? nullptr : &labels);
    labels = km.labels;
    Vector b = bcss(x, labels, K);
    fit.objective_trace.push_back(fit.weights.dot(b));

    // (b) weights given clusters.
    Vector w_new = skmeans_weights(b, s);
    fit.objective_trace.push_back(w_new.dot(b));
    const double change = (w_new - fit.weights).norm() /
                          std::max(fit.weights.norm(), 1e-12);
    fit.weights = w_new;
    fit.iterations = it;
    if (change < cfg.tol_weights) {
      fit.converged = true;
      break;
    }
  }

  fit.labels.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) fit.labels[i] = labels[i] + 1;
  fit.objective = fit.objective_trace.back();
  return fit;
}

GapResult gap_statistic_s(const Matrix& x, int K, const std::vector<double>& s_grid,
                          int n_perm, std::uint64_t seed,
                          const SparseKmeansConfig& cfg) {
  if (n_perm < 2) throw ValidationError("gap_statistic_s: need at least 2 permutations");
  if (s_grid.empty()) throw ValidationError("gap_statistic_s: empty grid");
  const auto G = x.rows();
  const auto n = x.cols();

  // Null datasets: each gene's values permuted independently across samples.
  std::vector<Matrix> null_x(n_perm, Matrix(G, n));
  for (int b = 0; b < n_perm; ++b) {
    Rng rng = Rng::fork(seed, 1000 + static_cast<std::uint64_t>(b));
    for (Eigen::Index j = 0; j < G; ++j) {
      std::vector<Eigen::Index> idx(n);
      for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
      for (Eigen::Index i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);
      for (Eigen::Index i = 0; i < n; ++i) null_x[b](j, i) = x(j, idx[i]);
    }
  }

  GapResult res;
  res.s_grid = s_grid;
  // Common random numbers: one seed per dataset, shared across the grid, so
  // gap differences between neighboring s reflect the constraint rather than
  // K-means seeding noise.
  for (std::size_t si = 0; si < s_grid.size(); ++si) {
    SparseKmeansConfig c = cfg;
    c.seed = Rng::fork(seed, 1).next_u64();
    const double obj = fit_skmeans(x, K, s_grid[si], c).objective;
    double mean_log = 0.0, m2 = 0.0;
    for (int b = 0; b < n_perm; ++b) {
      SparseKmeansConfig cb = cfg;
      cb.seed = Rng::fork(seed, 5000 + b).next_u64();
      const double o = fit_skmeans(null_x[b], K, s_grid[si], cb).objective;
      const double lo = std::log(std::max(o, 1e-300));
      const double d = lo - mean_log;
      mean_log += d / static_cast<double>(b + 1);
      m2 += d * (lo - mean_log);
    }
    const double sd = std::sqrt(m2 / static_cast<double>(n_perm - 1));
    res.objective.push_back(obj);
    res.gap.push_back(std::log(std::max(obj, 1e-300)) - mean_log);
    res.se.push_back(sd * std::sqrt(1.0 + 1.0 / static_cast<double>(n_perm)));
  }

  // One-standard-error rule: smallest s whose gap already reaches the next
  // grid point's gap minus its standard error.
  std::size_t chosen = s_grid.size() - 1;
  for (std::size_t si = 0; si + 1 < s_grid.size(); ++si) {
    if (res.gap[si] >= res.gap[si + 1] - res.se[si + 1]) {
      chosen = si;
      break;
    }
  }
  res.chosen_index = static_cast<int>(chosen);
  res.chosen_s = s_grid[chosen];
  return res;
}

std::vector<double> default_s_grid(Eigen::Index G, int n_points) {
  const double lo = 1.2;
  const double hi = std::sqrt(static_cast<double>(G));
  std::vector<double> grid;
  if (hi <= lo) {
    grid.push_back(hi);
    return grid;
  }
  for (int i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
    grid.push_back(lo * std::pow(hi / lo, t));
  }
  return grid;
}

}  // namespace snbclust
