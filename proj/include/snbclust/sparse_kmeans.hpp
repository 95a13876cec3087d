#ifndef SNBCLUST_SPARSE_KMEANS_HPP
#define SNBCLUST_SPARSE_KMEANS_HPP

#include "snbclust/common.hpp"

#include <cstdint>
#include <vector>

namespace snbclust {

struct SparseKmeansConfig {
  int kmeans_restarts = 10;
  int max_alternations = 20;
  double tol_weights = 1e-4;  // relative L2 change
  std::uint64_t seed = 0;
};

struct SparseKmeansFit {
  std::vector<int> labels;  // 1-based
  Vector weights;           // ||w||_2 <= 1, ||w||_1 <= s, w >= 0
  double s = 0.0;
  double objective = 0.0;  // sum_j w_j * BCSS_j
  std::vector<double> objective_trace;  // after every half step
  int iterations = 0;
  bool converged = false;
};

/// Per-gene between-cluster sum of squares:
///   BCSS_j = (1/n) sum_{i,i'} d_j - sum_k (1/n_k) sum_{i,i' in C_k} d_j,
/// with d_j(x_i, x_i') = (x_ij - x_i'j)^2. labels may be 0- or 1-based.
Vector bcss(const Matrix& x, const std::vector<int>& labels, int K);

/// Weight step: w = S(b, delta) / ||S(b, delta)||_2 with b_j = max(BCSS_j, 0)
/// and the smallest delta >= 0 making ||w||_1 <= s (bisection).
Vector skmeans_weights(const Vector& bcss_values, double s);

/// Alternates weighted K-means (previous partition kept as a candidate, so
/// the weighted BCSS objective never decreases) with the closed-form weight
/// update, until the weights settle.
SparseKmeansFit fit_skmeans(const Matrix& x, int K, double s,
                            const SparseKmeansConfig& cfg);

struct GapResult {
  std::vector<double> s_grid;
  std::vector<double> gap;       // log O(s) - mean_b log O*_b(s)
  std::vector<double> se;        // sd_b(log O*_b(s)) * sqrt(1 + 1/B)
  std::vector<double> objective; // O(s) on the real data
  int chosen_index = 0;
  double chosen_s = 0.0;
};

/// Gap statistic over a grid of sparsity bounds: permutation-null objectives
/// from per-gene independent resampling; picks the smallest s whose gap is
/// within one standard error of the maximum gap.
GapResult gap_statistic_s(const Matrix& x, int K, const std::vector<double>& s_grid,
                          int n_perm, std::uint64_t seed,
                          const SparseKmeansConfig& cfg = {});

/// Default geometric grid in [1.2, sqrt(G)].
std::vector<double> default_s_grid(Eigen::Index G, int n_points = 8);

}  // namespace snbclust

#endif
