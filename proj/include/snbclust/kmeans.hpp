#ifndef SNBCLUST_KMEANS_HPP
#define SNBCLUST_KMEANS_HPP

#include "snbclust/common.hpp"
#include "snbclust/rng.hpp"

#include <vector>

namespace snbclust {

struct KmeansResult {
  std::vector<int> labels;  // 0-based, all K clusters non-empty
  Matrix centers;           // K x p
  double wcss;
};

/// Lloyd with k-means++ seeding, best of n_restarts. points are rows.
/// When seed_labels is given, that assignment is scored as an extra
/// candidate, so the returned WCSS never exceeds its WCSS.
KmeansResult kmeans(const Matrix& points, int K, Rng& rng, int n_restarts,
                    int max_iter = 100,
                    const std::vector<int>* seed_labels = nullptr);

}  // namespace snbclust

#endif
