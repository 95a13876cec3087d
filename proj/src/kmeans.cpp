#include "snbclust/kmeans.hpp"

#include <cmath>
#include <limits>

namespace snbclust {

namespace {

double sq_dist(const Matrix& pts, Eigen::Index i, const Matrix& centers,
               Eigen::Index k) {
  return (pts.row(i) - centers.row(k)).squaredNorm();
}

Matrix centers_from_labels(const Matrix& pts, const std::vector<int>& labels, int K) {
  Matrix centers = Matrix::Zero(K, pts.cols());
  std::vector<int> cnt(K, 0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    centers.row(labels[i]) += pts.row(i);
    ++cnt[labels[i]];
  }
  for (int k = 0; k < K; ++k)
    if (cnt[k] > 0) centers.row(k) /= static_cast<double>(cnt[k]);
  return centers;
}

double wcss_of(const Matrix& pts, const std::vector<int>& labels, const Matrix& centers) {
  double w = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    w += sq_dist(pts, i, centers, labels[i]);
  return w;
}

// k-means++ seeding.
Matrix seed_centers(const Matrix& pts, int K, Rng& rng) {
  const auto n = pts.rows();
  Matrix centers(K, pts.cols());
  centers.row(0) = pts.row(static_cast<Eigen::Index>(rng.uniform_int(n)));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(pts, i, centers, 0);
  for (int k = 1; k < K; ++k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[i];
        if (target <= 0.0) { pick = i; break; }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(n));
    }
    centers.row(k) = pts.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(pts, i, centers, k));
  }
  return centers;
}

struct Run {
  std::vector<int> labels;
  Matrix centers;
  double wcss = std::numeric_limits<double>::infinity();
};

Run lloyd(const Matrix& pts, int K, Matrix centers, int max_iter) {
  const auto n = pts.rows();
  std::vector<int> labels(n, 0);
  std::vector<int> cnt(K, 0);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = it == 0;
    std::fill(cnt.begin(), cnt.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(pts, i, centers, 0);
      for (int k = 1; k < K; ++k) {
        const double d = sq_dist(pts, i, centers, k);
        if (d < best_d) { best_d = d; best = k; }
      }
      if (best != labels[i]) { labels[i] = best; changed = true; }
      ++cnt[best];
    }
    // Re-seat empty clusters on the point farthest from its center.
    for (int k = 0; k < K; ++k) {
      if (cnt[k] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (cnt[labels[i]] <= 1) continue;
        const double d = sq_dist(pts, i, centers, labels[i]);
        if (d > far_d) { far_d = d; far = i; }
      }
      --cnt[labels[far]];
      labels[far] = k;
      cnt[k] = 1;
      changed = true;
    }
    if (!changed) break;
    centers = centers_from_labels(pts, labels, K);
  }
  Run r;
  r.centers = centers_from_labels(pts, labels, K);
  r.wcss = wcss_of(pts, labels, r.centers);
  r.labels = std::move(labels);
  return r;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, int K, Rng& rng, int n_restarts,
                    int max_iter, const std::vector<int>* seed_labels) {
  if (K < 1) throw ValidationError("kmeans: K must be >= 1");
  if (points.rows() < K)
    throw ValidationError("kmeans: fewer points than clusters");
  Run best;
  for (int r = 0; r < std::max(1, n_restarts); ++r) {
    Run run = lloyd(points, K, seed_centers(points, K, rng), max_iter);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  if (seed_labels) {
    Run run = lloyd(points, K, centers_from_labels(points, *seed_labels, K), max_iter);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  KmeansResult out;
  out.labels = std::move(best.labels);
  out.centers = std::move(best.centers);
  out.wcss = best.wcss;
  return out;
}

}  // namespace snbclust
