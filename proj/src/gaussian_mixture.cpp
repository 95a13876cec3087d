#include "snbclust/gaussian_mixture.hpp"

#include "snbclust/kmeans.hpp"
#include "snbclust/parallel.hpp"
#include "snbclust/rng.hpp"

#include <cmath>
#include <limits>

namespace snbclust {

Matrix standardize_rows(const Matrix& x) {
  const auto G = x.rows();
  const auto n = x.cols();
  Matrix out(G, n);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double mean = x.row(j).mean();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = x(j, i) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd < 1e-12) {
      out.row(j).setZero();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) out(j, i) = (x(j, i) - mean) / sd;
    }
  }
  return out;
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Observed-data log-likelihood and responsibilities for the diagonal
// equal-covariance Gaussian mixture.
Matrix gaussian_e_step(const Matrix& xs, const Vector& pi, const Matrix& mu,
                       const Vector& sigma2, double* loglik_out) {
  const auto G = xs.rows();
  const auto n = xs.cols();
  const auto K = pi.size();

  double log_det = 0.0;
  for (Eigen::Index j = 0; j < G; ++j) log_det += std::log(sigma2[j]);
  const double base = -0.5 * static_cast<double>(G) * kLogTwoPi - 0.5 * log_det;

  Matrix acc = Matrix::Constant(n, K, base);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double inv2s = 0.5 / sigma2[j];
    for (Eigen::Index k = 0; k < K; ++k) {
      const double m = mu(j, k);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = xs(j, i) - m;
        acc(i, k) -= d * d * inv2s;
      }
    }
  }

  Vector log_pi(K);
  for (Eigen::Index k = 0; k < K; ++k)
    log_pi[k] = pi[k] > 0.0 ? std::log(pi[k]) : -std::numeric_limits<double>::infinity();

  Matrix z(n, K);
  double total = 0.0;
  std::vector<double> row(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < K; ++k) row[k] = log_pi[k] + acc(i, k);
    const double lse = log_sum_exp(row.data(), static_cast<int>(K));
    for (Eigen::Index k = 0; k < K; ++k) z(i, k) = std::exp(row[k] - lse);
    total += lse;
  }
  if (loglik_out) *loglik_out = total;
  return z;
}

void gaussian_m_step(const Matrix& xs, const Matrix& z, double lambda, Matrix& mu,
                     Vector& sigma2) {
  const auto G = xs.rows();
  const auto n = xs.cols();
  const auto K = z.cols();
  const Vector mass = z.colwise().sum().transpose();

  for (Eigen::Index j = 0; j < G; ++j) {
    for (Eigen::Index k = 0; k < K; ++k) {
      double sx = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) sx += z(i, k) * xs(j, i);
      // Penalized update with the current variance in the threshold.
      mu(j, k) = penalized_mean_update(sx / sigma2[j], mass[k] / sigma2[j], lambda, 0.0);
    }
    double ss = 0.0;
    for (Eigen::Index k = 0; k < K; ++k)
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = xs(j, i) - mu(j, k);
        ss += z(i, k) * d * d;
      }
    sigma2[j] = std::max(ss / static_cast<double>(n), kSigma2Floor);
  }
}

double l1_norm(const Matrix& mu) { return mu.cwiseAbs().sum(); }

struct SgRestart {
  bool degenerate = false;
  bool converged = false;
  double penalized_loglik = -std::numeric_limits<double>::infinity();
  double loglik = 0.0;
  Vector pi;
  Matrix mu;
  Vector sigma2;
  Matrix z;
  std::vector<double> trace;
};

SgRestart run_sg_restart(const Matrix& xs, int K, double lambda,
                         const FitConfig& cfg, std::uint64_t sub_seed) {
  const auto G = xs.rows();
  const auto n = xs.cols();
  Rng rng(sub_seed);

  SgRestart out;
  out.sigma2 = Vector::Ones(G);
  if (cfg.init == InitKind::warm_start) {
    out.pi = cfg.warm_pi;
    out.mu = cfg.warm_beta;
  } else {
    std::vector<int> labels(n);
    if (cfg.init == InitKind::kmeans_logcpm) {
      Matrix pts = xs.transpose();
      labels = kmeans(pts, K, rng, cfg.kmeans_restarts).labels;
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        labels[i] = static_cast<int>(rng.uniform_int(K));
    }
    Matrix z0 = hard_responsibilities(labels, K);
    out.pi = m_step_pi(z0);
    if (out.pi.minCoeff() <= 0.0) {
      out.degenerate = true;
      return out;
    }
    out.mu = Matrix::Zero(G, K);
    gaussian_m_step(xs, z0, lambda, out.mu, out.sigma2);
  }

  double prev_pen = -std::numeric_limits<double>::infinity();
  bool need_final_e = false;
  for (int it = 0; it < cfg.max_em_iter; ++it) {
    double ll = 0.0;
    out.z = gaussian_e_step(xs, out.pi, out.mu, out.sigma2, &ll);
    const double pen = ll - lambda * l1_norm(out.mu);
    out.trace.push_back(pen);
    out.loglik = ll;
    out.penalized_loglik = pen;
    need_final_e = false;

    const Vector mass = out.z.colwise().sum().transpose();
    if (mass.minCoeff() < kVanishFraction * static_cast<double>(n)) {
      out.degenerate = true;
      return out;
    }
    if (it > 0 && std::fabs(pen - prev_pen) <= cfg.tol_em * std::max(1.0, std::fabs(prev_pen))) {
      out.converged = true;
      break;
    }
    prev_pen = pen;
    out.pi = m_step_pi(out.z);
    gaussian_m_step(xs, out.z, lambda, out.mu, out.sigma2);
    need_final_e = true;
  }
  if (need_final_e) {
    double ll = 0.0;
    out.z = gaussian_e_step(xs, out.pi, out.mu, out.sigma2, &ll);
    const double pen = ll - lambda * l1_norm(out.mu);
    out.trace.push_back(pen);
    out.loglik = ll;
    out.penalized_loglik = pen;
    const Vector mass = out.z.colwise().sum().transpose();
    if (mass.minCoeff() < kVanishFraction * static_cast<double>(n)) out.degenerate = true;
  }
  return out;
}

}  // namespace

GaussianMixtureFit fit_sgclust(const Matrix& x, int K, double lambda,
                               const FitConfig& cfg) {
  if (!x.allFinite()) throw ValidationError("fit_sgclust: input must be finite");
  if (K < 1 || K > x.cols())
    throw ValidationError("fit_sgclust: K must lie in [1, n]");
  if (lambda < 0.0) throw ValidationError("fit_sgclust: lambda must be >= 0");

  const Matrix xs = standardize_rows(x);

  std::vector<SgRestart> outcomes(cfg.n_restarts);
  parallel_for(cfg.n_restarts, cfg.threads, [&](int r) {
    outcomes[r] = run_sg_restart(
        xs, K, lambda, cfg,
        Rng::fork(cfg.seed, static_cast<std::uint64_t>(r)).next_u64());
  });

  int best = -1;
  int usable = 0;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    if (outcomes[r].degenerate) continue;
    ++usable;
    if (best < 0 || outcomes[r].penalized_loglik > outcomes[best].penalized_loglik)
      best = r;
  }
  if (best < 0) throw NumericError("fit_sgclust: every restart collapsed a component");

  SgRestart& win = outcomes[best];
  GaussianMixtureFit f;
  f.K = K;
  f.lambda = lambda;
  f.pi = m_step_pi(win.z);
  f.mu = std::move(win.mu);
  f.sigma2 = std::move(win.sigma2);
  f.responsibilities = std::move(win.z);
  f.penalized_loglik = win.penalized_loglik;
  f.loglik = win.loglik;
  f.loglik_trace = std::move(win.trace);
  f.converged = win.converged;
  f.iterations = static_cast<int>(f.loglik_trace.size());
  f.restarts_used = usable;
  f.n_zero = 0;
  for (Eigen::Index j = 0; j < f.mu.rows(); ++j)
    for (Eigen::Index k = 0; k < f.mu.cols(); ++k)
      if (f.mu(j, k) == 0.0) ++f.n_zero;
  return f;
}

std::vector<int> map_labels(const GaussianMixtureFit& fit) {
  const auto n = fit.responsibilities.rows();
  const auto K = fit.responsibilities.cols();
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    for (Eigen::Index k = 1; k < K; ++k)
      if (fit.responsibilities(i, k) > fit.responsibilities(i, best))
        best = static_cast<int>(k);
    labels[i] = best + 1;
  }
  return labels;
}

}  // namespace snbclust
