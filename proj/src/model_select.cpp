#include "snbclust/model_select.hpp"

#include <cmath>

namespace snbclust {

double bic_value(double loglik, Eigen::Index n, int K, Eigen::Index G, long q) {
  const double d_e = static_cast<double>(K - 1) +
                     static_cast<double>(K) * static_cast<double>(G) -
                     static_cast<double>(q);
  return -2.0 * loglik + std::log(static_cast<double>(n)) * d_e;
}

double bic(const MixtureFit& fit, Eigen::Index n) {
  return bic_value(fit.loglik, n, fit.K, fit.beta.rows(), fit.n_shrunk);
}

double bic(const GaussianMixtureFit& fit, Eigen::Index n, Eigen::Index G) {
  return bic_value(fit.loglik, n, fit.K, G, fit.n_zero);
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("lambda path: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0) throw ValidationError("lambda path: negative lambda");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw ValidationError("lambda path: grid must be strictly increasing");
  }
}

template <typename Result>
int choose_by_bic(const std::vector<PathEntry>& entries, Result&) {
  int chosen = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].ok) continue;
    // <= prefers the larger lambda (sparser model) on ties.
    if (chosen < 0 || entries[i].bic <= entries[chosen].bic)
      chosen = static_cast<int>(i);
  }
  if (chosen < 0) throw NumericError("lambda path: every fit failed");
  return chosen;
}

}  // namespace

PathResult run_lambda_path(const CountMatrix& m, const NormalizationProfile& prof,
                           const GlobalMeans& gm, int K,
                           const std::vector<double>& lambda_grid,
                           const FitConfig& cfg) {
  check_grid(lambda_grid);
  NbWorkspace ws(m, prof);

  PathResult res;
  res.lambdas = lambda_grid;
  res.entries.resize(lambda_grid.size());
  res.fits.resize(lambda_grid.size());

  bool have_warm = false;
  Matrix warm_beta;
  Vector warm_pi;
  for (std::size_t t = 0; t < lambda_grid.size(); ++t) {
    FitConfig fc = cfg;
    fc.lambda = lambda_grid[t];
    if (have_warm) {
      fc.init = InitKind::warm_start;
      fc.warm_beta = warm_beta;
      fc.warm_pi = warm_pi;
      fc.n_restarts = 1;
    }
    PathEntry& e = res.entries[t];
    e.lambda = lambda_grid[t];
    try {
      MixtureFit f = fit(ws, prof, gm, fc);
      e.ok = true;
      e.loglik = f.loglik;
      e.penalized_loglik = f.penalized_loglik;
      e.q = f.n_shrunk;
      const auto mask = selected_genes(f);
      e.n_selected = std::count(mask.begin(), mask.end(), char(1));
      e.bic = bic(f, ws.n_samples());
      warm_beta = f.beta;
      warm_pi = f.pi;
      have_warm = true;
      res.fits[t] = std::move(f);
    } catch (const std::exception& ex) {
      e.ok = false;
      e.error = ex.what();
    }
  }
  res.chosen_index = choose_by_bic(res.entries, res);
  return res;
}

namespace {

// Geometric search for the smallest lambda at which a pilot fit shrinks every
// cluster mean to the global mean. Pilot fits that lose a component (possible
// in the partial-shrinkage transition zone) count as not fully shrunk.
template <typename FullyShrunkAt>
double doubling_lambda_max(const FullyShrunkAt& fully_shrunk_at) {
  auto shrunk = [&](double lam) {
    try {
      return fully_shrunk_at(lam);
    } catch (const std::exception&) {
      return false;
    }
  };
  double lam = 1.0;
  if (shrunk(lam)) {
    while (lam > 1e-9 && shrunk(lam / 2.0)) lam /= 2.0;
    return lam;
  }
  while (lam < 1e12 && !shrunk(lam)) lam *= 2.0;
  return lam;
}

}  // namespace

std::vector<double> log_spaced_grid(double lo, double hi, int n_points) {
  std::vector<double> grid(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
    grid[i] = lo * std::pow(hi / lo, t);
  }
  return grid;
}

std::vector<double> default_lambda_grid(const CountMatrix& m,
                                        const NormalizationProfile& prof,
                                        const GlobalMeans& gm, int K,
                                        const FitConfig& cfg, int n_points) {
  NbWorkspace ws(m, prof);
  FitConfig pilot = cfg;
  pilot.n_restarts = 1;
  pilot.max_em_iter = std::min(cfg.max_em_iter, 50);
  const long full = static_cast<long>(ws.n_genes()) * K;
  const double lambda_max = doubling_lambda_max([&](double lam) {
    pilot.lambda = lam;
    return fit(ws, prof, gm, pilot).n_shrunk == full;
  });
  return log_spaced_grid(lambda_max / 1000.0, lambda_max, n_points);
}

SgPathResult run_sg_lambda_path(const Matrix& logcpm, int K,
                                const std::vector<double>& lambda_grid,
                                const FitConfig& cfg) {
  check_grid(lambda_grid);
  const auto G = logcpm.rows();
  const auto n = logcpm.cols();

  SgPathResult res;
  res.lambdas = lambda_grid;
  res.entries.resize(lambda_grid.size());
  res.fits.resize(lambda_grid.size());

  bool have_warm = false;
  Matrix warm_mu;
  Vector warm_pi;
  for (std::size_t t = 0; t < lambda_grid.size(); ++t) {
    FitConfig fc = cfg;
    fc.K = K;
    if (have_warm) {
      fc.init = InitKind::warm_start;
      fc.warm_beta = warm_mu;
      fc.warm_pi = warm_pi;
      fc.n_restarts = 1;
    }
    PathEntry& e = res.entries[t];
    e.lambda = lambda_grid[t];
    try {
      GaussianMixtureFit f = fit_sgclust(logcpm, K, lambda_grid[t], fc);
      e.ok = true;
      e.loglik = f.loglik;
      e.penalized_loglik = f.penalized_loglik;
      e.q = f.n_zero;
      long sel = 0;
      for (Eigen::Index j = 0; j < f.mu.rows(); ++j)
        for (Eigen::Index k = 0; k < f.mu.cols(); ++k)
          if (f.mu(j, k) != 0.0) { ++sel; break; }
      e.n_selected = sel;
      e.bic = bic(f, n, G);
      warm_mu = f.mu;
      warm_pi = f.pi;
      have_warm = true;
      res.fits[t] = std::move(f);
    } catch (const std::exception& ex) {
      e.ok = false;
      e.error = ex.what();
    }
  }
  res.chosen_index = choose_by_bic(res.entries, res);
  return res;
}

std::vector<double> default_sg_lambda_grid(const Matrix& logcpm, int K,
                                           const FitConfig& cfg, int n_points) {
  FitConfig pilot = cfg;
  pilot.n_restarts = 1;
  pilot.max_em_iter = std::min(cfg.max_em_iter, 50);
  const long full = static_cast<long>(logcpm.rows()) * K;
  const double lambda_max = doubling_lambda_max([&](double lam) {
    return fit_sgclust(logcpm, K, lam, pilot).n_zero == full;
  });
  return log_spaced_grid(lambda_max / 1000.0, lambda_max, n_points);
}

}  // namespace snbclust
