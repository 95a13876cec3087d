#include "snbclust/normalize.hpp"

#include <cmath>

namespace snbclust {

namespace {

double median(std::vector<double> xs) {
  const std::size_t n = xs.size();
  std::sort(xs.begin(), xs.end());
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

void rescale_to_unit_geomean(Vector& s) {
  const double log_gm = s.array().log().mean();
  s *= std::exp(-log_gm);
}

}  // namespace

SizeFactorResult estimate_size_factors(const CountMatrix& m, SizeFactorMethod method) {
  const auto G = m.n_genes();
  const auto n = m.n_samples();
  for (Eigen::Index i = 0; i < n; ++i)
    if (m.counts.col(i).maxCoeff() <= 0.0)
      throw ValidationError("sample " + m.sample_ids[i] + " has no positive count");

  SizeFactorResult res;
  res.size_factors.resize(n);

  if (method == SizeFactorMethod::median_of_ratios) {
    std::vector<Eigen::Index> all_pos;
    for (Eigen::Index j = 0; j < G; ++j)
      if (m.counts.row(j).minCoeff() > 0.0) all_pos.push_back(j);
    if (!all_pos.empty()) {
      Vector log_gm(all_pos.size());
      for (std::size_t r = 0; r < all_pos.size(); ++r)
        log_gm[static_cast<Eigen::Index>(r)] =
            m.counts.row(all_pos[r]).array().log().mean();
      std::vector<double> ratios(all_pos.size());
      for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < all_pos.size(); ++r)
          ratios[r] = m.counts(all_pos[r], i) /
                      std::exp(log_gm[static_cast<Eigen::Index>(r)]);
        res.size_factors[i] = median(ratios);
      }
      rescale_to_unit_geomean(res.size_factors);
      return res;
    }
    res.fell_back = true;  // fall through to column totals
  }

  for (Eigen::Index i = 0; i < n; ++i) res.size_factors[i] = m.counts.col(i).sum();
  rescale_to_unit_geomean(res.size_factors);
  return res;
}

Vector estimate_dispersions(const CountMatrix& m, const Vector& size_factors,
                            double shrink_w) {
  const auto G = m.n_genes();
  const auto n = m.n_samples();
  if (size_factors.size() != n)
    throw ValidationError("estimate_dispersions: size factor length mismatch");
  if (size_factors.minCoeff() <= 0.0)
    throw ValidationError("estimate_dispersions: size factors must be positive");
  if (shrink_w < 0.0 || shrink_w > 1.0)
    throw ValidationError("estimate_dispersions: shrink weight must lie in [0,1]");

  std::vector<double> log_raw(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    double mu = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mu += m.counts(j, i) / size_factors[i];
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = m.counts(j, i) / size_factors[i] - mu;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    const double excess = std::max(var - mu, kMomEps);
    const double raw = std::max(mu * mu / excess, 1e-300);
    log_raw[j] = std::log(raw);
  }
  const double log_med = median(log_raw);

  Vector phi(G);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double shrunk = std::exp((1.0 - shrink_w) * log_raw[j] + shrink_w * log_med);
    phi[j] = std::clamp(shrunk, kPhiMin, kPhiMax);
  }
  return phi;
}

Matrix log_cpm(const CountMatrix& m) {
  const auto G = m.n_genes();
  const auto n = m.n_samples();
  Matrix x(G, n);
  Vector denom(n);
  for (Eigen::Index i = 0; i < n; ++i) denom[i] = m.counts.col(i).sum() + 1.0;
  for (Eigen::Index j = 0; j < G; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      x(j, i) = std::log10((m.counts(j, i) + 0.5) / denom[i] * 1e6);
  return x;
}

void NormalizationProfile::validate(Eigen::Index G, Eigen::Index n) const {
  if (size_factors.size() != n || dispersions.size() != G)
    throw ValidationError("normalization profile dimensions do not match the counts");
  if (size_factors.minCoeff() <= 0.0)
    throw ValidationError("size factors must be positive");
  if (dispersions.minCoeff() <= 0.0)
    throw ValidationError("dispersions must be positive");
}

NormalizationProfile make_profile(const CountMatrix& m, SizeFactorMethod method,
                                  double shrink_w) {
  NormalizationProfile prof;
  auto sf = estimate_size_factors(m, method);
  prof.size_factors = std::move(sf.size_factors);
  prof.size_factor_fallback = sf.fell_back;
  prof.dispersions = estimate_dispersions(m, prof.size_factors, shrink_w);
  prof.log_cpm = log_cpm(m);
  prof.validate(m.n_genes(), m.n_samples());
  return prof;
}

}  // namespace snbclust
