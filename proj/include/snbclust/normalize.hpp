#ifndef SNBCLUST_NORMALIZE_HPP
#define SNBCLUST_NORMALIZE_HPP

#include "snbclust/common.hpp"
#include "snbclust/count_matrix.hpp"

namespace snbclust {

// Dispersion clamp and moment-matching guard.
constexpr double kPhiMin = 0.01;
constexpr double kPhiMax = 1000.0;
constexpr double kMomEps = 1e-8;
constexpr double kDefaultDispersionShrink = 0.25;

enum class SizeFactorMethod { median_of_ratios, library_total };

struct SizeFactorResult {
  Vector size_factors;     // geometric mean 1
  bool fell_back = false;  // median_of_ratios had no all-positive gene
};

/// Per-sample size factors, rescaled so their geometric mean is 1.
/// median_of_ratios uses the median count/geometric-row-mean ratio over genes
/// positive in every sample; if no such gene exists it falls back to column
/// totals and sets fell_back.
SizeFactorResult estimate_size_factors(const CountMatrix& m, SizeFactorMethod method);

/// Gene-wise NB dispersions by moment matching on size-factor-adjusted
/// counts, shrunk on the log scale toward the gene median with weight
/// shrink_w, then clamped to [kPhiMin, kPhiMax].
Vector estimate_dispersions(const CountMatrix& m, const Vector& size_factors,
                            double shrink_w = kDefaultDispersionShrink);

/// log10 counts-per-million with +0.5 count and +1.0 library-size offsets.
Matrix log_cpm(const CountMatrix& m);

/// Per-sample size factors plus per-gene dispersions and the log-CPM matrix
/// the continuous baselines consume. Size factors from estimate_size_factors
/// have geometric mean 1; the struct itself only requires positivity so that
/// rescaled profiles can be constructed in analyses.
struct NormalizationProfile {
  Vector size_factors;  // n
  Vector dispersions;   // G
  Matrix log_cpm;       // G x n
  bool size_factor_fallback = false;

  void validate(Eigen::Index G, Eigen::Index n) const;
};

NormalizationProfile make_profile(
    const CountMatrix& m,
    SizeFactorMethod method = SizeFactorMethod::median_of_ratios,
    double shrink_w = kDefaultDispersionShrink);

}  // namespace snbclust

#endif
