#ifndef SNBCLUST_METRICS_HPP
#define SNBCLUST_METRICS_HPP

#include "snbclust/common.hpp"
#include "snbclust/em_fit.hpp"
#include "snbclust/gaussian_mixture.hpp"

#include <string>
#include <vector>

namespace snbclust {

/// Hubert-Arabie adjusted Rand index; 1 for identical partitions up to
/// relabeling, expectation 0 under independent random partitions.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Mann-Whitney AUC of scores against a boolean truth; ties count one half.
/// Both classes must be present.
double roc_auc(const Vector& scores, const std::vector<char>& truth);

/// One-sided (over-representation) hypergeometric tail P(X >= a) for the
/// table (a, b; c, d) = (selected&in-set, selected&out; unselected&in-set,
/// unselected&out).
double hypergeometric_tail(long a, long b, long c, long d);

/// Benjamini-Hochberg adjusted p-values, same order as the input.
std::vector<double> benjamini_hochberg(const std::vector<double>& p);

struct GeneSet {
  std::string name;
  std::vector<char> mask;  // over the same gene universe as `selected`
};

struct EnrichmentRow {
  std::string set;
  long a = 0, b = 0, c = 0, d = 0;
  double p = 1.0;
  double fdr = 1.0;
  bool empty_set = false;
};

/// Fisher's exact over-representation test of the selected mask against each
/// gene set; empty sets get p = 1 and a warning flag.
std::vector<EnrichmentRow> fisher_enrichment(const std::vector<char>& selected,
                                             const std::vector<GeneSet>& gene_sets);

/// Per-gene selection scores: max_k |beta_jk - beta_star_j| for the count
/// model, max_k |mu_jk| for the Gaussian baseline.
Vector gene_scores(const MixtureFit& fit);
Vector gene_scores(const GaussianMixtureFit& fit);

}  // namespace snbclust

#endif
